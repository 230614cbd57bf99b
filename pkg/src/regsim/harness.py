"""Scenario execution and persistence: wire a config into quorums,
topology, workload and protocol, run the simulation, check the result,
and emit trace logs / CSV rows.

File formats are part of the external contract:

Trace log: one event per line, tab separated, first field the record
type.  Floats are serialized with repr so that parsing and re-serializing
a trace reproduces it byte for byte.  In-memory view classification notes
are not persisted.

Operation CSV: one row per completed operation, fixed column schema
(CSV_HEADER below); same seed, same config, same bytes.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from regsim.checker import Verdict, check_atomicity_tagged, extract_history
from regsim.config import (
    ConfigError,
    ScenarioConfig,
    build_quorum_system,
    parse_fields,
    validate,
    _SCHEMA,
    _parse_crash_list,
)
from regsim.core import OperationRecord, Tag, parse_pid, reader, server, writer
from regsim.metrics import OpStats, Summary, per_operation_stats, summarize
from regsim.netsim import Network, TopologySpec, Trace, build_topology, run
from regsim.protocols import get_algorithm
from regsim.workload import build_workload

CSV_HEADER = (
    "algorithm,topology,n_servers,n_readers,n_writers,scheme,seed,"
    "op_id,process,op_kind,invoked_at,latency_s,exchanges,messages"
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ATOMICITY = 3
EXIT_LIVENESS = 4


# ---------------------------------------------------------------- trace io

_REC_TYPES: dict[str, tuple] = {
    # field converters after the leading record-type token
    "inv": (float, parse_pid, int, str, str),
    "res": (float, parse_pid, int, int, int, int, str),
    "snd": (float, parse_pid, parse_pid, str, parse_pid, int, float),
    "dlv": (float, parse_pid, parse_pid, str, parse_pid, int),
    "tag": (float, parse_pid, int, int),
    "wtag": (float, parse_pid, int, int, int),
    "crs": (float, parse_pid),
    "end": (float, str, int, int),
}


def _field_text(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def trace_to_text(trace: Trace) -> str:
    head = ["run", "algorithm=%s" % trace.algorithm, "seed=%d" % trace.seed]
    head += ["%s=%s" % (k, v) for k, v in sorted(trace.meta.items()) if k not in ("algorithm", "seed")]
    lines = ["\t".join(head)]
    for rec in trace.records:
        lines.append("\t".join([rec[0]] + [_field_text(v) for v in rec[1:]]))
    return "\n".join(lines) + "\n"


def trace_from_text(text: str) -> Trace:
    trace = Trace()
    ordinal: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        parts = line.split("\t")
        kind = parts[0]
        if kind == "run":
            for part in parts[1:]:
                key, _, val = part.partition("=")
                if key == "algorithm":
                    trace.algorithm = val
                elif key == "seed":
                    trace.seed = int(val)
                else:
                    trace.meta[key] = val
            continue
        converters = _REC_TYPES.get(kind)
        if converters is None or len(parts) - 1 != len(converters):
            raise ValueError("line %d: bad trace record %r" % (lineno, line))
        rec = (kind,) + tuple(conv(p) for conv, p in zip(converters, parts[1:]))
        trace.records.append(rec)
        if kind == "inv":
            _, t, pid, op_id, op_kind, value_hex = rec
            value = bytes.fromhex(value_hex) if value_hex != "-" else None
            trace.ops[op_id] = OperationRecord(op_id, pid, op_kind, t, value=value)
            ordinal[pid] = ordinal.get(pid, 0) + 1
            trace.invocations[(pid, ordinal[pid])] = op_id
        elif kind == "res":
            _, t, pid, op_id, exchanges, ts, wid, value_hex = rec
            op = trace.ops[op_id]
            op.responded_at = t
            op.exchanges = exchanges
            op.tag = Tag(ts, wid)
            op.value = bytes.fromhex(value_hex)
        elif kind == "wtag":
            _, t, pid, op_id, ts, wid = rec
            trace.ops[op_id].tag = Tag(ts, wid)
        elif kind == "crs":
            _, t, pid = rec
            trace.crash_at[pid] = min(t, trace.crash_at.get(pid, t))
        elif kind == "end":
            _, t, status, stale, skipped = rec
            trace.end_time = t
            trace.incomplete = status == "incomplete"
            trace.stale_drops = stale
            trace.skipped_invokes = skipped
    return trace


# ---------------------------------------------------------------- running

def build_network(config: ScenarioConfig) -> Network:
    net = build_topology(
        TopologySpec(config.topology), config.n_servers, config.n_readers, config.n_writers
    )
    net.jitter_max = config.jitter_max
    return net


def crash_schedule(config: ScenarioConfig) -> list:
    out = [(server(i), t) for i, t in config.crash_servers]
    out += [(reader(i), t) for i, t in config.crash_readers]
    out += [(writer(i), t) for i, t in config.crash_writers]
    return out


@dataclass
class RunResult:
    config: ScenarioConfig
    trace: Trace
    verdict: Verdict
    stats: list[OpStats]

    def summaries(self) -> list[Summary]:
        return summarize(self.stats)

    def csv_text(self) -> str:
        prefix = "%s,%s,%d,%d,%d,%s,%d" % (
            self.config.algorithm, self.config.topology, self.config.n_servers,
            self.config.n_readers, self.config.n_writers, self.config.scheme,
            self.config.seed,
        )
        lines = [CSV_HEADER]
        for s in self.stats:
            lines.append("%s,%d,%s,%s,%s,%s,%d,%d" % (
                prefix, s.op_id, s.process, s.kind,
                repr(s.invoked_at), repr(s.latency_s), s.exchanges, s.messages,
            ))
        return "\n".join(lines) + "\n"

    def exit_code(self) -> int:
        if not self.verdict.ok:
            return EXIT_ATOMICITY
        if self.trace.incomplete:
            return EXIT_LIVENESS
        return EXIT_OK


def run_scenario(config: ScenarioConfig) -> RunResult:
    qs = build_quorum_system(config)
    net = build_network(config)
    trace = run(
        net,
        get_algorithm(config.algorithm),
        qs,
        build_workload(config),
        crash_schedule(config),
        seed=config.seed,
        cap_s=config.cap_seconds,
    )
    trace.meta = config.describe()
    stats = per_operation_stats(trace)
    verdict = check_atomicity_tagged(extract_history(trace))
    return RunResult(config, trace, verdict, stats)


def write_outputs(result: RunResult, out_dir: Path) -> dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "trace": out_dir / "trace.log",
        "csv": out_dir / "results.csv",
        "verdict": out_dir / "verdict.txt",
    }
    paths["trace"].write_text(trace_to_text(result.trace))
    paths["csv"].write_text(result.csv_text())
    v = result.verdict
    status = "ok" if v.ok else "%s: %s (witness %s)" % (v.violated, v.detail, list(v.witness))
    liveness = "incomplete" if result.trace.incomplete else "complete"
    paths["verdict"].write_text("atomicity: %s\nliveness: %s\n" % (status, liveness))
    return paths


# ----------------------------------------------------------------- sweeps

AGGREGATE_HEADER = (
    "algorithm,topology,n_servers,n_readers,n_writers,scheme,seeds,op_kind,"
    "count,mean_latency_s,median_latency_s,p95_latency_s,max_latency_s,fast_read_ratio"
)


class SweepError(RuntimeError):
    def __init__(self, report: list[str], exit_code: int):
        super().__init__("\n".join(report))
        self.report = report
        self.exit_code = exit_code


def _grid_value(key: str, raw: str):
    for section, keys in _SCHEMA.items():
        typ = keys.get(key)
        if typ is None:
            continue
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "crashes":
            return _parse_crash_list(raw)
        return raw.strip()
    raise ConfigError(["grid.%s: unknown key" % key])


def parse_grid(text: str) -> list[ScenarioConfig]:
    """A grid file is a scenario file plus a [grid] section whose keys hold
    comma-separated alternatives; `seeds = N` expands to seeds 0..N-1.
    Returns the cross product in file order, seeds innermost.  Constraint
    validation happens per expanded cell, since the base alone may be
    incomplete (e.g. the algorithm axis lives in [grid])."""
    import configparser

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(["not parseable: %s" % exc]) from exc
    if not parser.has_section("grid"):
        raise ConfigError(["grid: missing section"])
    grid_items = list(parser.items("grid"))
    base = ScenarioConfig(**parse_fields(text, ignore_sections=("grid",)))

    seeds = list(range(10))
    axes: list[tuple[str, list]] = []
    for key, raw in grid_items:
        if key == "seeds":
            seeds = list(range(int(raw)))
            continue
        axes.append((key, [_grid_value(key, part.strip()) for part in raw.split(",")]))

    configs = []
    errors: list[str] = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        assigned = dict(zip((k for k, _ in axes), combo))
        for s in seeds:
            try:
                configs.append(validate(replace(base, seed=s, **assigned)))
            except ConfigError as exc:
                cell = ", ".join("%s=%s" % kv for kv in assigned.items())
                errors.append("cell (%s): %s" % (cell, exc))
                break  # every seed of this cell fails identically
    if errors:
        raise ConfigError(errors)
    return configs


def _cell_key(config: ScenarioConfig) -> tuple:
    return (config.algorithm, config.topology, config.n_servers,
            config.n_readers, config.n_writers, config.scheme)


def _cell_name(key: tuple) -> str:
    return "%s_%s_s%d_r%d_w%d_%s" % key


def _sweep_job(config: ScenarioConfig):
    result = run_scenario(config)
    return (
        config,
        result.verdict,
        result.trace.incomplete,
        result.stats,
        result.csv_text(),
    )


def sweep(
    configs: list[ScenarioConfig],
    out_dir: Path,
    parallelism: int = 1,
) -> dict[str, Path]:
    """Run every config, write one op-level CSV per cell (all its seeds)
    plus an aggregate CSV across seeds.  Raises SweepError if any run
    violates atomicity or does not finish."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_sweep_job, configs, chunksize=1))
    else:
        outcomes = [_sweep_job(c) for c in configs]

    failures: list[str] = []
    worst = EXIT_OK
    cells: dict[tuple, list] = {}
    for config, verdict, incomplete, stats, csv_text in outcomes:
        label = "%s seed %d" % (_cell_name(_cell_key(config)), config.seed)
        if not verdict.ok:
            failures.append("%s: atomicity %s — %s" % (label, verdict.violated, verdict.detail))
            worst = EXIT_ATOMICITY
        elif incomplete:
            failures.append("%s: liveness cap hit with operations pending" % label)
            if worst == EXIT_OK:
                worst = EXIT_LIVENESS
        cells.setdefault(_cell_key(config), []).append((config, stats, csv_text))

    paths: dict[str, Path] = {}
    agg_lines = [AGGREGATE_HEADER]
    for key in sorted(cells):
        runs = cells[key]
        body = []
        for _, _, csv_text in runs:
            body += csv_text.splitlines()[1:]
        cell_path = out_dir / (_cell_name(key) + ".csv")
        cell_path.write_text("\n".join([CSV_HEADER] + body) + "\n")
        paths[_cell_name(key)] = cell_path
        pooled = [s for _, stats, _ in runs for s in stats]
        for summary in summarize(pooled):
            ratio = "" if summary.fast_read_ratio is None else repr(summary.fast_read_ratio)
            agg_lines.append("%s,%s,%d,%d,%d,%s,%d,%s,%d,%s,%s,%s,%s,%s" % (
                key[0], key[1], key[2], key[3], key[4], key[5], len(runs),
                summary.op_kind, summary.count,
                repr(summary.mean_latency), repr(summary.median_latency),
                repr(summary.p95_latency), repr(summary.max_latency), ratio,
            ))
    agg_path = out_dir / "aggregate.csv"
    agg_path.write_text("\n".join(agg_lines) + "\n")
    paths["aggregate"] = agg_path

    if failures:
        raise SweepError(failures, worst)
    return paths
