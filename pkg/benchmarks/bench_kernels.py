"""Compare the compiled and pure-Python quorum-scan backends.

Times the two mask kernels on realistic quorum systems, then (optionally)
times one full simulated scenario under each backend via subprocesses,
since the backend is fixed at import time.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --end-to-end
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import timeit
from array import array

from regsim import _maskops_py
from regsim.quorum import build_majority, build_matrix

try:
    from regsim import _maskops_c
except ImportError:
    _maskops_c = None

END_TO_END_SNIPPET = """
import time
from regsim.config import ScenarioConfig, validate
from regsim.harness import run_scenario
from regsim.kernels import BACKEND

t0 = time.perf_counter()
for seed in range(40):
    config = validate(ScenarioConfig(
        algorithm="erato", topology="star", n_servers=9, quorums="majority",
        n_readers=20, n_writers=1, scheme="stochastic",
        read_interval=0.1, write_interval=0.25,
        ops_per_client=10, writes_per_client=4, seed=seed, jitter_max=0.001))
    assert run_scenario(config).verdict.ok
print("%s backend: 40 majority(9) runs in %.3fs" % (BACKEND, time.perf_counter() - t0))
"""


def scan_workload(masks, seed=0):
    """Responder masks shaped like ack accumulation: growing random subsets."""
    rng = random.Random(seed)
    universe = 0
    for m in masks:
        universe |= m
    bits = [b for b in range(universe.bit_length()) if universe >> b & 1]
    out = []
    for _ in range(400):
        rng.shuffle(bits)
        acc = 0
        for b in bits:
            acc |= 1 << b
            out.append(acc)
    return out


def bench_backend(impl, masks, responders, repeats=5):
    def contained():
        fc = impl.first_contained
        for r in responders:
            fc(masks, r)

    def view3():
        v3 = impl.view3_exists
        for r in responders:
            v3(masks, masks[0], r & masks[0])

    n = len(responders)
    tc = min(timeit.repeat(contained, number=1, repeat=repeats)) / n
    tv = min(timeit.repeat(view3, number=1, repeat=repeats)) / n
    return tc, tv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--end-to-end", action="store_true",
                        help="also time full simulations under each backend")
    args = parser.parse_args(argv)

    systems = [
        ("majority(5)", build_majority(5)),
        ("majority(9)", build_majority(9)),
        ("matrix(3,3)", build_matrix(3, 3)),
    ]
    backends = [("python", _maskops_py)]
    if _maskops_c is not None:
        backends.append(("c", _maskops_c))
    else:
        print("compiled extension not importable; timing pure Python only")

    for label, qs in systems:
        responders = scan_workload(qs.masks)
        print("%s: %d quorums, %d responder masks" % (label, len(qs.masks), len(responders)))
        times = {}
        for name, impl in backends:
            # The compiled kernel reads a typed buffer, matching production use.
            masks = array("Q", qs.masks) if name == "c" else qs.masks
            tc, tv = bench_backend(impl, masks, responders)
            times[name] = (tc, tv)
            print("  %-6s first_contained %8.0f ns/call   view3_exists %8.0f ns/call"
                  % (name, tc * 1e9, tv * 1e9))
        if "c" in times:
            print("  speedup x%.1f / x%.1f"
                  % (times["python"][0] / times["c"][0],
                     times["python"][1] / times["c"][1]))

    if args.end_to_end:
        sys.stdout.flush()
        for env_extra in ({}, {"REGSIM_PURE": "1"}):
            env = dict(os.environ, **env_extra)
            subprocess.run([sys.executable, "-c", END_TO_END_SNIPPET],
                           env=env, check=True)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
