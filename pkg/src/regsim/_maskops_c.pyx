# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled quorum bitmask scans; see _maskops_py for the reference semantics.

Masks must fit in 64 bits (at most 64 servers); regsim.quorum routes larger
universes to the pure implementation.
"""


def first_contained(const unsigned long long[::1] masks, unsigned long long responders):
    cdef Py_ssize_t i, n = masks.shape[0]
    for i in range(n):
        if masks[i] & ~responders == 0:
            return i
    return -1


def view3_exists(const unsigned long long[::1] masks, unsigned long long current,
                 unsigned long long maxset):
    cdef Py_ssize_t i, n = masks.shape[0]
    for i in range(n):
        if masks[i] != current and (masks[i] & current) & ~maxset == 0:
            return True
    return False
