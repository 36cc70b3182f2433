# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch assurance kernel; bit-identical to ``_reff_py``."""


def reff_batch(
    long long[::1] ev_start,
    double[::1] ev_raw,
    double[::1] ev_penalty,
    long long[::1] ev_until,
    long long[::1] dep_start,
    long long[::1] dep_index,
    double[::1] dep_penalty,
    double[::1] layer_ceiling,
    double[::1] formality_ceiling,
    long long as_of,
    double floor,
    double[::1] out,
):
    cdef Py_ssize_t n = layer_ceiling.shape[0]
    cdef Py_ssize_t i, j
    cdef double best, decayed, adjusted, contrib
    cdef bint has_term
    for i in range(n):
        best = 2.0
        has_term = False
        for j in range(ev_start[i], ev_start[i + 1]):
            if as_of <= ev_until[j]:
                decayed = ev_raw[j]
            else:
                decayed = floor
            adjusted = decayed - ev_penalty[j]
            if not adjusted > 0.0:
                adjusted = 0.0
            if adjusted < best:
                best = adjusted
            has_term = True
        for j in range(dep_start[i], dep_start[i + 1]):
            contrib = out[dep_index[j]] - dep_penalty[j]
            if not contrib > 0.0:
                contrib = 0.0
            if contrib < best:
                best = contrib
            has_term = True
        if not has_term:
            out[i] = 0.0
            continue
        if layer_ceiling[i] < best:
            best = layer_ceiling[i]
        if formality_ceiling[i] < best:
            best = formality_ceiling[i]
        out[i] = best
