"""Pure-Python batch assurance kernel.

Mirrors ``_reff_cy.pyx`` operation for operation; the two must stay
bit-identical. Holons are presented in topological order as flat CSR-style
arrays; the output is the effective reliability per holon.
"""

from __future__ import annotations


def reff_batch(
    ev_start,  # int64[n+1]: evidence slice bounds per holon
    ev_raw,  # float64[m]: raw scores
    ev_penalty,  # float64[m]: congruence penalties
    ev_until,  # int64[m]: effective freshness boundary (epoch seconds)
    dep_start,  # int64[n+1]: dependency slice bounds per holon
    dep_index,  # int64[k]: position of the dependency in topo order
    dep_penalty,  # float64[k]: edge congruence penalties
    layer_ceiling,  # float64[n]
    formality_ceiling,  # float64[n]
    as_of,  # int: epoch seconds
    floor,  # float: decay floor for expired evidence
    out,  # float64[n]: result buffer
) -> None:
    n = len(layer_ceiling)
    for i in range(n):
        best = 2.0
        has_term = False
        for j in range(ev_start[i], ev_start[i + 1]):
            decayed = ev_raw[j] if as_of <= ev_until[j] else floor
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
