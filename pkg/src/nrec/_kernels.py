"""Numba kernels for the exhaustive census.

The successor of window w is ((w << 1) & mask) | fired(w), so pass 1 only
needs to store one fired bit per state (2^k bits total).  Pass 2 walks the
functional graph with a per-node label array: WHITE = unvisited, GRAY = on
the current path, anything else = index into the period table.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def pass2_census(bits, k, label, white, gray, max_periods, max_cycles):
    """Functional-graph walk crediting every node to its component's period.

    bits  -- packed fired bits, one per state (little bit order within bytes)
    label -- preallocated array of 2^k entries, filled with `white`
    Returns (periods, counts, reps, nper, cyc_periods, cyc_reps, ncyc):
    reps[i] is a cycle node of period periods[i], usable as a witness initial
    window; cyc_* record one node per distinct cycle (ncyc = -1 when more
    than max_cycles were found and the per-cycle record was abandoned).
    """
    n = np.int64(1) << k
    mask = n - 1
    periods = np.zeros(max_periods, dtype=np.int64)
    counts = np.zeros(max_periods, dtype=np.int64)
    reps = np.zeros(max_periods, dtype=np.int64)
    nper = 0
    cyc_periods = np.zeros(max_cycles, dtype=np.int64)
    cyc_reps = np.zeros(max_cycles, dtype=np.int64)
    ncyc = 0
    for v in range(n):
        if label[v] != white:
            continue
        # walk forward marking the path gray until we leave fresh territory
        u = np.int64(v)
        while label[u] == white:
            label[u] = gray
            b = (bits[u >> 3] >> (u & 7)) & 1
            u = ((u << 1) & mask) | b
        if label[u] == gray:
            # new cycle discovered at u: measure its period
            p = np.int64(1)
            b = (bits[u >> 3] >> (u & 7)) & 1
            w = ((u << 1) & mask) | b
            while w != u:
                p += 1
                b = (bits[w >> 3] >> (w & 7)) & 1
                w = ((w << 1) & mask) | b
            if ncyc >= 0:
                if ncyc < max_cycles:
                    cyc_periods[ncyc] = p
                    cyc_reps[ncyc] = u
                    ncyc += 1
                else:
                    ncyc = -1
            idx = -1
            for i in range(nper):
                if periods[i] == p:
                    idx = i
                    break
            if idx < 0:
                if nper >= max_periods:
                    return periods, counts, reps, -1, cyc_periods, cyc_reps, ncyc
                idx = nper
                periods[idx] = p
                reps[idx] = u
                nper += 1
            # label the cycle nodes
            label[u] = idx
            counts[idx] += 1
            b = (bits[u >> 3] >> (u & 7)) & 1
            w = ((u << 1) & mask) | b
            while w != u:
                label[w] = idx
                counts[idx] += 1
                b = (bits[w >> 3] >> (w & 7)) & 1
                w = ((w << 1) & mask) | b
        idx = label[u]
        # credit the gray tail to the component's period
        w = np.int64(v)
        while label[w] == gray:
            label[w] = idx
            counts[idx] += 1
            b = (bits[w >> 3] >> (w & 7)) & 1
            w = ((w << 1) & mask) | b
    return periods, counts, reps, nper, cyc_periods, cyc_reps, ncyc


@njit(cache=True)
def perwindow_census(low_table, high_table, klow, k, threshold2, max_periods):
    """Independent oracle: Brent period detection run separately per window.

    Shares nothing across trajectories (no labels, no memo); the only
    precomputation is the linear potential split into two half-tables.
    """
    n = np.int64(1) << k
    mask = n - 1
    lowmask = (np.int64(1) << klow) - 1
    periods = np.zeros(max_periods, dtype=np.int64)
    counts = np.zeros(max_periods, dtype=np.int64)
    nper = 0
    for v in range(n):
        # Brent: find the minimal period lambda of the rho from v
        power = np.int64(1)
        lam = np.int64(1)
        tortoise = np.int64(v)
        pot = low_table[tortoise & lowmask] + high_table[tortoise >> klow]
        hare = ((tortoise << 1) & mask) | (1 if pot >= threshold2 else 0)
        while tortoise != hare:
            if power == lam:
                tortoise = hare
                power <<= 1
                lam = 0
            pot = low_table[hare & lowmask] + high_table[hare >> klow]
            hare = ((hare << 1) & mask) | (1 if pot >= threshold2 else 0)
            lam += 1
        idx = -1
        for i in range(nper):
            if periods[i] == lam:
                idx = i
                break
        if idx < 0:
            if nper >= max_periods:
                return periods, counts, -1
            idx = nper
            periods[idx] = lam
            nper += 1
        counts[idx] += 1
    return periods, counts, nper
