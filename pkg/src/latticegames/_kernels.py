"""Compiled inner loops for the direct (Gillespie) simulator.

State lives in flat numpy arrays owned by the Python driver; the kernel
advances the chain event by event between sample times.  Per-site rates
sit in a Fenwick (binary indexed) tree so site selection is O(log n).
Uniform variates come from a buffer the driver refills, which keeps the
bit stream under the driver's counter-based generator.
"""
from __future__ import annotations

import numpy as np
from numba import njit

# advance() return codes
REACHED = 0
ABSORBED = 1
FROZEN = 2
REFILL = 3
LOG_FULL = 4

_REBUILD_EVERY = 1.0e6  # exact Fenwick rebuild cadence, caps float drift


@njit(cache=True)
def _fw_build(tree, rate):
    n = rate.shape[0]
    for i in range(n + 1):
        tree[i] = 0.0
    total = 0.0
    for i in range(1, n + 1):
        tree[i] += rate[i - 1]
        j = i + (i & (-i))
        if j <= n:
            tree[j] += tree[i]
        total += rate[i - 1]
    return total


@njit(cache=True)
def _fw_add(tree, n, i, delta):
    j = i + 1
    while j <= n:
        tree[j] += delta
        j += j & (-j)


@njit(cache=True)
def _fw_pick(tree, n, target):
    # largest 0-based index whose prefix sum is <= target
    pos = 0
    k = 1
    while (k << 1) <= n:
        k <<= 1
    rem = target
    while k > 0:
        nxt = pos + k
        if nxt <= n and tree[nxt] <= rem:
            rem -= tree[nxt]
            pos = nxt
        k >>= 1
    return pos


@njit(cache=True)
def _site_rate(y, strat, n2, nbrs, phi1, phi2, Nnb):
    # death part max(0,-phi(y)) * f_other(y) plus birth part
    # (1/N) * sum of positive payoffs of opposite-strategy neighbors
    sy = strat[y]
    z = n2[y]
    if sy == 1:
        phi = phi1[z]
        opp = z
    else:
        phi = phi2[z]
        opp = Nnb - z
    r = 0.0
    if phi < 0.0:
        r = (-phi) * opp / Nnb
    for k in range(Nnb):
        w = nbrs[y, k]
        if strat[w] != sy:
            if strat[w] == 1:
                pw = phi1[n2[w]]
            else:
                pw = phi2[n2[w]]
            if pw > 0.0:
                r += pw / Nnb
    return r


@njit(cache=True)
def compute_rates(strat, n2, nbrs, phi1, phi2, rate):
    n = strat.shape[0]
    Nnb = nbrs.shape[1]
    for y in range(n):
        rate[y] = _site_rate(y, strat, n2, nbrs, phi1, phi2, Nnb)


@njit(cache=True)
def advance(strat, n2, rate, tree, nbrs, ball, phi1, phi2,
            fstate, u, ipos, first_flip, flips_t, flips_x, log_state, t_target):
    """Run events until t_target, absorption, a frozen state, or a buffer limit.

    fstate: (time, total_rate, strategy-1 count, events since tree rebuild,
    total flip count).  ipos[0] is the cursor into the uniform buffer u; two
    variates per event.  first_flip: (time, site), -1 while unset.
    log_state: (logged flip count, capacity); capacity < 0 disables logging.
    """
    n = strat.shape[0]
    Nnb = nbrs.shape[1]
    nball = ball.shape[1]
    t = fstate[0]
    total = fstate[1]
    n1 = int(fstate[2])
    events = fstate[3]
    nflips = fstate[4]
    log_on = log_state[1] >= 0

    while True:
        if n1 == 0 or n1 == n:
            status = ABSORBED
            break
        if total < 1e-12:
            total = _fw_build(tree, rate)
            events = 0.0
            if total <= 0.0:
                status = FROZEN
                break
        if t >= t_target:
            status = REACHED
            break
        if ipos[0] + 2 > u.shape[0]:
            status = REFILL
            break
        if log_on and log_state[0] >= log_state[1]:
            status = LOG_FULL
            break

        u1 = u[ipos[0]]
        ipos[0] += 1
        if u1 <= 0.0:
            t = t_target
            status = REACHED
            break
        dt = -np.log(u1) / total
        if t + dt > t_target:
            t = t_target
            status = REACHED
            break
        t += dt

        u2 = u[ipos[0]]
        ipos[0] += 1
        x = _fw_pick(tree, n, u2 * total)
        if x >= n:
            x = n - 1
        guard = 0
        while rate[x] <= 0.0 and guard < n:
            x += 1
            if x >= n:
                x = 0
            guard += 1

        s_new = 3 - strat[x]
        strat[x] = s_new
        if s_new == 1:
            n1 += 1
            dlt = -1
        else:
            n1 -= 1
            dlt = 1
        for k in range(Nnb):
            n2[nbrs[x, k]] += dlt

        nflips += 1.0
        if first_flip[0] < 0.0:
            first_flip[0] = t
            first_flip[1] = x
        if log_on:
            flips_t[log_state[0]] = t
            flips_x[log_state[0]] = x
            log_state[0] += 1

        # a flip at x shifts payoffs within distance M, hence rates within 2M
        for b in range(nball):
            y = ball[x, b]
            newr = _site_rate(y, strat, n2, nbrs, phi1, phi2, Nnb)
            d = newr - rate[y]
            if d != 0.0:
                rate[y] = newr
                _fw_add(tree, n, y, d)
                total += d

        events += 1.0
        if events >= _REBUILD_EVERY:
            total = _fw_build(tree, rate)
            events = 0.0

    fstate[0] = t
    fstate[1] = total
    fstate[2] = n1
    fstate[3] = events
    fstate[4] = nflips
    return status
