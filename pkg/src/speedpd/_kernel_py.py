"""Pure-Python kernels: the squeezing event loop and the DP table fill.

Array conventions (all 1-based, local to one subinstance with m jobs):
``r[0..m+1]`` and ``d[0..m+1]`` are restricted releases/deadlines with
``d[0]`` the left boundary and ``r[m+1]`` the right one; ``P[0..m]`` is the
workload prefix sum. ``_kernel.pyx`` is a typed copy of this module.
"""

import math

INF = math.inf

EV_DEADLINE = 0
EV_SPLIT = 1
EV_MERGE = 2
EV_UNFEASIBLE = 3


def squeeze_row(r, d, P, alpha, j, seed_t, seed_u, seed_b, snapshots=False, counts=None):
    """Speed costs of pairs (i, j), i = 1..j, from the optimal schedule of (1, j).

    ``seed_*`` describe that schedule's blocks in time order (start, end,
    last job). Returns ``(costs, n_events, snaps)``; ``costs[i]`` is inf for
    infeasible pairs, ``snaps`` lists ``(i, blocks)`` at every deadline event
    when requested. ``counts``, if given, is a 4-list incremented per event kind.
    """
    am1 = alpha - 1.0
    R = r[j + 1]
    costs = [INF] * (j + 2)
    snaps = [] if snapshots else None
    # stack of blocks, bottom = last in time; C[q] = cost of blocks 0..q (stale for top)
    T, U, B, S, C = [], [], [], [], []
    for q in range(len(seed_t) - 1, -1, -1):
        first = seed_b[q - 1] + 1 if q > 0 else 1
        W = P[seed_b[q]] - P[first - 1]
        s = W / (seed_u[q] - seed_t[q])
        T.append(seed_t[q])
        U.append(seed_u[q])
        B.append(seed_b[q])
        S.append(s)
        C.append((C[-1] if C else 0.0) + W * s**am1)
    events = 0
    # split candidate cache: suffix argmin of s_hat(k, b, u) over k in [lo, b)
    ck_b = -1
    ck_u = INF
    ck_lo = 0
    ck_val = []
    ck_arg = []
    i = 1
    while i <= j:
        left = d[i - 1]
        if left >= R:
            break
        if left == d[i]:
            events += 1
            if counts is not None:
                counts[EV_UNFEASIBLE] += 1
        else:
            while True:
                top = len(T) - 1
                u = U[top]
                b = B[top]
                W = P[b] - P[i - 1]
                if T[top] >= left:
                    break
                s_dl = W / (u - left) if u > left else INF
                if b != ck_b or u != ck_u or i < ck_lo:
                    ck_b, ck_u, ck_lo = b, u, i
                    n = b - i
                    ck_val = [INF] * (n + 1)
                    ck_arg = [-1] * (n + 1)
                    for k in range(b - 1, i - 1, -1):
                        pos = k - i
                        ck_val[pos] = ck_val[pos + 1]
                        ck_arg[pos] = ck_arg[pos + 1]
                        if d[k] < u:
                            v = (P[b] - P[k]) / (u - d[k])
                            if v <= ck_val[pos]:
                                ck_val[pos] = v
                                ck_arg[pos] = k
                s_sp = ck_val[i - ck_lo]
                k_sp = ck_arg[i - ck_lo]
                s_mg = INF
                if top >= 1 and T[top - 1] == u and u < d[b]:
                    s_mg = S[top - 1]
                if s_dl <= s_sp and s_dl <= s_mg:
                    if s_dl == INF:
                        raise RuntimeError(f"squeeze stalled at i={i}, j={j}")
                    S[top] = s_dl
                    T[top] = left
                    break
                events += 1
                if s_sp <= s_mg:
                    if counts is not None:
                        counts[EV_SPLIT] += 1
                    dk = d[k_sp]
                    T[top] = dk
                    S[top] = s_sp
                    C[top] = (C[top - 1] if top else 0.0) + (P[b] - P[k_sp]) * s_sp**am1
                    T.append(dk - (P[k_sp] - P[i - 1]) / s_sp)
                    U.append(dk)
                    B.append(k_sp)
                    S.append(s_sp)
                    C.append(0.0)
                else:
                    if counts is not None:
                        counts[EV_MERGE] += 1
                    T.pop()
                    U.pop()
                    B.pop()
                    S.pop()
                    C.pop()
                    top -= 1
                    S[top] = s_mg
                    T[top] = U[top] - (P[B[top]] - P[i - 1]) / s_mg
            top = len(T) - 1
            events += 1
            if counts is not None:
                counts[EV_DEADLINE] += 1
            rest = C[top - 1] if top else 0.0
            costs[i] = rest + (P[B[top]] - P[i - 1]) * S[top] ** am1
            if snapshots:
                snaps.append((i, [(T[q], U[q], B[q]) for q in range(top, -1, -1)]))
        # drop job i from the first block
        top = len(T) - 1
        if B[top] == i:
            T.pop()
            U.pop()
            B.pop()
            S.pop()
            C.pop()
        else:
            T[top] = U[top] - (P[B[top]] - P[i]) / S[top]
        i += 1
    return costs, events, snaps


def chain_scan(r, d, P, sstar, i, m):
    """Left-to-right suffix chain scan starting at job ``i``.

    Returns lists indexed by k (valid for k >= i): chain starter, end time of
    job k when the chain runs at critical speed, and whether every job of the
    chain up to k meets its deadline.
    """
    cs = [0] * (m + 2)
    ct = [0.0] * (m + 2)
    ok = [False] * (m + 2)
    lo = d[i - 1]
    ell = i
    start = max(r[i], lo)
    good = True
    t = start
    for k in range(i, m + 1):
        rk = max(r[k], lo)
        if t < rk:
            ell = k
            start = rk
            good = True
        t = start + (P[k] - P[ell - 1]) / sstar
        good = good and t <= d[k]
        cs[k] = ell
        ct[k] = t
        ok[k] = good
    return cs, ct, ok


def prefix_scan(r, d, P, sstar, j):
    """Right-to-left prefix chain scan for right end ``j``; returns ``h``."""
    R = r[j + 1]
    h = [0] * (j + 2)
    ell = j
    t = min(d[j], R)
    for k in range(j, 0, -1):
        dk = min(d[k], R)
        if t > dk:
            ell = k
        h[k] = ell
        t = min(d[ell], R) - (P[ell] - P[k - 1]) / sstar
    return h


def dp_fill(r, d, P, Y, L, g, sstar, gstar):
    """Fill O[i][j] for 1 <= i <= j+1 <= m+1 with the four-case recursion.

    ``Y`` is an (m+2)x(m+2) nested sequence. Returns ``(O, case, arg)`` as
    nested lists: case 0 = empty pair, 1..4 the recursion cases, -1
    infeasible; ``arg`` holds c (case 2), k (case 3) or a (case 4).
    """
    m = len(P) - 1
    O = [[INF] * (m + 2) for _ in range(m + 2)]
    case = [[-1] * (m + 2) for _ in range(m + 2)]
    arg = [[0] * (m + 2) for _ in range(m + 2)]
    scans = [None] + [chain_scan(r, d, P, sstar, i, m) for i in range(1, m + 1)]
    ce = [[0] * (m + 2) for _ in range(m + 2)]
    for i in range(1, m + 1):
        cs = scans[i][0]
        for k in range(i, m + 1):
            ce[i][cs[k]] = k
    for j in range(0, m + 1):
        R = r[j + 1]
        O[j + 1][j] = min(L, g * max(0.0, R - d[j]))
        case[j + 1][j] = 0
        if j == 0:
            continue
        h = prefix_scan(r, d, P, sstar, j)
        for i in range(j, 0, -1):
            if Y[i][j] == INF:
                continue
            lo = d[i - 1]
            best = Y[i][j]
            bc = 1
            ba = 0
            c = h[i]
            u = min(d[c], R) - (P[c] - P[i - 1]) / sstar
            if u > lo:
                v = L + gstar * (P[c] - P[i - 1]) + O[c + 1][j]
                if v < best:
                    best, bc, ba = v, 2, c
            cs, ct, ok = scans[i]
            k = cs[j]
            if ok[j] and ct[j] < R:
                v = Y[i][k - 1] + gstar * (P[j] - P[k - 1]) + L
                if v < best:
                    best, bc, ba = v, 3, k
            a = i
            while a <= j:
                b = ce[i][a]
                if b >= j:
                    break
                if ok[b]:
                    c = h[b + 1]
                    u = min(d[c], R) - (P[c] - P[b]) / sstar
                    if ct[b] < u:
                        v = Y[i][a - 1] + gstar * (P[c] - P[a - 1]) + L + O[c + 1][j]
                        if v < best:
                            best, bc, ba = v, 4, a
                a = b + 1
            O[i][j] = best
            case[i][j] = bc
            arg[i][j] = ba
    return O, case, arg
