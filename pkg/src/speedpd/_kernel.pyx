# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contracts as ``_kernel_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, pow, fmin, fmax

cnp.import_array()

cdef enum:
    EV_DEADLINE = 0
    EV_SPLIT = 1
    EV_MERGE = 2
    EV_UNFEASIBLE = 3


def squeeze_row(double[::1] r, double[::1] d, double[::1] P, double alpha, Py_ssize_t j,
                double[::1] seed_t, double[::1] seed_u, long long[::1] seed_b,
                bint snapshots=False, counts=None):
    cdef double am1 = alpha - 1.0
    cdef double R = r[j + 1]
    cdef Py_ssize_t nb = seed_t.shape[0]
    cdef Py_ssize_t cap = j + 2
    costs_np = np.full(j + 2, INFINITY)
    cdef double[::1] costs = costs_np
    T_np = np.empty(cap); U_np = np.empty(cap); S_np = np.empty(cap); C_np = np.empty(cap)
    B_np = np.empty(cap, dtype=np.int64)
    cdef double[::1] T = T_np, U = U_np, S = S_np, C = C_np
    cdef long long[::1] B = B_np
    val_np = np.empty(cap); arg_np = np.empty(cap, dtype=np.int64)
    cdef double[::1] ck_val = val_np
    cdef long long[::1] ck_arg = arg_np
    cdef long long cnt[4]
    cnt[0] = cnt[1] = cnt[2] = cnt[3] = 0
    snaps = [] if snapshots else None
    cdef Py_ssize_t top = -1, q, first, i, k, pos, n, b, k_sp
    cdef double W, s, u, left, s_dl, s_sp, s_mg, v, dk, rest
    cdef long long ck_b = -1
    cdef double ck_u = INFINITY
    cdef Py_ssize_t ck_lo = 0
    cdef long long events = 0
    for q in range(nb - 1, -1, -1):
        first = seed_b[q - 1] + 1 if q > 0 else 1
        W = P[seed_b[q]] - P[first - 1]
        s = W / (seed_u[q] - seed_t[q])
        top += 1
        T[top] = seed_t[q]
        U[top] = seed_u[q]
        B[top] = seed_b[q]
        S[top] = s
        C[top] = (C[top - 1] if top > 0 else 0.0) + W * pow(s, am1)
    i = 1
    while i <= j:
        left = d[i - 1]
        if left >= R:
            break
        if left == d[i]:
            events += 1
            cnt[EV_UNFEASIBLE] += 1
        else:
            while True:
                u = U[top]
                b = B[top]
                W = P[b] - P[i - 1]
                if T[top] >= left:
                    break
                s_dl = W / (u - left) if u > left else INFINITY
                if b != ck_b or u != ck_u or i < ck_lo:
                    ck_b = b
                    ck_u = u
                    ck_lo = i
                    n = b - i
                    ck_val[n] = INFINITY
                    ck_arg[n] = -1
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
                s_mg = INFINITY
                if top >= 1 and T[top - 1] == u and u < d[b]:
                    s_mg = S[top - 1]
                if s_dl <= s_sp and s_dl <= s_mg:
                    if s_dl == INFINITY:
                        raise RuntimeError(f"squeeze stalled at i={i}, j={j}")
                    S[top] = s_dl
                    T[top] = left
                    break
                events += 1
                if s_sp <= s_mg:
                    cnt[EV_SPLIT] += 1
                    dk = d[k_sp]
                    T[top] = dk
                    S[top] = s_sp
                    C[top] = (C[top - 1] if top > 0 else 0.0) + (P[b] - P[k_sp]) * pow(s_sp, am1)
                    top += 1
                    T[top] = dk - (P[k_sp] - P[i - 1]) / s_sp
                    U[top] = dk
                    B[top] = k_sp
                    S[top] = s_sp
                    C[top] = 0.0
                else:
                    cnt[EV_MERGE] += 1
                    top -= 1
                    S[top] = s_mg
                    T[top] = U[top] - (P[B[top]] - P[i - 1]) / s_mg
            events += 1
            cnt[EV_DEADLINE] += 1
            rest = C[top - 1] if top > 0 else 0.0
            costs[i] = rest + (P[B[top]] - P[i - 1]) * pow(S[top], am1)
            if snapshots:
                snaps.append((i, [(T[q], U[q], B[q]) for q in range(top, -1, -1)]))
        if B[top] == i:
            top -= 1
        else:
            T[top] = U[top] - (P[B[top]] - P[i]) / S[top]
        i += 1
    if counts is not None:
        for q in range(4):
            counts[q] += cnt[q]
    return costs_np, events, snaps


cdef void _chain_scan(double[::1] r, double[::1] d, double[::1] P, double sstar, Py_ssize_t i,
                      Py_ssize_t m, long long[::1] cs, double[::1] ct, signed char[::1] ok) noexcept nogil:
    cdef double lo = d[i - 1]
    cdef Py_ssize_t ell = i, k
    cdef double start = fmax(r[i], lo)
    cdef double t = start, rk
    cdef bint good = True
    for k in range(i, m + 1):
        rk = fmax(r[k], lo)
        if t < rk:
            ell = k
            start = rk
            good = True
        t = start + (P[k] - P[ell - 1]) / sstar
        good = good and t <= d[k]
        cs[k] = ell
        ct[k] = t
        ok[k] = good


cdef void _prefix_scan(double[::1] r, double[::1] d, double[::1] P, double sstar, Py_ssize_t j,
                       long long[::1] h) noexcept nogil:
    cdef double R = r[j + 1]
    cdef Py_ssize_t ell = j, k
    cdef double t = fmin(d[j], R), dk
    for k in range(j, 0, -1):
        dk = fmin(d[k], R)
        if t > dk:
            ell = k
        h[k] = ell
        t = fmin(d[ell], R) - (P[ell] - P[k - 1]) / sstar


def chain_scan(double[::1] r, double[::1] d, double[::1] P, double sstar, Py_ssize_t i, Py_ssize_t m):
    cs = np.zeros(m + 2, dtype=np.int64)
    ct = np.zeros(m + 2)
    ok = np.zeros(m + 2, dtype=np.int8)
    _chain_scan(r, d, P, sstar, i, m, cs, ct, ok)
    return cs, ct, ok.astype(bool)


def prefix_scan(double[::1] r, double[::1] d, double[::1] P, double sstar, Py_ssize_t j):
    h = np.zeros(j + 2, dtype=np.int64)
    _prefix_scan(r, d, P, sstar, j, h)
    return h


def dp_fill(double[::1] r, double[::1] d, double[::1] P, double[:, ::1] Y,
            double L, double g, double sstar, double gstar):
    cdef Py_ssize_t m = P.shape[0] - 1
    O_np = np.full((m + 2, m + 2), INFINITY)
    case_np = np.full((m + 2, m + 2), -1, dtype=np.int64)
    arg_np = np.zeros((m + 2, m + 2), dtype=np.int64)
    cs_np = np.zeros((m + 2, m + 2), dtype=np.int64)
    ct_np = np.zeros((m + 2, m + 2))
    ok_np = np.zeros((m + 2, m + 2), dtype=np.int8)
    ce_np = np.zeros((m + 2, m + 2), dtype=np.int64)
    h_np = np.zeros(m + 2, dtype=np.int64)
    cdef double[:, ::1] O = O_np, CT = ct_np
    cdef long long[:, ::1] case = case_np, arg = arg_np, CS = cs_np, CE = ce_np
    cdef signed char[:, ::1] OK = ok_np
    cdef long long[::1] h = h_np
    cdef Py_ssize_t i, j, k, a, b, c, bc, ba
    cdef double R, lo, best, u, v
    with nogil:
        for i in range(1, m + 1):
            _chain_scan(r, d, P, sstar, i, m, CS[i], CT[i], OK[i])
            for k in range(i, m + 1):
                CE[i, CS[i, k]] = k
        for j in range(0, m + 1):
            R = r[j + 1]
            O[j + 1, j] = fmin(L, g * fmax(0.0, R - d[j]))
            case[j + 1, j] = 0
            if j == 0:
                continue
            _prefix_scan(r, d, P, sstar, j, h)
            for i in range(j, 0, -1):
                if Y[i, j] == INFINITY:
                    continue
                lo = d[i - 1]
                best = Y[i, j]
                bc = 1
                ba = 0
                c = h[i]
                u = fmin(d[c], R) - (P[c] - P[i - 1]) / sstar
                if u > lo:
                    v = L + gstar * (P[c] - P[i - 1]) + O[c + 1, j]
                    if v < best:
                        best = v
                        bc = 2
                        ba = c
                k = CS[i, j]
                if OK[i, j] and CT[i, j] < R:
                    v = Y[i, k - 1] + gstar * (P[j] - P[k - 1]) + L
                    if v < best:
                        best = v
                        bc = 3
                        ba = k
                a = i
                while a <= j:
                    b = CE[i, a]
                    if b >= j:
                        break
                    if OK[i, b]:
                        c = h[b + 1]
                        u = fmin(d[c], R) - (P[c] - P[b]) / sstar
                        if CT[i, b] < u:
                            v = Y[i, a - 1] + gstar * (P[c] - P[a - 1]) + L + O[c + 1, j]
                            if v < best:
                                best = v
                                bc = 4
                                ba = a
                    a = b + 1
                O[i, j] = best
                case[i, j] = bc
                arg[i, j] = ba
    return O_np, case_np, arg_np
