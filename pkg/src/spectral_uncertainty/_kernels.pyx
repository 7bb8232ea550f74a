# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must match ``_fallback`` exactly."""

from libc.math cimport fabs, sqrt

import numpy as np


cdef extern from *:
    int __builtin_ctzll(unsigned long long)


def jacobi_sweeps(double[:, ::1] a, double[:, ::1] vt, double tol, int max_sweeps):
    """Cyclic Jacobi on symmetric ``a`` in place; rotations accumulate in rows of ``vt``.

    Returns the number of sweeps performed, or -1 if ``max_sweeps`` ran out.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, apq, theta, t, c, s, x, y

    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                    a[k, p] = a[p, k]
                    a[k, q] = a[q, k]
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = vt[p, k]
                    y = vt[q, k]
                    vt[p, k] = c * x - s * y
                    vt[q, k] = s * x + c * y
    return -1


def inf_to_one_exact(double[:, ::1] at):
    """max over sign vectors e of sum_i |(A e)_i|, given the transpose ``at`` of A.

    e_0 is pinned to +1 (e and -e give the same value); the rest follow a Gray
    code so each step flips one column. Partial sums are rebuilt every 4096 steps.
    """
    cdef Py_ssize_t n = at.shape[0]
    cdef Py_ssize_t i, j, k
    cdef unsigned long long step, total
    cdef double best, acc, e
    cdef double[::1] y
    cdef double[::1] eps

    if n == 0:
        return 0.0
    y = np.zeros(n)
    eps = np.ones(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += at[j, i]
        y[i] = acc
    best = 0.0
    for i in range(n):
        best += fabs(y[i])
    total = 1ULL << (n - 1)
    for step in range(1, total):
        j = __builtin_ctzll(step) + 1
        e = eps[j]
        eps[j] = -e
        if step % 4096 == 0:
            for i in range(n):
                acc = 0.0
                for k in range(n):
                    acc += at[k, i] * eps[k]
                y[i] = acc
        else:
            for i in range(n):
                y[i] -= 2.0 * e * at[j, i]
        acc = 0.0
        for i in range(n):
            acc += fabs(y[i])
        if acc > best:
            best = acc
    return best


cdef long long _pairs_below(double[::1] g, double c):
    cdef Py_ssize_t m = g.shape[0]
    cdef Py_ssize_t j
    cdef Py_ssize_t k = m - 1
    cdef long long count = 0
    for j in range(m):
        while k >= 0 and g[k] >= c - g[j]:
            k -= 1
        if k < 0:
            break
        count += k + 1
    return count


def sublevel_count(double[::1] g, double c, int n):
    """Number of index tuples (i_1..i_n) with g[i_1] + ... + g[i_n] < c.

    ``g`` must be sorted ascending; n is 1, 2 or 3.
    """
    cdef Py_ssize_t m = g.shape[0]
    cdef Py_ssize_t i, lo, hi, mid
    cdef long long count = 0
    if n == 1:
        lo = 0
        hi = m
        while lo < hi:
            mid = (lo + hi) // 2
            if g[mid] < c:
                lo = mid + 1
            else:
                hi = mid
        return lo
    if n == 2:
        return _pairs_below(g, c)
    if n == 3:
        for i in range(m):
            if g[i] + 2.0 * g[0] >= c:
                break
            count += _pairs_below(g, c - g[i])
        return count
    raise ValueError("sublevel_count supports n in {1, 2, 3}")
