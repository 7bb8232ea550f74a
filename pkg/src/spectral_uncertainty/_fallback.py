"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

_SIGN_CHUNK = 1 << 14


def jacobi_sweeps(a, vt, tol, max_sweeps):
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        if np.sqrt(2.0 * np.sum(a[iu] ** 2)) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                x = a[p].copy()
                y = a[q].copy()
                a[p] = c * x - s * y
                a[q] = s * x + c * y
                a[:, p] = a[p]
                a[:, q] = a[q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                x = vt[p].copy()
                y = vt[q].copy()
                vt[p] = c * x - s * y
                vt[q] = s * x + c * y
    return -1


def inf_to_one_exact(at):
    n = at.shape[0]
    if n == 0:
        return 0.0
    a = at.T
    total = 1 << (n - 1)
    shifts = np.arange(n - 1, dtype=np.int64)
    best = 0.0
    for start in range(0, total, _SIGN_CHUNK):
        idx = np.arange(start, min(start + _SIGN_CHUNK, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        eps = np.ones((idx.size, n))
        eps[:, 1:] -= 2.0 * bits
        best = max(best, float(np.abs(eps @ a.T).sum(axis=1).max()))
    return best


def sublevel_count(g, c, n):
    if n == 1:
        return int(np.searchsorted(g, c, side="left"))
    if n == 2:
        return int(np.searchsorted(g, c - g, side="left").sum())
    if n == 3:
        count = 0
        for gi in g:
            if gi + 2.0 * g[0] >= c:
                break
            count += int(np.searchsorted(g, (c - gi) - g, side="left").sum())
        return count
    raise ValueError("sublevel_count supports n in {1, 2, 3}")
