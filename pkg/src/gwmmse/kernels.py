"""Compiled per-epoch loop for the group-weighting MMSE detector.

The Monte-Carlo harness pushes tens of millions of epochs through the
window-update / solve / decide cycle, so this path is JIT-compiled.
The semantics mirror the plain-numpy building blocks exactly: FIFO
rank-two window update, SPD solve of w = g p R^-1 1 with escalating
ridge fallback, uniform (matched-filter) weights during warm-up, and a
decision d = w^T c per epoch.

Kernels are compiled with ``nogil`` so sweep points can run on worker
threads; each call owns all of its state.
"""

from __future__ import annotations

import numba
import numpy as np

__all__ = ["chol_solve_ridge", "run_epochs"]

#: Relative pivot tolerance below which a factorization counts as failed.
_PIVOT_RTOL = 1e-10


@numba.njit(cache=True, nogil=True)
def chol_solve_ridge(r_mat, rhs, lam0):
    """Solve (R + lam I) x = rhs by Cholesky with ridge escalation.

    Tries the plain matrix first, then three diagonal loadings
    (lam0, 10 lam0, 100 lam0).  A pivot at or below the relative
    tolerance counts as a failed factorization.

    Returns
    -------
    (x, ok, lam) : (ndarray, bool, float)
        ``lam`` is the loading that produced ``x`` (0.0 when the plain
        solve succeeded); ``ok`` is False when every attempt failed,
        in which case ``x`` is zeros.
    """
    m = r_mat.shape[0]
    diag_max = 0.0
    for i in range(m):
        if r_mat[i, i] > diag_max:
            diag_max = r_mat[i, i]
    tol = _PIVOT_RTOL * diag_max

    lam = 0.0
    nxt = lam0
    for _attempt in range(4):
        a = r_mat.copy()
        if lam > 0.0:
            for i in range(m):
                a[i, i] += lam
        chol = np.zeros((m, m))
        ok = True
        for i in range(m):
            s = a[i, i]
            for k in range(i):
                s -= chol[i, k] * chol[i, k]
            if s <= tol:
                ok = False
                break
            chol[i, i] = np.sqrt(s)
            for j in range(i + 1, m):
                t = a[j, i]
                for k in range(i):
                    t -= chol[j, k] * chol[i, k]
                chol[j, i] = t / chol[i, i]
        if ok:
            y = np.zeros(m)
            for i in range(m):
                t = rhs[i]
                for k in range(i):
                    t -= chol[i, k] * y[k]
                y[i] = t / chol[i, i]
            x = np.zeros(m)
            for i in range(m - 1, -1, -1):
                t = y[i]
                for k in range(i + 1, m):
                    t -= chol[k, i] * x[k]
                x[i] = t / chol[i, i]
            return x, True, lam
        lam = nxt
        nxt *= 10.0
        if lam <= 0.0:
            # zero-trace input: loading cannot help
            break
    return np.zeros(m), False, lam


@numba.njit(cache=True, nogil=True)
def run_epochs(c_stream, window_len, g, power, stride):
    """Run the MMSE pipeline over a precomputed partial-correlation stream.

    Parameters
    ----------
    c_stream : (n_epochs, M) float64 array
        One partial-correlation vector per epoch.
    window_len : int
        Autocorrelation window length L.
    g : int
        Group size (enters the weight scale only).
    power : float
        Channel power p.
    stride : int
        Solve cadence: recompute weights every ``stride`` ready epochs.

    Returns
    -------
    (d, n_regularized, n_failed) : (ndarray, int, int)
        Per-epoch decision variables; counts of solves that needed
        ridge loading and of solves where every attempt failed (the
        previous weights are kept in that case).
    """
    n_epochs, m = c_stream.shape
    r_mat = np.zeros((m, m))
    buf = np.zeros((window_len, m))
    ones = np.ones(m)
    w = ones.copy()  # uniform warm-up weights = matched filter
    d = np.zeros(n_epochs)
    fill = 0
    nxt = 0
    since_solve = 0
    n_regularized = 0
    n_failed = 0

    for e in range(n_epochs):
        c = c_stream[e]
        if fill < window_len:
            # window still filling: accumulate the running sum
            buf[nxt] = c
            for i in range(m):
                for j in range(m):
                    r_mat[i, j] += c[i] * c[j]
            fill += 1
            nxt += 1
            if nxt == window_len:
                nxt = 0
            if fill == window_len:
                for i in range(m):
                    for j in range(m):
                        r_mat[i, j] /= window_len
        else:
            old = buf[nxt]
            for i in range(m):
                for j in range(m):
                    r_mat[i, j] += (c[i] * c[j] - old[i] * old[j]) / window_len
            buf[nxt] = c
            nxt += 1
            if nxt == window_len:
                nxt = 0

        if fill == window_len:
            if since_solve % stride == 0:
                tr = 0.0
                for i in range(m):
                    tr += r_mat[i, i]
                x, ok, lam = chol_solve_ridge(r_mat, ones, 1e-8 * tr / m)
                if ok:
                    w = x * (g * power)
                    if lam > 0.0:
                        n_regularized += 1
                else:
                    n_failed += 1
            since_solve += 1
            acc = 0.0
            for i in range(m):
                acc += w[i] * c[i]
            d[e] = acc
        else:
            acc = 0.0
            for i in range(m):
                acc += c[i]
            d[e] = acc

    return d, n_regularized, n_failed
