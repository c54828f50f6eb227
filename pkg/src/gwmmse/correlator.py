"""Correlator family: matched filter, group-weighting MMSE, and oracles.

The per-epoch path is deliberately small: wipe off the code and
integrate g chips at a time into an M-vector of partial correlations
(M = N/g), solve an M x M system for the group weights, and take the
weighted sum as the decision variable.  The full N x N despreading-code
solve is kept only as a test oracle for the g=1 equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "GroupWeights",
    "matched_filter",
    "partial_correlate",
    "solve_group_weights",
    "group_decision",
    "expand_weights",
    "optimal_despreading_code",
    "estimate_full_autocorr",
    "bit_decision",
    "empirical_mse",
]

#: Ridge floor relative to mean diagonal, and escalation schedule.
_RIDGE_SCALE = 1e-8
_RIDGE_GROWTH = 10.0
_RIDGE_ATTEMPTS = 3


@dataclass(frozen=True)
class GroupWeights:
    """Solved group weights plus how the solve went.

    Attributes
    ----------
    w : ndarray, length M
    regularized : bool
        True when the plain factorization failed and a ridge term was
        needed.
    ridge : float
        The diagonal loading that produced the returned solution
        (0.0 when unregularized).
    """

    w: np.ndarray
    regularized: bool
    ridge: float

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def matched_filter(r, s0) -> float:
    """Conventional correlation d = s0^T r.

    The unit-norm scaling of the replica is a positive constant and
    never changes decision signs, so the raw correlation is returned.
    """
    r = np.asarray(r, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    if r.shape != s0.shape:
        raise ValueError("incompatible code lengths: replica and signal differ")
    return float(s0 @ r)


def partial_correlate(r, s0, g: int) -> np.ndarray:
    """Code wipe-off and per-group integrate-and-dump in one pass.

    Splits the N chips into M = N/g groups and returns
    c_j = sum over group j of s0[i] * r[i].

    Parameters
    ----------
    r, s0 : length-N vectors
    g : int
        Group size; must divide N.
    """
    r = np.asarray(r, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    if r.shape != s0.shape:
        raise ValueError("incompatible code lengths: replica and signal differ")
    n = r.size
    if g < 1 or n % g != 0:
        raise ValueError(f"invalid group size: {g} does not divide {n}")
    return (s0 * r).reshape(n // g, g).sum(axis=1)


def _ridge_solve(r_mat: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, bool, float]:
    """SPD solve with escalating diagonal loading on failure."""
    try:
        cf = scipy.linalg.cho_factor(r_mat, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(cf, rhs, check_finite=False), False, 0.0
    except np.linalg.LinAlgError:
        pass
    m = r_mat.shape[0]
    lam = _RIDGE_SCALE * float(np.trace(r_mat)) / m
    for _ in range(_RIDGE_ATTEMPTS):
        if lam > 0:
            try:
                cf = scipy.linalg.cho_factor(
                    r_mat + lam * np.eye(m), lower=True, check_finite=False
                )
                x = scipy.linalg.cho_solve(cf, rhs, check_finite=False)
                return x, True, lam
            except np.linalg.LinAlgError:
                pass
        lam *= _RIDGE_GROWTH
    raise np.linalg.LinAlgError("unsolvable autocorrelation matrix")


def solve_group_weights(r_mat, g: int, power: float) -> GroupWeights:
    """Group-weight solve w = g * p * R^-1 1.

    Parameters
    ----------
    r_mat : M x M symmetric matrix
        Windowed autocorrelation of the partial correlations.
    g : int
        Group size (chips per group).
    power : float
        Channel power p; enters as a positive scale only.

    Returns
    -------
    GroupWeights
        Flagged as regularized when the matrix needed diagonal loading
        to factor; the returned w then satisfies
        (R + ridge*I) w = g * p * 1 instead.
    """
    r_mat = np.asarray(r_mat, dtype=np.float64)
    if r_mat.ndim != 2 or r_mat.shape[0] != r_mat.shape[1]:
        raise ValueError("autocorrelation matrix must be square")
    if g < 1:
        raise ValueError(f"invalid group size: {g}")
    if power <= 0:
        raise ValueError("channel power must be positive")
    ones = np.ones(r_mat.shape[0])
    x, regularized, lam = _ridge_solve(r_mat, ones)
    return GroupWeights(w=g * power * x, regularized=regularized, ridge=lam)


def group_decision(w, c) -> float:
    """Weighted partial-correlation sum d = w^T c."""
    w = np.asarray(w, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if w.shape != c.shape:
        raise ValueError(
            f"partial-correlation length mismatch: {c.shape} vs {w.shape}"
        )
    return float(w @ c)


def expand_weights(w, s0, g: int) -> np.ndarray:
    """Expand group weights into the modified despreading code.

    h[i] = w[i // g] * s0[i], rescaled to unit norm.  The sign of
    h^T r equals the sign of w^T c for every r, so decisions are
    unchanged by the normalization.
    """
    w = np.asarray(w, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    if w.size * g != s0.size:
        raise ValueError(
            f"invalid group size: {g} groups of {w.size} do not cover {s0.size}"
        )
    h = np.repeat(w, g) * s0
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("degenerate weight vector: cannot normalize")
    return h / norm


def optimal_despreading_code(r_full, s0, power: float) -> np.ndarray:
    """Unconstrained MMSE despreading code, h = p * R^-1 s0, unit norm.

    The O(N^3) oracle the group-weighting path is measured against;
    not used per-epoch.
    """
    r_full = np.asarray(r_full, dtype=np.float64)
    s0 = np.asarray(s0, dtype=np.float64)
    if r_full.shape != (s0.size, s0.size):
        raise ValueError("incompatible code lengths: matrix and replica differ")
    if power <= 0:
        raise ValueError("channel power must be positive")
    x, _, _ = _ridge_solve(r_full, s0)
    h = power * x
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("degenerate weight vector: cannot normalize")
    return h / norm


def estimate_full_autocorr(epochs) -> np.ndarray:
    """Sample average of r r^T over a list of received vectors."""
    vecs = [np.asarray(r, dtype=np.float64) for r in epochs]
    if len(vecs) == 0:
        raise ValueError("empty window")
    n = vecs[0].size
    acc = np.zeros((n, n))
    for r in vecs:
        if r.shape != (n,):
            raise ValueError("incompatible code lengths: mixed epoch sizes")
        acc += np.outer(r, r)
    return acc / len(vecs)


def bit_decision(epoch_decisions) -> int:
    """Sign of the 20-epoch decision sum; an exact zero resolves to +1."""
    d = np.asarray(epoch_decisions, dtype=np.float64)
    if d.shape != (20,):
        raise ValueError(
            f"bit window must span 20 epochs, got {d.size}"
        )
    return 1 if float(d.sum()) >= 0.0 else -1


def empirical_mse(decisions, power: float) -> float:
    """Sample mean of (b - d/sqrt(p))^2 over (d, true_bit) pairs."""
    if power <= 0:
        raise ValueError("channel power must be positive")
    pairs = list(decisions)
    if not pairs:
        raise ValueError("empty window")
    scale = 1.0 / np.sqrt(power)
    return float(
        np.mean([(b - d * scale) ** 2 for d, b in pairs])
    )
