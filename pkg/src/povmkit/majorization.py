"""Majorization tools and the orthogonality lower bounds built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRange, LengthMismatch, SpanTooSmall, ZeroOperator
from .linalg import check_psd, psd_sqrt
from .povm import POVM, gram_sqrt, span_dim

WEAK_TOL = 1e-12
SUM_TOL = 1e-10
NORMS = ("frobenius", "trace", "spectral")


def descending(x) -> np.ndarray:
    """Sorted non-increasing copy of ``x`` as a float array."""
    return np.sort(np.asarray(x, dtype=float).ravel())[::-1]


def majorization_margin(x, y) -> float:
    """Smallest partial-sum gap ``min_k sum_{i<=k} (x - y)`` of the sorted vectors."""
    x = descending(x)
    y = descending(y)
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths {x.size} and {y.size} differ")
    return float(np.min(np.cumsum(x) - np.cumsum(y)))


def majorization_compare(x, y, mode: str = "strong", tol: float = WEAK_TOL, sum_tol: float = SUM_TOL) -> bool:
    """Does ``x`` (weakly) majorize ``y``?

    ``mode="weak"`` checks every partial sum of the descending sort of ``x``
    against that of ``y``; ``mode="strong"`` also requires equal totals.
    """
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
    if majorization_margin(x, y) < -tol:
        return False
    if mode == "strong":
        return abs(float(np.sum(x)) - float(np.sum(y))) <= sum_tol
    return True


def ea_gram_spectrum(d: int, n: int) -> np.ndarray:
    """Eigenvalues ``(1, (d-1)/(n-1), ...)`` of the Gram matrix of an n-outcome EA-POVM."""
    if not (1 <= d <= n):
        raise InvalidRange(f"EA spectrum needs 1 <= d <= n, got d={d}, n={n}")
    if n == 1:
        return np.ones(1)
    out = np.full(n, (d - 1) / (n - 1))
    out[0] = 1.0
    return out


def sqrt_overlap_gap(A, B) -> float:
    """``tr(sqrt A sqrt B) - tr(AB)/sqrt(trA trB)``; nonnegative for PSD inputs."""
    A = check_psd(A)
    B = check_psd(B)
    ta, tb = np.trace(A).real, np.trace(B).real
    if ta <= 0 or tb <= 0:
        raise ZeroOperator("both operators must be nonzero")
    lhs = np.vdot(psd_sqrt(B), psd_sqrt(A)).real
    rhs = np.vdot(B, A).real / np.sqrt(ta * tb)
    return float(lhs - rhs)


def _norm(s, which):
    if which == "frobenius":
        return float(np.sqrt(np.sum(s * s)))
    if which == "trace":
        return float(np.sum(s))
    if which == "spectral":
        return float(np.max(s))
    raise ValueError(f"unknown norm {which!r}; expected one of {NORMS}")


@dataclass(frozen=True)
class EaNormComparison:
    gamma: float
    norm: str
    ea_value: float
    povm_value: float
    holds: bool
    witness_margin: float
    witness_holds: bool

    def as_dict(self):
        return dict(self.__dict__)


def ea_norm_comparison(p: POVM, gamma: float = 1.0, norm: str = "frobenius", S=None) -> EaNormComparison:
    """Compare ``||S - gamma 1||`` of ``p`` against the EA value for the same (d, n).

    The EA side is analytic: its singular values are ``|lambda - gamma|`` over
    :func:`ea_gram_spectrum`. Also reports the weak-majorization witness
    ``s(gamma 1 - S) >_w s(gamma 1 - S_EA)`` as its smallest partial-sum margin.
    """
    if p.n < p.dim:
        raise InvalidRange(f"EA comparison needs n >= d, got d={p.dim}, n={p.n}")
    S = gram_sqrt(p) if S is None else S
    s_p = np.abs(gamma - np.linalg.eigvalsh(S))
    s_ea = np.abs(gamma - ea_gram_spectrum(p.dim, p.n))
    ea_value = _norm(s_ea, norm)
    povm_value = _norm(s_p, norm)
    margin = majorization_margin(s_p, s_ea)
    return EaNormComparison(
        gamma=float(gamma),
        norm=norm,
        ea_value=ea_value,
        povm_value=povm_value,
        holds=ea_value <= povm_value + 1e-10,
        witness_margin=margin,
        witness_holds=margin >= -WEAK_TOL,
    )


def ea_orthogonality_bound(d: int, n: int) -> float:
    """``(n-d)^2/(n-1)``, the orthogonality of an n-outcome EA-POVM."""
    if n == 1:
        return 0.0
    return (n - d) ** 2 / (n - 1)


@dataclass(frozen=True)
class SpanBound:
    d: int
    n: int
    span_dim: int
    orthogonality: float
    bound: float
    margin: float

    def as_dict(self):
        return dict(self.__dict__)


def span_bound_check(p: POVM) -> SpanBound:
    """``O >= O_EA(r) + n - r`` where ``r`` is the span dimension of the sqrt effects."""
    r = span_dim(p)
    if r < p.dim:
        raise SpanTooSmall(f"span dimension {r} is below d={p.dim}")
    S = gram_sqrt(p)
    M = S - np.eye(p.n)
    O = float(np.sum(M * M))
    bound = ea_orthogonality_bound(p.dim, r) + p.n - r
    return SpanBound(p.dim, p.n, r, O, bound, O - bound)
