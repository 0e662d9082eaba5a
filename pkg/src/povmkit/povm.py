"""POVM data model, Born rule and Lüders updating."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .config import DEFAULT, Tolerances
from .errors import (
    CompletenessViolation,
    DimMismatch,
    NotAState,
    NotHermitian,
    NotPSD,
    ZeroEffect,
    ZeroProbabilityOutcome,
)
from .linalg import check_hermitian, check_psd


@dataclass(frozen=True)
class Effect:
    """One POVM element ``E = e * Pi`` with weight ``e = tr E``."""

    operator: np.ndarray
    weight: float
    normalized: np.ndarray


class POVM:
    """A validated, immutable list of effects summing to the identity.

    Parameters
    ----------
    operators : sequence of (d, d) array_like
        The effects. Each must be Hermitian and positive semidefinite.
    tol : Tolerances
        Validation tolerances.
    allow_zero_effects : bool
        Accept effects whose trace is below ``tol.zero_effect_tol``.

    The square roots of the effects are computed once here and cached, since
    every measure in the library consumes them.
    """

    def __init__(self, operators, tol: Tolerances = DEFAULT, allow_zero_effects: bool = False):
        ops = [np.asarray(E, dtype=np.complex128) for E in operators]
        if not ops:
            raise ValueError("a POVM needs at least one effect")
        d = ops[0].shape[0] if ops[0].ndim == 2 else -1
        for i, E in enumerate(ops):
            if E.shape != (d, d):
                raise DimMismatch(f"effect {i} has shape {E.shape}, expected {(d, d)}")
        effects = np.empty((len(ops), d, d), dtype=np.complex128)
        for i, E in enumerate(ops):
            try:
                effects[i] = check_psd(E, tol)
            except NotPSD as exc:
                raise NotPSD(f"effect {i}: {exc}", index=i) from None
            except NotHermitian as exc:
                raise NotHermitian(f"effect {i}: {exc}") from None

        resid = float(np.linalg.norm(effects.sum(axis=0) - np.eye(d)))
        if resid > tol.completeness_tol:
            raise CompletenessViolation(
                f"effects sum to the identity only up to {resid:.3e} (Frobenius)", residual=resid
            )

        weights = np.trace(effects, axis1=1, axis2=2).real.copy()
        if not allow_zero_effects:
            small = np.flatnonzero(weights <= tol.zero_effect_tol)
            if small.size:
                i = int(small[0])
                raise ZeroEffect(f"effect {i} has trace {weights[i]:.3e}", index=i)

        roots, _ = _kernels.sqrt_psd(effects)
        for arr in (effects, weights, roots):
            arr.setflags(write=False)
        self._effects = effects
        self._weights = weights
        self._roots = roots
        self.tol = tol

    @property
    def dim(self) -> int:
        return self._effects.shape[1]

    @property
    def n(self) -> int:
        return self._effects.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, i) -> Effect:
        e = float(self._weights[i])
        Pi = self._effects[i] / e if e > 0 else np.zeros_like(self._effects[i])
        return Effect(self._effects[i], e, Pi)

    def __iter__(self):
        return (self[i] for i in range(self.n))

    def __repr__(self):
        return f"POVM(dim={self.dim}, n={self.n})"

    @property
    def effects(self) -> np.ndarray:
        """Stack of effects, shape ``(n, d, d)``."""
        return self._effects

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def normalized(self) -> np.ndarray:
        """Unit-trace parts ``Pi_i`` (zero for zero effects)."""
        w = np.where(self._weights > 0, self._weights, 1.0)
        return self._effects / w[:, None, None]

    @property
    def sqrt_effects(self) -> np.ndarray:
        return self._roots


def new_povm(operators, tol: Tolerances = DEFAULT, allow_zero_effects: bool = False) -> POVM:
    return POVM(operators, tol=tol, allow_zero_effects=allow_zero_effects)


def gram_sqrt(p: POVM) -> np.ndarray:
    """Gram matrix ``S_ij = tr(sqrt(E_i) sqrt(E_j))`` (real, symmetric, n x n)."""
    return _kernels.gram(p.sqrt_effects)


def span_dim(p: POVM, rtol: float | None = None) -> int:
    """Dimension of the real span of the effect square roots."""
    rtol = p.tol.rank_rtol if rtol is None else rtol
    M = p.sqrt_effects.reshape(p.n, -1)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


@dataclass(frozen=True)
class Classification:
    is_rank_one: bool
    is_unbiased: bool
    is_projective: bool
    is_equiangular: bool
    is_ic: bool
    span_dim: int

    def as_dict(self):
        return {
            "is_rank_one": self.is_rank_one,
            "is_unbiased": self.is_unbiased,
            "is_projective": self.is_projective,
            "is_equiangular": self.is_equiangular,
            "is_ic": self.is_ic,
            "span_dim": self.span_dim,
        }


def classify(p: POVM, tol: float | None = None) -> Classification:
    tol = p.tol.classify_tol if tol is None else tol
    E = p.effects
    Pi = p.normalized
    w = np.linalg.eigvalsh(Pi)
    is_rank_one = bool(np.all(np.sum(w > tol, axis=1) == 1))
    is_unbiased = bool(np.ptp(p.weights) <= tol)

    overlaps = np.einsum("iab,jba->ij", Pi, Pi).real
    off = overlaps[~np.eye(p.n, dtype=bool)]
    is_equiangular = is_rank_one and is_unbiased and (off.size == 0 or bool(np.ptp(off) <= tol))

    idempotent = all(np.max(np.abs(Ei @ Ei - Ei)) <= tol for Ei in E)
    cross = np.einsum("iab,jba->ij", E, E).real
    cross_off = cross[~np.eye(p.n, dtype=bool)]
    is_projective = idempotent and (cross_off.size == 0 or bool(np.max(np.abs(cross_off)) <= tol))

    r = span_dim(p)
    return Classification(
        is_rank_one=is_rank_one,
        is_unbiased=is_unbiased,
        is_projective=bool(is_projective),
        is_equiangular=bool(is_equiangular),
        is_ic=r == p.dim**2,
        span_dim=r,
    )


def check_state(rho, d: int | None = None, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD, unit trace."""
    try:
        rho = check_psd(rho, tol)
    except (NotHermitian, NotPSD) as exc:
        raise NotAState(str(exc)) from None
    if d is not None and rho.shape != (d, d):
        raise DimMismatch(f"state has shape {rho.shape}, POVM acts on dimension {d}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-10:
        raise NotAState(f"state has trace {tr!r}")
    return rho


def born_probabilities(p: POVM, rho) -> np.ndarray:
    """Outcome probabilities ``p_i = tr(E_i rho)``, clipped at zero."""
    rho = check_state(rho, p.dim, p.tol)
    probs = np.einsum("iab,ba->i", p.effects, rho).real
    if np.any(probs < -p.tol.psd_tol):
        raise NotAState(f"negative outcome probability {probs.min():.3e}")
    return np.clip(probs, 0.0, None)


def luders_update(p: POVM, rho, i: int) -> np.ndarray:
    """Post-measurement state ``sqrt(E_i) rho sqrt(E_i) / p_i`` for outcome ``i``."""
    rho = check_state(rho, p.dim, p.tol)
    R = p.sqrt_effects[i]
    out = R @ rho @ R
    prob = np.trace(out).real
    if prob <= p.tol.prob_floor:
        raise ZeroProbabilityOutcome(f"outcome {i} has probability {prob:.3e}")
    out = out / prob
    return 0.5 * (out + out.conj().T)


def luders_channel_apply(p: POVM, rho) -> np.ndarray:
    """Expected post-measurement state ``sum_i sqrt(E_i) rho sqrt(E_i)``."""
    rho = check_state(rho, p.dim, p.tol)
    R = p.sqrt_effects
    out = np.einsum("iab,bc,icd->ad", R, rho, R)
    return 0.5 * (out + out.conj().T)
