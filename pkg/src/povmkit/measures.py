"""Disturbance, measurement strength and orthogonality of a POVM.

``D``, ``R`` and ``O`` are tied together by ``D = 2d(R+1) - d^2 - n + O``;
:func:`decomposition_residual` evaluates the left side minus the right side.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DimMismatch, InvalidRange
from .linalg import OperatorBasis, standard_hermitian_basis
from .povm import POVM, check_state, gram_sqrt, luders_update


# ---------------------------------------------------------------------------
# information of a state
# ---------------------------------------------------------------------------


def _state_eigenvalues(rho):
    rho = check_state(rho)
    w = np.linalg.eigvalsh(rho)
    # roundoff eigenvalues of a rank-deficient state would add ~1e-8 through sqrt
    w[w <= _kernels.SQRT_RTOL * np.abs(w).max()] = 0.0
    return w, rho.shape[0]


def skew_information(rho) -> float:
    """Total Wigner-Yanase skew information ``d - (tr sqrt rho)^2``."""
    w, d = _state_eigenvalues(rho)
    return float(d - np.sum(np.sqrt(w)) ** 2)


def brukner_zeilinger_information(rho) -> float:
    """``tr rho^2 - 1/d``."""
    w, d = _state_eigenvalues(rho)
    return float(np.sum(w * w) - 1.0 / d)


# ---------------------------------------------------------------------------
# POVM measures
# ---------------------------------------------------------------------------


def _sqrt_traces(p: POVM) -> np.ndarray:
    return np.trace(p.sqrt_effects, axis1=1, axis2=2).real


def measurement_strength(p: POVM) -> float:
    """``R = d - (1/d) sum_i (tr sqrt E_i)^2``, between 0 and d-1."""
    t = _sqrt_traces(p)
    return float(p.dim - np.sum(t * t) / p.dim)


def expected_skew_gain(rho, p: POVM) -> float:
    """Expected skew-information gain ``sum_i p_i I(rho_i) - I(rho)``.

    Outcomes with probability at or below ``prob_floor`` contribute nothing.
    """
    rho = check_state(rho, p.dim, p.tol)
    probs = np.einsum("iab,ba->i", p.effects, rho).real
    gain = 0.0
    for i, pi in enumerate(probs):
        if pi <= p.tol.prob_floor:
            continue
        gain += pi * skew_information(luders_update(p, rho, i))
    return float(gain - skew_information(rho))


def orthogonality_closed(p: POVM, S: np.ndarray | None = None) -> float:
    """``sum_lm tr^2(sqrt E_l sqrt E_m) - 2d + n``."""
    S = gram_sqrt(p) if S is None else S
    return float(np.sum(S * S) - 2 * p.dim + p.n)


def orthogonality(p: POVM, check: bool = True) -> float:
    """Squared Frobenius distance of the sqrt-effect Gram matrix from the identity.

    With ``check`` set, the value is cross-checked against the expanded closed
    form and an ``ArithmeticError`` is raised if the two disagree beyond 1e-10.
    """
    S = gram_sqrt(p)
    M = S - np.eye(p.n)
    value = float(np.sum(M * M))
    if check:
        other = orthogonality_closed(p, S)
        if abs(other - value) > 1e-10 * max(1.0, abs(value)):
            raise ArithmeticError(f"orthogonality routes disagree: {value!r} vs {other!r}")
    return value


@dataclass(frozen=True)
class Superoperator:
    """Matrix of the Lüders channel in an orthonormal Hermitian basis."""

    basis: OperatorBasis
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    def apply(self, v):
        return self.matrix @ np.asarray(v, dtype=float)


def luders_superoperator(p: POVM, basis: OperatorBasis | None = None) -> Superoperator:
    """``[E]_ij = sum_l tr(X_i sqrt E_l X_j sqrt E_l)``."""
    basis = standard_hermitian_basis(p.dim) if basis is None else basis
    if basis.dim != p.dim:
        raise DimMismatch(f"basis dimension {basis.dim} differs from POVM dimension {p.dim}")
    M = _kernels.superoperator(p.sqrt_effects, np.ascontiguousarray(basis.elements))
    return Superoperator(basis, M)


def disturbance_closed(p: POVM) -> float:
    S = gram_sqrt(p)
    t = _sqrt_traces(p)
    return float(np.sum(S * S) - 2 * np.sum(t * t) + p.dim**2)


def disturbance_superoperator(p: POVM, basis: OperatorBasis | None = None) -> float:
    M = luders_superoperator(p, basis).matrix
    M = M - np.eye(M.shape[0])
    return float(np.sum(M * M))


def disturbance(p: POVM, method: str = "closed") -> float:
    """Intrinsic disturbance ``||[E] - [I]||_F^2``.

    ``method="closed"`` uses traces of products of the effect square roots;
    ``method="superoperator"`` builds the d^2 x d^2 channel matrix.
    """
    if method == "closed":
        return disturbance_closed(p)
    if method == "superoperator":
        return disturbance_superoperator(p)
    raise ValueError(f"unknown method {method!r}")


def state_disturbance(rho, p: POVM) -> float:
    """``tr(E(rho) - rho)^2`` for the Lüders channel ``E``."""
    rho = check_state(rho, p.dim, p.tol)
    R = p.sqrt_effects
    out = np.einsum("iab,bc,icd->ad", R, rho, R) - rho
    return float(np.vdot(out, out).real)


def decomposition_residual(p: POVM) -> float:
    d, n = p.dim, p.n
    D = disturbance_closed(p)
    R = measurement_strength(p)
    O = orthogonality(p, check=False)
    return D - (2 * d * (R + 1) - d * d - n + O)


@dataclass(frozen=True)
class MeasureReport:
    d: int
    n: int
    R: float
    O: float
    D: float
    D_superop: float
    residual: float
    gram_spectrum: np.ndarray = field(repr=False)

    CSV_FIELDS = ("d", "n", "R", "O", "D", "residual")

    def as_dict(self):
        return {
            "d": self.d,
            "n": self.n,
            "R": self.R,
            "O": self.O,
            "D": self.D,
            "D_superop": self.D_superop,
            "residual": self.residual,
            "gram_spectrum": [float(x) for x in self.gram_spectrum],
        }

    def csv_row(self):
        return [getattr(self, k) for k in self.CSV_FIELDS]


def measure_report(p: POVM) -> MeasureReport:
    S = gram_sqrt(p)
    spectrum = np.sort(np.linalg.eigvalsh(S))[::-1]
    return MeasureReport(
        d=p.dim,
        n=p.n,
        R=measurement_strength(p),
        O=orthogonality(p),
        D=disturbance_closed(p),
        D_superop=disturbance_superoperator(p),
        residual=decomposition_residual(p),
        gram_spectrum=spectrum,
    )


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

REFERENCE_KINDS = (
    "vn",
    "ea",
    "sic",
    "two_design_O",
    "reflected_sic_O",
    "reflected_sic_D",
    "ea_bound",
    "block_R",
    "block_O",
    "block_D",
)


def _need(cond, msg):
    if not cond:
        raise InvalidRange(msg)


def closed_form_fraction(kind: str, d: int, n: int | None = None) -> Fraction:
    """Exact rational value of a reference formula.

    ``vn``: D of a nondegenerate projective measurement. ``ea``: D of an
    n-outcome EA-POVM. ``sic``: D of a SIC. ``two_design_O``: O of an
    n-outcome 2-design. ``reflected_sic_O``/``reflected_sic_D``: O and D of a
    reflected SIC. ``ea_bound``: O of an n-outcome EA-POVM, the lower bound on
    O for d <= n <= d^2. ``block_*``: R, O, D of the block projective
    construction with n < d.
    """
    d = int(d)
    _need(d >= 1, f"d must be positive, got {d}")
    if kind == "vn":
        return Fraction(d * d - d)
    if kind == "sic":
        _need(d >= 2, "sic needs d >= 2")
        return Fraction(d * d * (d - 1), d + 1)
    if kind == "reflected_sic_O":
        _need(d >= 2, "reflected SIC needs d >= 2")
        return Fraction(2 * d**4 - 4 * d**3 - d * d + 4 * d, d * d - 1)
    if kind == "reflected_sic_D":
        _need(d >= 2, "reflected SIC needs d >= 2")
        return Fraction(d * d, d * d - 1)
    _need(n is not None, f"{kind} needs n")
    n = int(n)
    if kind in ("ea", "ea_bound"):
        _need(d >= 2 and d <= n <= d * d, f"{kind} needs d >= 2 and d <= n <= d^2, got d={d}, n={n}")
        if kind == "ea":
            return Fraction(n * (d - 1) ** 2, n - 1)
        return Fraction((n - d) ** 2, n - 1)
    if kind == "two_design_O":
        _need(n >= d * d, f"two_design_O needs n >= d^2, got d={d}, n={n}")
        return Fraction(2 * d, d + 1) - 2 * d + n
    if kind in ("block_R", "block_O", "block_D"):
        _need(1 <= n < d, f"{kind} needs 1 <= n < d, got d={d}, n={n}")
        a, b = divmod(d, n)
        if kind == "block_R":
            return Fraction(a * (d + b) * (n - 1), d)
        if kind == "block_O":
            return Fraction((a - 1) * (d + b) - n * (a - 1) + b * b)
        return Fraction(d * (a * n - b - a) + b * (a * n - a + d))
    raise ValueError(f"unknown reference kind {kind!r}; expected one of {REFERENCE_KINDS}")


def closed_form_reference(kind: str, d: int, n: int | None = None) -> float:
    return float(closed_form_fraction(kind, d, n))


def family_row(family: str, d: int, n: int) -> dict:
    """(R, O, D) for one member of a closed-form family, as used by ``scan``."""
    if family == "ea":
        R = Fraction(d - 1)
        O = closed_form_fraction("ea_bound", d, n)
        D = closed_form_fraction("ea", d, n)
    elif family == "two_design_O":
        R = Fraction(d - 1)
        O = closed_form_fraction("two_design_O", d, n)
        D = 2 * d * (R + 1) - d * d - n + O
    elif family == "block":
        R = closed_form_fraction("block_R", d, n)
        O = closed_form_fraction("block_O", d, n)
        D = closed_form_fraction("block_D", d, n)
    else:
        raise ValueError(f"unknown family {family!r}")
    return {"d": d, "n": n, "R": float(R), "O": float(O), "D": float(D)}
