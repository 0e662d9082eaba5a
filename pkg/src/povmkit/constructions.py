"""Factories for named POVM families and random POVMs.

Weyl-Heisenberg convention: ``X|j> = |j+1 mod d>``, ``Z|j> = w^j |j>`` with
``w = exp(2 pi i / d)``, and displacement operators
``D_pq = tau^(p q) X^p Z^q`` with ``tau = -exp(i pi / d)``. Only the overlaps
``|<psi|D_pq|psi>|^2`` are ever consumed, and those do not depend on the phase
convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    InvalidRange,
    NotAFiducial,
    NotASIC,
    NotOrthogonal,
    NotOrthonormal,
    SingularTotal,
    UnsupportedDimension,
)
from .povm import POVM, classify
from . import _kernels

NAMED = ("trine", "tetrahedron_sic", "mub_complete", "hesse_sic")


def _is_prime(d: int) -> bool:
    return d >= 2 and all(d % q for q in range(2, int(d**0.5) + 1))


def projective_from_basis(vectors, tol: Tolerances = DEFAULT) -> POVM:
    """Rank-1 projective measurement onto the given orthonormal vectors.

    ``vectors`` is a sequence of ``d`` complex ``d``-vectors (or the columns of a
    ``d x d`` unitary passed as a list of rows of its transpose).
    """
    V = np.array([np.asarray(v, dtype=np.complex128) for v in vectors])
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise NotOrthonormal(f"need d vectors of length d, got array of shape {V.shape}")
    dev = np.max(np.abs(V.conj() @ V.T - np.eye(V.shape[0])))
    if dev > 1e-10:
        raise NotOrthonormal(f"vectors are not orthonormal (max deviation {dev:.3e})")
    return POVM([np.outer(v, v.conj()) for v in V], tol=tol)


def computational_basis(d: int, tol: Tolerances = DEFAULT) -> POVM:
    return projective_from_basis(np.eye(d), tol=tol)


def fourier_basis(d: int) -> np.ndarray:
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def degenerate_projective(projectors, tol: Tolerances = DEFAULT) -> POVM:
    """Projective measurement onto (possibly higher-rank) orthogonal subspaces."""
    P = np.array([np.asarray(E, dtype=np.complex128) for E in projectors])
    for i, Pi in enumerate(P):
        if np.max(np.abs(Pi @ Pi - Pi)) > 1e-10:
            raise NotOrthogonal(f"operator {i} is not a projector")
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            if np.max(np.abs(P[i] @ P[j])) > 1e-10:
                raise NotOrthogonal(f"projectors {i} and {j} overlap")
    return POVM(P, tol=tol)


def _rank_one_povm(states, weight, tol):
    return POVM([weight * np.outer(v, v.conj()) for v in states], tol=tol)


def trine(tol: Tolerances = DEFAULT) -> POVM:
    """Three qubit states 120 degrees apart on a great circle, weights 2/3."""
    states = [np.array([np.cos(t / 2), np.sin(t / 2)]) for t in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
    return _rank_one_povm(states, 2.0 / 3.0, tol)


# ---------------------------------------------------------------------------
# Weyl-Heisenberg orbits
# ---------------------------------------------------------------------------


def shift_clock(d: int):
    X = np.roll(np.eye(d), 1, axis=0).astype(np.complex128)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return X, Z


def displacement(d: int, p: int, q: int) -> np.ndarray:
    X, Z = shift_clock(d)
    tau = -np.exp(1j * np.pi / d)
    return tau ** (p * q) * np.linalg.matrix_power(X, p) @ np.linalg.matrix_power(Z, q)


@dataclass(frozen=True)
class Fiducial:
    dim: int
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=np.complex128)
        if v.shape != (self.dim,):
            raise ValueError(f"fiducial vector must have length {self.dim}")
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise ValueError("fiducial vector must be unit norm")
        object.__setattr__(self, "vector", v)

    @classmethod
    def normalized(cls, vector):
        v = np.asarray(vector, dtype=np.complex128)
        return cls(v.shape[0], v / np.linalg.norm(v))

    def orbit(self) -> np.ndarray:
        d = self.dim
        return np.array([displacement(d, p, q) @ self.vector for p in range(d) for q in range(d)])

    def sic_deviation(self) -> float:
        """Largest ``| |<psi|D_pq|psi>|^2 - 1/(d+1) |`` over nontrivial ``(p, q)``."""
        d = self.dim
        dev = 0.0
        for p in range(d):
            for q in range(d):
                if p == q == 0:
                    continue
                ov = abs(np.vdot(self.vector, displacement(d, p, q) @ self.vector)) ** 2
                dev = max(dev, abs(ov - 1.0 / (d + 1)))
        return dev


def builtin_fiducial(d: int) -> Fiducial:
    if d == 2:
        # Bloch vector (1, 1, 1)/sqrt(3)
        theta = np.arccos(1 / np.sqrt(3))
        return Fiducial.normalized([np.cos(theta / 2), np.exp(1j * np.pi / 4) * np.sin(theta / 2)])
    if d == 3:
        return Fiducial.normalized([0.0, 1.0, -1.0])
    raise UnsupportedDimension(f"no built-in SIC fiducial for d={d}; pass one explicitly")


def sic_from_fiducial(f: Fiducial, tol: Tolerances = DEFAULT) -> POVM:
    if f.dim < 2:
        raise NotAFiducial("SIC fiducials need d >= 2")
    dev = f.sic_deviation()
    if dev > tol.sic_tol:
        raise NotAFiducial(f"Weyl-Heisenberg orbit is not equiangular (deviation {dev:.3e})")
    return _rank_one_povm(f.orbit(), 1.0 / f.dim, tol)


def tetrahedron_sic(tol: Tolerances = DEFAULT) -> POVM:
    return sic_from_fiducial(builtin_fiducial(2), tol)


def hesse_sic(tol: Tolerances = DEFAULT) -> POVM:
    return sic_from_fiducial(builtin_fiducial(3), tol)


def reflected_sic(sic: POVM, tol: Tolerances | None = None) -> POVM:
    """Effects ``(I - Pi_i) / (d (d-1))`` from the projectors of a SIC."""
    tol = sic.tol if tol is None else tol
    d = sic.dim
    if d < 2 or sic.n != d * d or not classify(sic).is_equiangular:
        raise NotASIC("input is not a SIC (need an equiangular POVM with d^2 effects)")
    I = np.eye(d)
    return POVM([(I - Pi) / (d * (d - 1)) for Pi in sic.normalized], tol=tol)


# ---------------------------------------------------------------------------
# mutually unbiased bases
# ---------------------------------------------------------------------------


def mub_bases(d: int) -> list[np.ndarray]:
    """``d + 1`` mutually unbiased bases for prime ``d``; each is a ``d x d`` array of row vectors."""
    if not _is_prime(d):
        raise UnsupportedDimension(f"MUB construction needs prime d, got {d}")
    j = np.arange(d)
    bases = [np.eye(d, dtype=np.complex128)]
    for k in range(d):
        if d == 2:
            phase = 1j ** (k * j)
        else:
            phase = np.exp(2j * np.pi * k * j * j / d)
        B = np.array([phase * np.exp(2j * np.pi * m * j / d) for m in range(d)]) / np.sqrt(d)
        bases.append(B)
    return bases


def mub_complete(d: int, tol: Tolerances = DEFAULT) -> POVM:
    states = [v for B in mub_bases(d) for v in B]
    return _rank_one_povm(states, 1.0 / (d + 1), tol)


def named_povm(name: str, d: int | None = None, tol: Tolerances = DEFAULT) -> POVM:
    key = name.replace("-", "_")
    fixed = {"trine": 2, "tetrahedron_sic": 2, "hesse_sic": 3}
    if key in fixed:
        if d is not None and d != fixed[key]:
            raise UnsupportedDimension(f"{name} is only defined for d={fixed[key]}")
        return {"trine": trine, "tetrahedron_sic": tetrahedron_sic, "hesse_sic": hesse_sic}[key](tol)
    if key in ("mub_complete", "mub"):
        if d is None:
            raise UnsupportedDimension("mub_complete needs a prime dimension")
        return mub_complete(d, tol)
    raise ValueError(f"unknown POVM name {name!r}; expected one of {NAMED}")


# ---------------------------------------------------------------------------
# fewer effects than dimensions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockSpec:
    d: int
    n: int

    def __post_init__(self):
        if not 1 <= self.n < self.d:
            raise InvalidRange(f"block construction needs 1 <= n < d, got d={self.d}, n={self.n}")

    @property
    def a(self) -> int:
        return self.d // self.n

    @property
    def b(self) -> int:
        return self.d % self.n

    def sizes(self) -> list[int]:
        return [self.a] * (self.n - 1) + [self.a + self.b]


def block_projective(d: int, n: int, tol: Tolerances = DEFAULT) -> POVM:
    """Diagonal 0/1 effects on disjoint blocks: ``a`` ones each, ``a+b`` in the last."""
    spec = BlockSpec(d, n)
    effects = []
    start = 0
    for size in spec.sizes():
        diag = np.zeros(d)
        diag[start : start + size] = 1.0
        effects.append(np.diag(diag))
        start += size
    return POVM(effects, tol=tol)


# ---------------------------------------------------------------------------
# random POVMs
# ---------------------------------------------------------------------------


def factors_to_effects(x, d: int, n: int, k: int) -> np.ndarray:
    """Map the real factor vector to effects ``T^-1/2 G_i G_i^dag T^-1/2``.

    Raises :class:`SingularTotal` if ``T = sum_i G_i G_i^dag`` is numerically singular.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (2 * n * d * k,):
        raise ValueError(f"expected {2 * n * d * k} parameters, got {x.shape}")
    H, ok = _kernels.factor_effects(x, d, n, k)
    if not ok:
        raise SingularTotal("sum of G_i G_i^dag is numerically singular")
    return H @ np.conj(np.swapaxes(H, -1, -2))


def random_povm(d: int, n: int, k: int, seed: int, tol: Tolerances = DEFAULT, max_tries: int = 10) -> POVM:
    """Ginibre-induced random POVM with rank-``k`` effects.

    The factors are drawn as ``default_rng(seed).standard_normal(2*n*d*k)``
    (real parts then imaginary parts), so the result equals
    ``to_povm`` of the same parameter vector.
    """
    if not (1 <= k <= d) or n < 1 or n * k < d:
        raise InvalidRange(f"need 1 <= k <= d and n*k >= d, got d={d}, n={n}, k={k}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        x = rng.standard_normal(2 * n * d * k)
        try:
            return POVM(factors_to_effects(x, d, n, k), tol=tol)
        except SingularTotal:
            continue
    raise SingularTotal(f"could not draw a nonsingular total in {max_tries} tries")
