"""Multi-restart Nelder-Mead search over the POVM manifold.

POVMs are parameterized by ``n`` complex ``d x k`` factors ``G_i`` through
``E_i = T^-1/2 G_i G_i^dag T^-1/2`` with ``T = sum_j G_j G_j^dag``, so every
iterate is a valid POVM and no penalty terms are needed. Points with singular
``T`` are assigned a huge objective value and never accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .constructions import factors_to_effects
from .errors import InvalidRange, SingularTotal
from .measures import closed_form_reference
from .povm import POVM, classify, gram_sqrt

OBJECTIVES = ("orthogonality", "disturbance")


@dataclass(frozen=True)
class PovmParameterization:
    d: int
    n: int
    k: int
    x: np.ndarray

    def __post_init__(self):
        x = np.ascontiguousarray(self.x, dtype=np.float64)
        if x.shape != (2 * self.n * self.d * self.k,):
            raise ValueError(f"expected {2 * self.n * self.d * self.k} real parameters, got {x.shape}")
        object.__setattr__(self, "x", x)

    @classmethod
    def random(cls, d, n, k, seed):
        return cls(d, n, k, np.random.default_rng(seed).standard_normal(2 * n * d * k))

    @classmethod
    def from_factors(cls, factors):
        G = np.asarray(factors, dtype=np.complex128)
        n, d, k = G.shape
        return cls(d, n, k, np.concatenate([G.real.ravel(), G.imag.ravel()]))

    @property
    def factors(self) -> np.ndarray:
        m = self.n * self.d * self.k
        return (self.x[:m] + 1j * self.x[m:]).reshape(self.n, self.d, self.k)


@dataclass(frozen=True)
class OptimizationConfig:
    restarts: int = 16
    max_iterations: int = 200_000
    objective_tol: float = 1e-10
    step_tol: float = 1e-8
    seed: int = 0
    objective: str = "orthogonality"

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not (self.objective_tol > 0 and self.step_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")


@dataclass
class RestartRecord:
    index: int
    value: float
    iterations: int
    evaluations: int
    converged: bool
    equiangularity_deviation: float
    trace: np.ndarray = field(repr=False)

    def as_dict(self):
        return {
            "index": self.index,
            "value": self.value,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "equiangularity_deviation": self.equiangularity_deviation,
        }


@dataclass
class OptimizationResult:
    d: int
    n: int
    k: int
    objective: str
    best_povm: POVM
    best_params: PovmParameterization
    best_value: float
    bound_value: float
    bound_kind: str
    gap: float
    equiangularity_deviation: float
    iterations_used: int
    converged: bool
    best_restart: int
    restarts: list = field(default_factory=list, repr=False)

    def as_dict(self, include_restarts=True):
        out = {
            "d": self.d,
            "n": self.n,
            "k": self.k,
            "objective": self.objective,
            "best_value": self.best_value,
            "bound_value": self.bound_value,
            "bound_kind": self.bound_kind,
            "gap": self.gap,
            "equiangularity_deviation": self.equiangularity_deviation,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "best_restart": self.best_restart,
        }
        if include_restarts:
            out["restarts"] = [r.as_dict() for r in self.restarts]
        return out


def to_povm(params: PovmParameterization, tol=None) -> POVM:
    E = factors_to_effects(params.x, params.d, params.n, params.k)
    return POVM(E) if tol is None else POVM(E, tol=tol)


def objective_value(params: PovmParameterization, objective: str = "orthogonality") -> float:
    """Objective evaluated by the compiled kernel; raises on singular ``T``."""
    value = _kernels.OBJECTIVES[objective](params.x, params.d, params.n, params.k)
    if value >= _kernels.PENALTY:
        raise SingularTotal("sum of G_i G_i^dag is numerically singular")
    return float(value)


def equiangularity_deviation(p: POVM) -> float:
    """Spread of pairwise overlaps about their mean.

    For rank-1 POVMs the overlaps are ``tr(Pi_i Pi_j)``; otherwise the
    off-diagonal entries of the sqrt-effect Gram matrix are used.
    """
    if p.n < 2:
        return 0.0
    if classify(p).is_rank_one:
        Pi = p.normalized
        M = np.einsum("iab,jba->ij", Pi, Pi).real
    else:
        M = gram_sqrt(p)
    off = M[~np.eye(p.n, dtype=bool)]
    return float(np.max(np.abs(off - off.mean())))


def bound_for(objective: str, d: int, n: int, k: int) -> tuple[float, str]:
    """Lower bound (proved or conjectured) the optimizer is compared against."""
    if objective == "orthogonality":
        if n < d:
            return closed_form_reference("block_O", d, n), "block_construction"
        if n == 1:
            return 0.0, "ea"
        if n <= d * d:
            return closed_form_reference("ea_bound", d, n), "ea"
        return closed_form_reference("two_design_O", d, n), "two_design"
    if k == 1 and d >= 2:
        # rank-1 effects have R = d - 1, so D = d^2 - n + O
        if n <= d * d:
            return closed_form_reference("ea", d, n), "ea"
        return closed_form_reference("sic", d), "two_design"
    return 0.0, "nonnegativity"


def minimize(d: int, n: int, k: int, config: OptimizationConfig = OptimizationConfig()) -> OptimizationResult:
    """Best-of-restarts Nelder-Mead minimization of the chosen objective.

    Restart ``r`` starts from ``default_rng(config.seed + r)``. Ties in the
    final value are broken by restart index, so results are deterministic.
    """
    if not (1 <= k <= d) or n < 1 or n * k < d:
        raise InvalidRange(f"need 1 <= k <= d and n*k >= d, got d={d}, n={n}, k={k}")
    code = _kernels.OBJECTIVE_CODES[config.objective]
    records = []
    best = None
    for r in range(config.restarts):
        params = PovmParameterization.random(d, n, k, config.seed + r)
        x, fx, iters, conv, trace, nfev = _kernels.nelder_mead(
            code, params.x, d, n, k, config.max_iterations, config.objective_tol, config.step_tol
        )
        p = to_povm(PovmParameterization(d, n, k, x))
        rec = RestartRecord(r, float(fx), int(iters), int(nfev), bool(conv), equiangularity_deviation(p), trace)
        records.append(rec)
        if best is None or rec.value < best[0].value:
            best = (rec, x, p)

    rec, x, p = best
    bound, kind = bound_for(config.objective, d, n, k)
    return OptimizationResult(
        d=d,
        n=n,
        k=k,
        objective=config.objective,
        best_povm=p,
        best_params=PovmParameterization(d, n, k, x),
        best_value=rec.value,
        bound_value=bound,
        bound_kind=kind,
        gap=rec.value - bound,
        equiangularity_deviation=rec.equiangularity_deviation,
        iterations_used=sum(r.iterations for r in records),
        converged=rec.converged,
        best_restart=rec.index,
        restarts=records,
    )


def finite_difference_check(
    params: PovmParameterization,
    objective: str = "orthogonality",
    steps=(1e-5, 1e-6),
    directions: int = 4,
    seed: int = 0,
) -> float:
    """Consistency of central-difference directional derivatives across step sizes.

    For each random unit direction the derivative is estimated at both step
    sizes; the returned value is the largest
    ``|g(h1) - g(h2)| / max(1, |g_R|)`` where ``g_R`` is the Richardson
    extrapolation of the two estimates.
    """
    objective_value(params, objective)  # raises SingularTotal
    f = _kernels.OBJECTIVES[objective]
    rng = np.random.default_rng(seed)
    h1, h2 = steps
    worst = 0.0
    for _ in range(directions):
        u = rng.standard_normal(params.x.size)
        u /= np.linalg.norm(u)
        g = []
        for h in (h1, h2):
            fp = f(params.x + h * u, params.d, params.n, params.k)
            fm = f(params.x - h * u, params.d, params.n, params.k)
            if max(fp, fm) >= _kernels.PENALTY:
                raise SingularTotal("finite-difference stencil hits a singular total")
            g.append((fp - fm) / (2 * h))
        rich = (h1 * h1 * g[1] - h2 * h2 * g[0]) / (h1 * h1 - h2 * h2)
        worst = max(worst, abs(g[0] - g[1]) / max(1.0, abs(rich)))
    return worst


# ---------------------------------------------------------------------------
# conjecture evidence
# ---------------------------------------------------------------------------

CONJECTURES = ("ea_equality_cases", "fewer_effects", "more_effects")


def conjecture_report(target: str, d: int, n: int, config: OptimizationConfig = OptimizationConfig(), k: int = None) -> dict:
    """Numerical evidence for one of the open conjectures. Never a proof.

    ``ea_equality_cases``: runs landing within 1e-5 of the EA bound and how far
    they are from equiangular. ``fewer_effects``: optimum for ``n < d``
    against the block construction. ``more_effects``: optimum for ``n > d^2``
    against the 2-design value.
    """
    if target not in CONJECTURES:
        raise ValueError(f"unknown conjecture {target!r}; expected one of {CONJECTURES}")
    if target == "ea_equality_cases":
        if not d <= n <= d * d:
            raise InvalidRange(f"ea_equality_cases needs d <= n <= d^2, got d={d}, n={n}")
        k = 1 if k is None else k
        reference = closed_form_reference("ea_bound", d, n)
    elif target == "fewer_effects":
        if not 1 <= n < d:
            raise InvalidRange(f"fewer_effects needs n < d, got d={d}, n={n}")
        k = d if k is None else k
        reference = closed_form_reference("block_O", d, n)
    else:
        if n <= d * d:
            raise InvalidRange(f"more_effects needs n > d^2, got d={d}, n={n}")
        k = 1 if k is None else k
        reference = closed_form_reference("two_design_O", d, n)

    if config.objective != "orthogonality":
        config = OptimizationConfig(**{**config.__dict__, "objective": "orthogonality"})
    result = minimize(d, n, k, config)

    runs = []
    for rec in result.restarts:
        gap = rec.value - reference
        entry = {"index": rec.index, "value": rec.value, "gap": gap}
        if target == "ea_equality_cases":
            near = abs(gap) <= 1e-5
            entry["near_bound"] = near
            entry["equiangularity_deviation"] = rec.equiangularity_deviation
            if near:
                entry["verdict"] = "supports" if rec.equiangularity_deviation < 1e-3 else "contradicts"
            else:
                entry["verdict"] = "inconclusive"
        else:
            entry["verdict"] = "supports" if gap >= -1e-6 else "contradicts"
        runs.append(entry)

    verdicts = {e["verdict"] for e in runs}
    overall = "contradicted" if "contradicts" in verdicts else ("supported" if "supports" in verdicts else "inconclusive")
    return {
        "target": target,
        "d": d,
        "n": n,
        "k": k,
        "reference_value": reference,
        "best_value": result.best_value,
        "best_gap": result.best_value - reference,
        "runs": runs,
        "evidence": overall,
        "note": "numerical evidence only; not a proof",
        "result": result,
    }
