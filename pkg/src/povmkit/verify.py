"""Invariant suites run by ``povmkit verify``.

Each check returns a :class:`Check` whose ``worst`` is the worst observed
value of the checked quantity and ``margin`` its distance to the threshold
(negative means the check failed). Exceptions raised inside a check count as
failures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import constructions as C
from . import measures as M
from .linalg import random_psd, random_state, standard_hermitian_basis
from .majorization import (
    NORMS,
    span_bound_check,
    ea_gram_spectrum,
    sqrt_overlap_gap,
    majorization_compare,
    majorization_margin,
    ea_norm_comparison,
)
from .povm import POVM, born_probabilities, classify, gram_sqrt, luders_update

SUITES = ("identities", "bounds", "majorization")


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    threshold: float
    margin: float
    samples: int
    error: str | None = None

    def as_dict(self):
        out = {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "threshold": self.threshold,
            "margin": self.margin,
            "samples": self.samples,
        }
        if self.error:
            out["error"] = self.error
        return out


def corpus_shapes(dims=(2, 3, 4, 5), extra_outcomes: int = 3):
    """All (d, n, k) with n in 1..d^2+extra_outcomes, k in 1..d and n*k >= d."""
    return [
        (d, n, k)
        for d in dims
        for n in range(1, d * d + extra_outcomes + 1)
        for k in range(1, d + 1)
        if n * k >= d
    ]


def random_corpus(count: int, seed: int = 0, dims=(2, 3, 4, 5)):
    """``count`` random POVMs cycling deterministically through :func:`corpus_shapes`."""
    shapes = corpus_shapes(dims)
    out = []
    for i, (d, n, k) in zip(range(count), itertools.cycle(shapes)):
        out.append(C.random_povm(d, n, k, seed=seed * 1_000_003 + i))
    return out


def _upper(name, values, threshold):
    """Pass when every value is <= threshold."""
    worst = float(np.max(values)) if len(values) else 0.0
    return Check(name, worst <= threshold, worst, threshold, threshold - worst, len(values))


def _lower(name, values, threshold):
    """Pass when every value is >= threshold."""
    worst = float(np.min(values)) if len(values) else 0.0
    return Check(name, worst >= threshold, worst, threshold, worst - threshold, len(values))


def _guard(name, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # noqa: BLE001 - any failure is a failed check
        return Check(name, False, float("nan"), float("nan"), float("-inf"), 0, f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# reference table
# ---------------------------------------------------------------------------


def example_table():
    """(label, povm, {quantity: expected}) rows with closed-form expectations."""
    ref = M.closed_form_reference
    hesse = C.hesse_sic()
    rows = []
    for d in (2, 3, 4):
        rows.append((f"vn d={d}", C.computational_basis(d), {"R": d - 1, "O": 0.0, "D": ref("vn", d)}))
    rows.append(("trine", C.trine(), {"R": 1.0, "O": ref("ea_bound", 2, 3), "D": ref("ea", 2, 3)}))
    rows.append(("tetrahedron SIC", C.tetrahedron_sic(), {"R": 1.0, "O": ref("ea_bound", 2, 4), "D": ref("sic", 2)}))
    rows.append(("Hesse SIC", hesse, {"R": 2.0, "O": ref("ea_bound", 3, 9), "D": ref("sic", 3)}))
    rows.append(
        ("reflected Hesse SIC", C.reflected_sic(hesse), {"R": 1.0, "O": ref("reflected_sic_O", 3), "D": ref("reflected_sic_D", 3)})
    )
    rows.append(("MUB d=2", C.mub_complete(2), {"R": 1.0, "O": ref("two_design_O", 2, 6), "D": ref("sic", 2)}))
    rows.append(("MUB d=3", C.mub_complete(3), {"R": 2.0, "O": ref("two_design_O", 3, 12), "D": ref("sic", 3)}))
    rows.append(
        ("block d=3 n=2", C.block_projective(3, 2), {"R": ref("block_R", 3, 2), "O": ref("block_O", 3, 2), "D": ref("block_D", 3, 2)})
    )
    return rows


def _example_table_check(tol=1e-9):
    devs = []
    for _, p, expected in example_table():
        got = {"R": M.measurement_strength(p), "O": M.orthogonality(p), "D": M.disturbance(p)}
        devs.extend(abs(got[q] - v) for q, v in expected.items())
    return _upper("example_table", devs, tol)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def identities_suite(samples=200, seed=0):
    corpus = random_corpus(samples, seed)
    rng = np.random.default_rng(seed)

    def decomposition():
        return _upper("decomposition_identity", [abs(M.decomposition_residual(p)) for p in corpus], 1e-8)

    def routes():
        return _upper(
            "disturbance_route_agreement",
            [abs(M.disturbance(p, "closed") - M.disturbance(p, "superoperator")) for p in corpus],
            1e-8,
        )

    def orth_routes():
        vals = []
        for p in corpus:
            S = gram_sqrt(p)
            vals.append(abs(np.sum((S - np.eye(p.n)) ** 2) - M.orthogonality_closed(p, S)))
        return _upper("orthogonality_route_agreement", vals, 1e-10)

    def mixture():
        vals = []
        for p in corpus:
            rho = random_state(p.dim, rng)
            probs = born_probabilities(p, rho)
            mix = sum(pi * luders_update(p, rho, i) for i, pi in enumerate(probs) if pi > p.tol.prob_floor)
            R = p.sqrt_effects
            chan = np.einsum("iab,bc,icd->ad", R, rho, R)
            vals.append(float(np.max(np.abs(mix - chan))))
        return _upper("channel_mixture_equivalence", vals, 1e-10)

    def commutator():
        vals = []
        for p in corpus[: max(1, len(corpus) // 4)]:
            basis = standard_hermitian_basis(p.dim)
            A = M.luders_superoperator(p, basis).matrix - np.eye(p.dim**2)
            i, j = rng.integers(0, p.dim**2, size=2)
            Xi, Xj = basis.elements[i], basis.elements[j]
            val = 0.0
            for R in p.sqrt_effects:
                val += np.trace((R @ Xi - Xi @ R) @ (R @ Xj - Xj @ R)).real
            vals.append(abs(A[i, j] - 0.5 * val))
        return _upper("commutator_form", vals, 1e-9)

    return [
        _guard("decomposition_identity", decomposition),
        _guard("disturbance_route_agreement", routes),
        _guard("orthogonality_route_agreement", orth_routes),
        _guard("channel_mixture_equivalence", mixture),
        _guard("commutator_form", commutator),
        _guard("example_table", _example_table_check),
    ]


def bounds_suite(samples=200, seed=0):
    corpus = random_corpus(samples, seed)
    rng = np.random.default_rng(seed + 1)

    def strength():
        lo, hi = [], []
        for p in corpus:
            R = M.measurement_strength(p)
            lo.append(R)
            hi.append(R - (p.dim - 1))
        checks_lo = _lower("strength_lower_bound", lo, -1e-10)
        checks_hi = _upper("strength_upper_bound", hi, 1e-10)
        sat = []
        for p in corpus:
            if classify(p).is_rank_one:
                sat.append(abs(M.measurement_strength(p) - (p.dim - 1)))
        for d in (2, 3, 4):
            w = rng.dirichlet(np.ones(3))
            sat.append(abs(M.measurement_strength(POVM([c * np.eye(d) for c in w]))))
        checks_sat = _upper("strength_saturation", sat, 1e-10)
        return [checks_lo, checks_hi, checks_sat]

    def state_dist():
        vals = []
        for d in (2, 3, 4):
            for i in range(max(1, samples // 2)):
                n = int(rng.integers(1, d * d + 4))
                k = int(rng.integers(1, d + 1))
                if n * k < d:
                    k = d
                p = C.random_povm(d, n, k, seed=seed * 7919 + 1000 * d + i)
                rho = random_state(d, rng, rank=int(rng.integers(1, d + 1)))
                vals.append(M.state_disturbance(rho, p) - M.disturbance(p))
        return _upper("state_disturbance_bound", vals, 1e-9)

    def ea_comparison():
        norm_gaps, witness = [], []
        for d, n in ((2, 3), (2, 4), (3, 4), (3, 9)):
            for i in range(max(1, samples // 4)):
                k = 1 + i % d
                p = C.random_povm(d, n, k, seed=seed * 104729 + 100 * n + i)
                S = gram_sqrt(p)
                for gamma in (0.0, 0.5, 1.0, 2.0):
                    for norm in NORMS:
                        c = ea_norm_comparison(p, gamma, norm, S=S)
                        norm_gaps.append(c.povm_value - c.ea_value)
                    witness.append(c.witness_margin)
        return [_lower("ea_norm_comparison", norm_gaps, -1e-10), _lower("ea_weak_majorization_witness", witness, -1e-12)]

    def span_bound():
        vals = [span_bound_check(C.mub_complete(2)).margin, span_bound_check(C.tetrahedron_sic()).margin]
        for i in range(samples):
            vals.append(span_bound_check(C.random_povm(2, 6, 1, seed=seed * 31 + i)).margin)
        return _lower("span_bound", vals, -1e-9)

    out = []
    s = _guard("strength_bounds", strength)
    out.extend(s if isinstance(s, list) else [s])
    out.append(_guard("state_disturbance_bound", state_dist))
    t = _guard("ea_norm_comparison", ea_comparison)
    out.extend(t if isinstance(t, list) else [t])
    out.append(_guard("span_bound", span_bound))
    return out


def majorization_suite(samples=200, seed=0):
    rng = np.random.default_rng(seed + 2)

    def sqrt_overlap():
        gaps = []
        for d in (2, 3, 4, 6):
            for _ in range(samples):
                gaps.append(sqrt_overlap_gap(random_psd(d, rng, int(rng.integers(1, d + 1))), random_psd(d, rng, int(rng.integers(1, d + 1)))))
        return _lower("sqrt_overlap_gap", gaps, -1e-10)

    def sqrt_overlap_equality():
        vals = []
        for d in (2, 3, 4, 6):
            for _ in range(max(1, samples // 10)):
                vals.append(abs(sqrt_overlap_gap(random_psd(d, rng, 1), random_psd(d, rng, 1))))
                # orthogonal supports
                U = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))[0]
                m = int(rng.integers(1, d))
                da = np.r_[rng.random(m) + 0.1, np.zeros(d - m)]
                db = np.r_[np.zeros(m), rng.random(d - m) + 0.1]
                vals.append(abs(sqrt_overlap_gap((U * da) @ U.conj().T, (U * db) @ U.conj().T)))
        return _upper("sqrt_overlap_equality_cases", vals, 1e-10)

    def chain():
        lam1, margins, sums = [], [], []
        for d in (2, 3, 4):
            for i in range(max(1, samples // 3)):
                n = int(rng.integers(d, d * d + 4))
                k = int(rng.integers(1, d + 1))
                p = C.random_povm(d, n, k, seed=seed * 13 + 1000 * d + i)
                lam = np.linalg.eigvalsh(gram_sqrt(p))
                ea = ea_gram_spectrum(d, n)
                lam1.append(lam[-1])
                margins.append(majorization_margin(lam, ea))
                sums.append(abs(lam.sum() - d))
        return [
            _lower("gram_top_eigenvalue_at_least_one", lam1, 1.0 - 1e-10),
            _lower("gram_spectrum_majorizes_ea", margins, -1e-12),
            _upper("gram_trace_equals_d", sums, 1e-10),
        ]

    def ea_spectra():
        vals = []
        for p in (C.trine(), C.tetrahedron_sic(), C.hesse_sic()):
            lam = np.sort(np.linalg.eigvalsh(gram_sqrt(p)))[::-1]
            vals.append(float(np.max(np.abs(lam - ea_gram_spectrum(p.dim, p.n)))))
            vals.append(0.0 if majorization_compare(lam, ea_gram_spectrum(p.dim, p.n), "strong", tol=1e-10) else 1.0)
        return _upper("ea_gram_spectrum", vals, 1e-10)

    out = [_guard("sqrt_overlap_gap", sqrt_overlap), _guard("sqrt_overlap_equality_cases", sqrt_overlap_equality)]
    c = _guard("majorization_chain", chain)
    out.extend(c if isinstance(c, list) else [c])
    out.append(_guard("ea_gram_spectrum", ea_spectra))
    return out


def run_suite(suite: str = "all", samples: int = 200, seed: int = 0):
    if suite == "all":
        names = SUITES
    elif suite in SUITES:
        names = (suite,)
    else:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES + ('all',)}")
    fns = {"identities": identities_suite, "bounds": bounds_suite, "majorization": majorization_suite}
    checks = []
    for name in names:
        checks.extend(fns[name](samples=samples, seed=seed))
    return checks
