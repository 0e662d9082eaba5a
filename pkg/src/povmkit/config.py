"""Numerical tolerances shared across modules."""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10
    psd_tol: float = 1e-10
    ortho_tol: float = 1e-10
    recon_tol: float = 1e-9
    completeness_tol: float = 1e-9
    zero_effect_tol: float = 1e-12
    prob_floor: float = 1e-12
    # relative singular-value cutoff for the span dimension of the sqrt effects
    rank_rtol: float = 1e-8
    classify_tol: float = 1e-8
    sic_tol: float = 1e-9

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT = Tolerances()

STRICT = Tolerances(
    herm_tol=1e-12,
    psd_tol=1e-12,
    ortho_tol=1e-12,
    recon_tol=1e-11,
    completeness_tol=1e-11,
    zero_effect_tol=1e-12,
    prob_floor=1e-12,
    rank_rtol=1e-10,
    classify_tol=1e-10,
    sic_tol=1e-11,
)

PROFILES = {"default": DEFAULT, "strict": STRICT}


def profile(name: str) -> Tolerances:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown tolerance profile {name!r}; expected one of {sorted(PROFILES)}")
