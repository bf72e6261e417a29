"""Exact treatment parameters by enumeration over the strata.

Every value here is a mass-weighted mean of stratum effects beta = mu1 - mu0;
there is no sampling. Populations must be normalized wherever the lowest and
highest instrument values matter, since the grid order is the propensity
order only after normalization.
"""
import math
from typing import List, Optional

import numpy as np

from mtemono.core.constants import MASS_THRESHOLD
from mtemono.core.errors import PopulationError, SupportError, UndefinedParameterError
from mtemono.core.oracle.monotonicity import check_monotonicity
from mtemono.models.population_model import Population
from mtemono.models.report_model import (
    InteriorTypes,
    MonotonicityKind,
    MteSegment,
    PairDecomposition,
    StratumWeight,
    TrueParams,
)


def _require_normalized(pop: Population) -> None:
    if not pop.normalized:
        raise PopulationError("operation requires a normalized population")


def _weighted_effect(weights: np.ndarray, effects: np.ndarray, what: str) -> float:
    total = float(weights.sum())
    if total <= MASS_THRESHOLD:
        raise UndefinedParameterError(
            f"{what} is undefined: conditioning mass {total:.3g}"
        )
    return float(weights @ effects) / total


def _complier_weights(pop: Population) -> np.ndarray:
    d = pop.patterns()
    return pop.masses() * (1.0 - d[:, 0]) * d[:, -1]


def _treated_complier_weights(pop: Population) -> np.ndarray:
    # Pr[S = s, S(z_low) = 0, D = 1]
    return pop.masses() * (1.0 - pop.patterns()[:, 0]) * pop.treated_shares()


def _untreated_complier_weights(pop: Population) -> np.ndarray:
    # Pr[S = s, S(z_high) = 1, D = 0]
    return pop.masses() * pop.patterns()[:, -1] * (1.0 - pop.treated_shares())


def true_late(pop: Population) -> float:
    _require_normalized(pop)
    return _weighted_effect(_complier_weights(pop), pop.effects(), "LATE")


def true_latt(pop: Population) -> float:
    _require_normalized(pop)
    return _weighted_effect(_treated_complier_weights(pop), pop.effects(), "LATT")


def true_latut(pop: Population) -> float:
    _require_normalized(pop)
    return _weighted_effect(_untreated_complier_weights(pop), pop.effects(), "LATUT")


def true_ate(pop: Population) -> float:
    return math.fsum(s.mass * s.effect for s in pop.strata)


def true_late_pair(pop: Population, k1: int, k2: int) -> float:
    """E[beta | D(z_k1) > D(z_k2)]: effect for agents treated at k1 but not k2."""
    size = pop.grid.size
    if not (0 <= k1 < size and 0 <= k2 < size):
        raise IndexError(f"grid indices ({k1}, {k2}) out of range")
    if k1 == k2:
        raise UndefinedParameterError("pair LATE is undefined for identical points")
    d = pop.patterns()
    weights = pop.masses() * d[:, k1] * (1.0 - d[:, k2])
    return _weighted_effect(weights, pop.effects(), f"pair LATE ({k1}, {k2})")


def true_params(pop: Population) -> TrueParams:
    _require_normalized(pop)

    def defined(fn) -> Optional[float]:
        try:
            return fn(pop)
        except UndefinedParameterError:
            return None

    return TrueParams(
        late=defined(true_late),
        latt=defined(true_latt),
        latut=defined(true_latut),
        ate=true_ate(pop),
        complier_mass=float(_complier_weights(pop).sum()),
        treated_complier_mass=float(_treated_complier_weights(pop).sum()),
        untreated_complier_mass=float(_untreated_complier_weights(pop).sum()),
    )


def _stratum_weights(pop: Population, raw: np.ndarray) -> List[StratumWeight]:
    return [
        StratumWeight(
            stratum=i,
            pattern=s.response.label,
            mass=s.mass,
            effect=s.effect,
            weight=float(w),
        )
        for i, (s, w) in enumerate(zip(pop.strata, raw))
    ]


def latt_weight_decomposition(pop: Population) -> List[StratumWeight]:
    """Weights the integral-form LATT places on each stratum's mean effect.

    weight_s = mass_s * (Pr[D=1 | S=s] - s(z_low)) / (E[Z] - z_low). A stratum
    treated at the lowest value but not always treated gets a negative weight.
    """
    _require_normalized(pop)
    denom = pop.grid.mean() - pop.grid.low
    if denom <= MASS_THRESHOLD:
        raise SupportError("E[Z] equals the lowest instrument value")
    raw = pop.masses() * (pop.treated_shares() - pop.patterns()[:, 0]) / denom
    return _stratum_weights(pop, raw)


def latut_weight_decomposition(pop: Population) -> List[StratumWeight]:
    """Mirror of the LATT decomposition anchored at the highest value:
    weight_s = mass_s * (s(z_high) - Pr[D=1 | S=s]) / (z_high - E[Z])."""
    _require_normalized(pop)
    denom = pop.grid.high - pop.grid.mean()
    if denom <= MASS_THRESHOLD:
        raise SupportError("E[Z] equals the highest instrument value")
    raw = pop.masses() * (pop.patterns()[:, -1] - pop.treated_shares()) / denom
    return _stratum_weights(pop, raw)


def aggregate_weights(weights: List[StratumWeight]) -> float:
    return math.fsum(w.weight * w.effect for w in weights)


def pair_decomposition(pop: Population, k1: int, k2: int) -> PairDecomposition:
    """Split the pair Wald contrast into complier and defier parts."""
    _require_normalized(pop)
    if k1 == k2:
        raise SupportError("pair decomposition needs two distinct points")
    d = pop.patterns()
    masses, effects = pop.masses(), pop.effects()
    compliers = masses * d[:, k1] * (1.0 - d[:, k2])
    defiers = masses * d[:, k2] * (1.0 - d[:, k1])
    c_mass, d_mass = float(compliers.sum()), float(defiers.sum())
    c_eff = float(compliers @ effects) / c_mass if c_mass > MASS_THRESHOLD else None
    d_eff = float(defiers @ effects) / d_mass if d_mass > MASS_THRESHOLD else None
    span = pop.grid.points[k1] - pop.grid.points[k2]
    wald = (float(compliers @ effects) - float(defiers @ effects)) / span
    return PairDecomposition(
        k1=k1,
        k2=k2,
        complier_mass=c_mass,
        defier_mass=d_mass,
        complier_effect=c_eff,
        defier_effect=d_eff,
        wald=wald,
    )


def interior_type_effect(pop: Population) -> InteriorTypes:
    """Types treated only at interior values. No estimand targets them."""
    d = pop.patterns()
    interior = (
        (d[:, 0] == 0) & (d[:, -1] == 0) & (d.sum(axis=1) > 0)
        & (pop.masses() > MASS_THRESHOLD)
    )
    mass = float(pop.masses()[interior].sum())
    effect = None
    if mass > MASS_THRESHOLD:
        effect = float(pop.masses()[interior] @ pop.effects()[interior]) / mass
    return InteriorTypes(
        mass=mass, effect=effect, strata=np.flatnonzero(interior).tolist()
    )


def mte_curve(pop: Population) -> List[MteSegment]:
    """Segment-average MTE next to the LIV slope; defined only under
    Imbens-Angrist monotonicity, where the two coincide."""
    _require_normalized(pop)
    report = check_monotonicity(pop, MonotonicityKind.IA_FULL)
    if not report.holds:
        raise UndefinedParameterError(
            "MTE is not defined without Imbens-Angrist monotonicity"
        )
    d = pop.patterns()
    z = pop.grid.z()
    masses, effects = pop.masses(), pop.effects()
    m = masses @ (d * pop.mu1()[:, None] + (1.0 - d) * pop.mu0()[:, None])
    segments = []
    for k in range(pop.grid.size - 1):
        switchers = masses * (1.0 - d[:, k]) * d[:, k + 1]
        mte = _weighted_effect(switchers, effects, f"MTE on segment {k}")
        liv = float((m[k + 1] - m[k]) / (z[k + 1] - z[k]))
        segments.append(
            MteSegment(u_low=float(z[k]), u_high=float(z[k + 1]), mte=mte, liv=liv)
        )
    return segments
