import logging
from typing import Sequence

import numpy as np
from pydantic import ValidationError

from mtemono.core.constants import FIRST_STAGE_TOL, NORMALIZED_TOL
from mtemono.core.errors import NormalizationError, PopulationError
from mtemono.models.population_model import (
    InstrumentGrid,
    OutcomeCurve,
    Population,
    ResponseType,
    StratumSpec,
)

logger = logging.getLogger(__name__)


def _first_error(exc: ValidationError) -> str:
    errors = exc.errors()
    if not errors:
        return str(exc)
    msg = errors[0].get("msg", str(exc))
    return msg.removeprefix("Value error, ")


def build_population(
    strata: Sequence[StratumSpec], grid: InstrumentGrid
) -> Population:
    if not strata:
        raise PopulationError("population has no strata")
    try:
        pop = Population(grid=grid, strata=tuple(strata), normalized=False)
    except ValidationError as e:
        raise PopulationError(_first_error(e)) from e
    logger.debug(f"Built population: {len(pop.strata)} strata on {grid.size} points")
    return pop


def propensity(pop: Population, k: int) -> float:
    if not 0 <= k < pop.grid.size:
        raise IndexError(f"grid index {k} out of range 0..{pop.grid.size - 1}")
    return float(pop.masses() @ pop.patterns()[:, k])


def first_stage_check(pop: Population) -> bool:
    p = pop.propensities()
    return bool(p.max() - p.min() > FIRST_STAGE_TOL)


def normalize(pop: Population) -> Population:
    """Relabel instrument values by their propensities so that p(z) = z.

    Grid indices are reordered by propensity when the raw labels are not
    ordered that way; weights and pattern entries move with their points.
    """
    if pop.normalized:
        return pop
    if not first_stage_check(pop):
        raise NormalizationError("no first stage: propensity is constant")

    p = pop.propensities()
    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    ties = np.flatnonzero(np.diff(sorted_p) <= NORMALIZED_TOL)
    if ties.size:
        a, b = order[ties[0]], order[ties[0] + 1]
        raise NormalizationError(
            f"non-injective propensity: grid points {pop.grid.points[a]!r} and "
            f"{pop.grid.points[b]!r} share propensity {p[a]:.12g}"
        )

    if np.any(order != np.arange(pop.grid.size)):
        logger.info(f"Reordering instrument values by propensity: {order.tolist()}")
    weights = tuple(pop.grid.weights[i] for i in order)
    strata = tuple(
        s.model_copy(
            update={
                "response": ResponseType(
                    pattern=tuple(s.response.pattern[i] for i in order)
                )
            }
        )
        for s in pop.strata
    )
    # Recompute from the permuted patterns so that p(z) = z holds bit-for-bit.
    masses = np.array([s.mass for s in strata])
    patterns = np.array([s.response.pattern for s in strata], dtype=float)
    points = tuple(float(v) for v in masses @ patterns)
    try:
        grid = InstrumentGrid(points=points, weights=weights)
        out = Population(grid=grid, strata=strata, normalized=True)
    except ValidationError as e:
        raise NormalizationError(_first_error(e)) from e
    logger.debug(f"Normalized grid points: {[round(v, 6) for v in points]}")
    return out


def outcome_curve(pop: Population) -> OutcomeCurve:
    if not pop.normalized:
        raise PopulationError("outcome curve requires a normalized population")
    d = pop.patterns()
    # m_k = sum_s mass_s * (d_sk * mu1_s + (1 - d_sk) * mu0_s)
    per_stratum = d * pop.mu1()[:, None] + (1.0 - d) * pop.mu0()[:, None]
    values = pop.masses() @ per_stratum
    return OutcomeCurve(grid=pop.grid, values=tuple(float(v) for v in values))
