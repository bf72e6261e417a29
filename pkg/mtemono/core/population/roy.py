import logging
from typing import Sequence, Tuple

from mtemono.core.errors import PopulationError
from mtemono.core.population.builder import build_population, normalize
from mtemono.models.population_model import (
    InstrumentGrid,
    Population,
    ResponseType,
    StratumSpec,
)

logger = logging.getLogger(__name__)


def roy_population(
    points: Sequence[float],
    weights: Sequence[float],
    y1: Tuple[float, float],
    y0: Tuple[float, float],
    noise_sd: float = 0.0,
) -> Population:
    """Discretized selection model D = 1[Z > U] with U uniform on [0, 1].

    ``points`` are the propensities of the instrument values and must lie
    strictly inside (0, 1). E[Y(d) | U = u] = a_d + b_d * u with
    ``y1 = (a_1, b_1)`` and ``y0 = (a_0, b_0)``. Each stratum is a U-interval
    between consecutive cut points; its potential-outcome means are the
    interval means of the linear functions, so m(z_k) matches the quadratic
    a_1 z + b_1 z^2 / 2 + a_0 (1 - z) + b_0 (1 - z^2) / 2 exactly.
    """
    cuts = [0.0, *points, 1.0]
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise PopulationError("Roy grid points must be strictly inside (0, 1)")

    (a1, b1), (a0, b0) = y1, y0
    k_count = len(points)
    strata = []
    for j in range(k_count + 1):
        lo, hi = cuts[j], cuts[j + 1]
        mid = 0.5 * (lo + hi)
        # U in [lo, hi) is treated at z_k exactly when hi <= z_k.
        pattern = tuple(1 if j <= k else 0 for k in range(k_count))
        strata.append(
            StratumSpec(
                response=ResponseType(pattern=pattern),
                mass=hi - lo,
                mu0=a0 + b0 * mid,
                mu1=a1 + b1 * mid,
                noise_sd0=noise_sd,
                noise_sd1=noise_sd,
            )
        )
    grid = InstrumentGrid(points=tuple(points), weights=tuple(weights))
    return normalize(build_population(strata, grid))
