"""Hand-built populations shared by the test modules."""
from typing import Sequence, Tuple

from mtemono.core.population.builder import build_population, normalize
from mtemono.core.population.roy import roy_population
from mtemono.models.population_model import (
    InstrumentGrid,
    Population,
    ResponseType,
    StratumSpec,
)

THIRDS = (1 / 3, 1 / 3, 1 / 3)
GRID = (0.2, 0.5, 0.8)

# (pattern, mass, mu0, mu1)
Row = Tuple[Tuple[int, ...], float, float, float]


def make_population(
    rows: Sequence[Row],
    points: Sequence[float] = GRID,
    weights: Sequence[float] = THIRDS,
    noise_sd: float = 0.0,
) -> Population:
    strata = [
        StratumSpec(
            response=ResponseType(pattern=pattern),
            mass=mass,
            mu0=mu0,
            mu1=mu1,
            noise_sd0=noise_sd,
            noise_sd1=noise_sd,
        )
        for pattern, mass, mu0, mu1 in rows
    ]
    grid = InstrumentGrid(points=tuple(points), weights=tuple(weights))
    return build_population(strata, grid)


def p1() -> Population:
    """IA-monotone: always-takers, two complier groups, never-takers."""
    return normalize(
        make_population(
            [
                ((1, 1, 1), 0.2, 1.0, 3.0),
                ((0, 1, 1), 0.3, 1.0, 2.0),
                ((0, 0, 1), 0.3, 0.0, 3.0),
                ((0, 0, 0), 0.2, 2.0, 4.0),
            ]
        )
    )


P2_ROWS = [
    ((1, 1, 1), 0.2, 1.0, 3.0),  # AT
    ((0, 1, 0), 0.1, 0.0, 5.0),  # B, treated only in the middle
    ((0, 1, 1), 0.2, 1.0, 2.0),  # C1
    ((0, 0, 1), 0.4, 0.0, 3.0),  # C2
    ((0, 0, 0), 0.1, 2.0, 4.0),  # NT
]


def p2_raw(noise_sd: float = 0.0) -> Population:
    return make_population(P2_ROWS, noise_sd=noise_sd)


def p2(noise_sd: float = 0.0) -> Population:
    """Extreme-pair and bottom-anchored monotone, IA-violating."""
    return normalize(p2_raw(noise_sd))


def constant_effect(b: float = 1.5) -> Population:
    return normalize(
        make_population(
            [
                ((1, 1, 1), 0.25, 0.0, b),
                ((1, 0, 1), 0.15, 2.0, 2.0 + b),
                ((0, 1, 1), 0.35, -1.0, -1.0 + b),
                ((0, 0, 0), 0.25, 3.0, 3.0 + b),
            ]
        )
    )


def quadratic_roy() -> Population:
    """Roy model whose outcome curve is exactly quadratic; ATE = 4."""
    return roy_population(
        points=(0.2, 0.3, 0.6), weights=THIRDS, y1=(1.0, 4.0), y0=(0.0, -2.0)
    )


def flat_first_stage() -> Population:
    """Every instrument value has propensity 0.5 (no first stage)."""
    return make_population(
        [
            ((1, 1, 1), 0.5, 0.0, 1.0),
            ((0, 0, 0), 0.5, 0.0, 1.0),
        ]
    )
