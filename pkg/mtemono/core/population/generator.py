"""Random populations for searching over the 'for all g' quantifier.

Each mode fixes which response patterns may appear. The "-only" modes also
force in at least one pattern breaking each strictly stronger condition, so
the generated type set satisfies exactly the requested condition.
"""
import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from mtemono.core.errors import InfeasibleConfigError
from mtemono.core.oracle.monotonicity import satisfies
from mtemono.core.population.builder import build_population, normalize
from mtemono.models.population_model import (
    InstrumentGrid,
    Population,
    ResponseType,
    StratumSpec,
)
from mtemono.models.report_model import MonotonicityKind as MK
from mtemono.models.scenario_model import GeneratorConfig, GeneratorMode

logger = logging.getLogger(__name__)

Pattern = Tuple[int, ...]

# mode -> (condition that must hold, stronger conditions that must each fail)
_MODE_RULES = {
    GeneratorMode.IA_FULL: (MK.IA_FULL, ()),
    GeneratorMode.EXTREME_PAIR_ONLY: (
        MK.EXTREME_PAIR,
        (MK.BOTTOM_ANCHORED, MK.TOP_ANCHORED),
    ),
    GeneratorMode.BOTTOM_ANCHORED_ONLY: (MK.BOTTOM_ANCHORED, (MK.TOP_ANCHORED,)),
    GeneratorMode.TOP_ANCHORED_ONLY: (MK.TOP_ANCHORED, (MK.BOTTOM_ANCHORED,)),
    GeneratorMode.UNRESTRICTED: (None, ()),
    GeneratorMode.PAIR: (MK.PAIR, (MK.IA_FULL,)),
}


def all_patterns(k: int) -> List[Pattern]:
    return [tuple(p) for p in itertools.product((0, 1), repeat=k)]


def threshold_patterns(k: int) -> List[Pattern]:
    """Patterns 0..01..1 that switch on at index 1..k-1."""
    return [tuple(0 if i < j else 1 for i in range(k)) for j in range(1, k)]


def _allowed(config: GeneratorConfig) -> Tuple[List[Pattern], List[List[Pattern]]]:
    holds, must_fail = _MODE_RULES[config.mode]
    pair = config.pair
    patterns = all_patterns(config.n_points)
    if holds is not None:
        patterns = [p for p in patterns if satisfies(p, holds, pair)]
    required = []
    for kind in must_fail:
        breakers = [p for p in patterns if not satisfies(p, kind)]
        if not breakers:
            raise InfeasibleConfigError(
                f"mode {config.mode.value} on {config.n_points} points cannot "
                f"violate {kind.value}"
            )
        required.append(breakers)
    return patterns, required


def _draw_patterns(
    rng: np.random.Generator,
    config: GeneratorConfig,
    allowed: Sequence[Pattern],
    required: Sequence[Sequence[Pattern]],
) -> List[Pattern]:
    # Threshold backbone keeps propensities increasing most of the time;
    # thresholds satisfy every condition, so they never change the mode.
    chosen = list(threshold_patterns(config.n_points))
    for options in required:
        chosen.append(options[rng.integers(len(options))])
    while len(chosen) < config.n_strata:
        chosen.append(allowed[rng.integers(len(allowed))])
    return chosen


def random_population(config: GeneratorConfig, seed: int) -> Population:
    """A normalized population whose type set satisfies exactly ``config.mode``.

    Deterministic in ``seed``; draws are rejected until consecutive
    propensities are at least ``config.min_gap`` apart.
    """
    allowed, required = _allowed(config)
    k = config.n_points
    floor = (k - 1) + len(required)
    if config.n_strata < floor:
        raise InfeasibleConfigError(
            f"mode {config.mode.value} on {k} points needs at least {floor} strata"
        )

    rng = np.random.default_rng(seed)
    for attempt in range(config.max_attempts):
        patterns = _draw_patterns(rng, config, allowed, required)
        masses = rng.dirichlet(np.ones(len(patterns)))
        weights = rng.dirichlet(np.full(k, config.weight_concentration))
        mu0 = rng.uniform(config.mu_low, config.mu_high, len(patterns))
        mu1 = rng.uniform(config.mu_low, config.mu_high, len(patterns))

        p = masses @ np.asarray(patterns, dtype=float)
        if np.any(np.diff(p) < config.min_gap) or np.any(weights <= 0):
            continue

        strata = [
            StratumSpec(
                response=ResponseType(pattern=pattern),
                mass=float(mass),
                mu0=float(a),
                mu1=float(b),
                noise_sd0=config.noise_sd,
                noise_sd1=config.noise_sd,
            )
            for pattern, mass, a, b in zip(patterns, masses, mu0, mu1)
        ]
        weights = weights / weights.sum()
        grid = InstrumentGrid(
            points=tuple(float(i) for i in range(1, k + 1)),
            weights=tuple(float(w) for w in weights),
        )
        if attempt:
            logger.debug(f"random_population seed={seed}: accepted after {attempt}")
        return normalize(build_population(strata, grid))

    raise InfeasibleConfigError(
        f"no {config.mode.value} population with propensity gap >= "
        f"{config.min_gap} after {config.max_attempts} attempts"
    )


def random_pair(rng: np.random.Generator, k: int) -> Tuple[int, int]:
    """A (high, low) index pair with high > low."""
    low, high = sorted(rng.choice(k, size=2, replace=False).tolist())
    return int(high), int(low)
