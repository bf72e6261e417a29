"""Forward and converse checks of the identification results.

Forward: random populations that satisfy a part's monotonicity condition
must give estimand == parameter to tolerance. Converse: unrestricted
populations violating the condition are searched until one shows a gap
above ``converse_gap``; that population is written out as a replayable
fixture.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from mtemono.core.errors import InfeasibleConfigError, UndefinedParameterError
from mtemono.core.estimation.estimands import (
    estimand_late,
    estimand_latt,
    estimand_latut,
    late_tilde,
    latt_tilde,
    latut_tilde,
    wald,
)
from mtemono.core.estimation.liv import avg_liv_range
from mtemono.core.montecarlo.replication import run_replications
from mtemono.core.montecarlo.seeds import child_seeds, derive_seed
from mtemono.core.oracle.monotonicity import check_monotonicity
from mtemono.core.oracle.parameters import (
    true_late,
    true_late_pair,
    true_latt,
    true_latut,
)
from mtemono.core.population.builder import outcome_curve
from mtemono.core.population.codec import dump_population
from mtemono.core.population.generator import random_pair, random_population
from mtemono.models.population_model import Population
from mtemono.models.report_model import MonotonicityKind, PartResult
from mtemono.models.scenario_model import (
    THEOREM_PARTS,
    GeneratorConfig,
    GeneratorMode,
    TheoremCheckConfig,
)

logger = logging.getLogger(__name__)

Pair = Optional[Tuple[int, int]]


def _gap_late(pop: Population, pair: Pair) -> float:
    curve, truth = outcome_curve(pop), true_late(pop)
    return max(abs(late_tilde(curve) - truth), abs(estimand_late(curve) - truth))


def _gap_latt(pop: Population, pair: Pair) -> float:
    curve, truth = outcome_curve(pop), true_latt(pop)
    return max(abs(latt_tilde(curve) - truth), abs(estimand_latt(curve) - truth))


def _gap_latut(pop: Population, pair: Pair) -> float:
    curve, truth = outcome_curve(pop), true_latut(pop)
    return max(abs(latut_tilde(curve) - truth), abs(estimand_latut(curve) - truth))


def _gap_wald_pair(pop: Population, pair: Pair) -> float:
    high, low = pair
    return abs(wald(outcome_curve(pop), high, low) - true_late_pair(pop, high, low))


def _gap_avg_liv(pop: Population, pair: Pair) -> float:
    high, low = pair
    z = pop.grid.points
    value = avg_liv_range(outcome_curve(pop), z[low], z[high])
    return abs(value - true_late_pair(pop, high, low))


@dataclass(frozen=True)
class PartSpec:
    forward_mode: GeneratorMode
    kind: MonotonicityKind
    gap: Callable[[Population, Pair], float]

    @property
    def uses_pair(self) -> bool:
        return self.kind is MonotonicityKind.PAIR


PARTS: Dict[str, PartSpec] = {
    "i": PartSpec(
        GeneratorMode.EXTREME_PAIR_ONLY, MonotonicityKind.EXTREME_PAIR, _gap_late
    ),
    "ii": PartSpec(
        GeneratorMode.BOTTOM_ANCHORED_ONLY, MonotonicityKind.BOTTOM_ANCHORED, _gap_latt
    ),
    "iii": PartSpec(
        GeneratorMode.TOP_ANCHORED_ONLY, MonotonicityKind.TOP_ANCHORED, _gap_latut
    ),
    "iv": PartSpec(GeneratorMode.PAIR, MonotonicityKind.PAIR, _gap_wald_pair),
    "prop2": PartSpec(GeneratorMode.PAIR, MonotonicityKind.PAIR, _gap_avg_liv),
}


def _generator(config: TheoremCheckConfig, mode: GeneratorMode, pair: Pair):
    return GeneratorConfig(
        n_points=config.n_points,
        n_strata=config.n_strata,
        mu_low=config.mu_low,
        mu_high=config.mu_high,
        mode=mode,
        pair=pair if mode is GeneratorMode.PAIR else None,
    )


def _draw(
    config: TheoremCheckConfig, part: str, mode: GeneratorMode, seed: int
) -> Tuple[Population, Pair]:
    spec = PARTS[part]
    pair = None
    if spec.uses_pair:
        pair = random_pair(np.random.default_rng(seed), config.n_points)
    pop = random_population(_generator(config, mode, pair), derive_seed(seed, 1))
    return pop, pair


def _forward_trial(job: Tuple[TheoremCheckConfig, str, int]) -> float:
    config, part, seed = job
    pop, pair = _draw(config, part, PARTS[part].forward_mode, seed)
    return PARTS[part].gap(pop, pair)


def _converse_gap(part: str, pop: Population, pair: Pair) -> Optional[float]:
    """Gap when the part's condition fails in ``pop``; None otherwise."""
    spec = PARTS[part]
    if check_monotonicity(pop, spec.kind, pair).holds:
        return None
    try:
        return spec.gap(pop, pair)
    except UndefinedParameterError:
        return None


def _write_witness(
    out_dir: Optional[Path], part: str, pop: Population
) -> Optional[str]:
    if out_dir is None:
        return None
    path = dump_population(pop, Path(out_dir) / f"witness_part_{part}.json")
    return str(path)


def check_part(
    config: TheoremCheckConfig,
    part: str,
    out_dir: Optional[Path] = None,
    seeded_witness: Optional[Tuple[Population, Pair]] = None,
) -> PartResult:
    part_index = THEOREM_PARTS.index(part)

    jobs = [
        (config, part, child)
        for child in child_seeds(config.seed, config.trials, part_index, 0)
    ]
    gaps = run_replications(_forward_trial, jobs, config.workers)
    max_gap = float(max(gaps))
    passed = max_gap < config.tolerance
    logger.info(f"Part {part} forward: {config.trials} trials, max gap {max_gap:.3g}")

    status, draws, found_gap, witness, seeded = "inconclusive", 0, None, None, False
    if seeded_witness is not None:
        pop, pair = seeded_witness
        gap = _converse_gap(part, pop, pair)
        if gap is not None and gap > config.converse_gap:
            status, found_gap, witness, seeded = "found", gap, pop, True
    if witness is None:
        for t in range(config.trials):
            draws = t + 1
            seed = derive_seed(config.seed, part_index, 1, t)
            pop, pair = _draw(config, part, GeneratorMode.UNRESTRICTED, seed)
            gap = _converse_gap(part, pop, pair)
            if gap is not None and gap > config.converse_gap:
                status, found_gap, witness = "found", gap, pop
                break
    if witness is None:
        logger.warning(
            f"Part {part} converse: no witness in {config.trials} draws (inconclusive)"
        )
    else:
        logger.info(f"Part {part} converse: witness with gap {found_gap:.4g}")

    return PartResult(
        part=part,
        forward_trials=config.trials,
        forward_max_gap=max_gap,
        forward_passed=passed,
        converse_status=status,
        converse_draws=draws,
        converse_gap=found_gap,
        seeded=seeded,
        witness_file=(
            None if witness is None else _write_witness(out_dir, part, witness)
        ),
    )


def theorem_check(
    config: TheoremCheckConfig,
    out_dir: Optional[Union[str, Path]] = None,
    seeded_witnesses: Optional[Dict[str, Tuple[Population, Pair]]] = None,
) -> List[PartResult]:
    if config.trials < 1:
        raise InfeasibleConfigError("theorem check needs at least one trial")
    seeded_witnesses = seeded_witnesses or {}
    out = None if out_dir is None else Path(out_dir)
    return [
        check_part(config, part, out, seeded_witnesses.get(part))
        for part in config.modes
    ]


def summary_table(results: List[PartResult]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in results])
