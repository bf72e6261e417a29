"""Scenario runner: load a scenario file, run its tasks in fixed order and
write the report files.

Reports carry no timestamps or absolute paths, so the same scenario and seed
always give byte-identical files.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import ValidationError

from mtemono.core.constants import REPORT_SCHEMA_VERSION
from mtemono.core.errors import (
    MteMonoError,
    NormalizationError,
    PopulationError,
    ScenarioError,
    TaskError,
    UndefinedParameterError,
)
from mtemono.core.estimation.estimands import estimand_report
from mtemono.core.estimation.extrapolation import (
    extrapolate_ate,
    fit_outcome_polynomial,
)
from mtemono.core.harness.reporting import (
    comparison_rows,
    write_json,
    write_rows_csv,
)
from mtemono.core.harness.theorem_check import summary_table, theorem_check
from mtemono.core.montecarlo.convergence import (
    convergence_study,
    write_convergence_csv,
)
from mtemono.core.montecarlo.empirical import (
    bootstrap_se,
    empirical_curve,
    empirical_estimands,
    report_values,
)
from mtemono.core.montecarlo.local_linear import local_linear_mean
from mtemono.core.montecarlo.sampling import sample, write_sample_csv
from mtemono.core.montecarlo.seeds import derive_seed
from mtemono.core.montecarlo.split_sample import (
    split_sample_extremes,
    split_sample_study,
)
from mtemono.core.oracle.monotonicity import monotonicity_summary
from mtemono.core.oracle.parameters import (
    interior_type_effect,
    latt_weight_decomposition,
    latut_weight_decomposition,
    mte_curve,
    pair_decomposition,
    true_ate,
    true_params,
)
from mtemono.core.population.builder import normalize, outcome_curve
from mtemono.core.population.codec import (
    load_population,
    population_from_dict,
    population_id,
)
from mtemono.models.population_model import Population
from mtemono.models.scenario_model import Scenario, TaskName

logger = logging.getLogger(__name__)


def _line_of(text: str, path: Sequence[Any]) -> Optional[int]:
    """1-based line of the last key of ``path`` in the raw text.

    Each key is searched from the line of its parent key on, so a key that
    also appears in an earlier block is not mistaken for this one. List
    indices in ``path`` are skipped.
    """
    lines = text.splitlines()
    found, start = None, 0
    for key in path:
        if not isinstance(key, str):
            continue
        needle = f'"{key}"'
        for number in range(start, len(lines)):
            if needle in lines[number]:
                found, start = number + 1, number
                break
        else:
            return found
    return found


def parse_scenario(text: str, source: str = "<scenario>") -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(
            f"{source}: invalid JSON: {e.msg}", line=e.lineno, column=e.colno
        ) from e
    if not isinstance(doc, dict):
        raise ScenarioError(f"{source}: scenario must be a JSON object", line=1)
    try:
        return Scenario.model_validate(doc)
    except ValidationError as e:
        first = e.errors()[0]
        loc = [str(part) for part in first["loc"]]
        field = ".".join(loc) if loc else None
        message = first["msg"].removeprefix("Value error, ")
        line = _line_of(text, first["loc"])
        raise ScenarioError(f"{source}: {message}", field=field, line=line) from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"scenario file not found: {path}")
    logger.info(f"Loading scenario from {path}")
    return parse_scenario(path.read_text(encoding="utf-8"), path.name)


def resolve_population(scenario: Scenario, base_dir: Path) -> Population:
    """The scenario's population, as given (not normalized)."""
    if scenario.population is not None:
        try:
            return population_from_dict(scenario.population)
        except PopulationError as e:
            raise ScenarioError(str(e), field="population") from e
    path = base_dir / scenario.population_file
    if not path.is_file():
        raise ScenarioError(
            f"population file not found: {scenario.population_file}",
            field="population_file",
        )
    try:
        return load_population(path)
    except PopulationError as e:
        raise ScenarioError(str(e), field="population_file") from e


@dataclass
class ScenarioRun:
    scenario: Scenario
    population: Population
    out_dir: Path
    normalized: Optional[Population] = None

    def require_normalized(self) -> Population:
        if self.normalized is None:
            self.normalized = normalize(self.population)
        return self.normalized

    def try_normalized(self) -> Optional[Population]:
        try:
            return self.require_normalized()
        except NormalizationError as e:
            logger.warning(f"Population cannot be normalized: {e}")
            return None


def _dump(model: Any) -> Any:
    return model.model_dump(mode="json")


def _task_oracle(run: ScenarioRun) -> Dict[str, Any]:
    pop = run.require_normalized()
    try:
        segments = [_dump(s) for s in mte_curve(pop)]
    except UndefinedParameterError:
        segments = None
    return {
        "true_params": _dump(true_params(pop)),
        "monotonicity": [_dump(r) for r in monotonicity_summary(pop)],
        "interior_types": _dump(interior_type_effect(pop)),
        "mte_curve": segments,
        "latt_weights": [_dump(w) for w in latt_weight_decomposition(pop)],
        "latut_weights": [_dump(w) for w in latut_weight_decomposition(pop)],
        # consecutive pairs, higher value first
        "pairs": [
            _dump(pair_decomposition(pop, k + 1, k))
            for k in range(pop.grid.size - 1)
        ],
    }


def _task_estimands(run: ScenarioRun) -> Dict[str, Any]:
    pop = run.require_normalized()
    degree = None
    if TaskName.EXTRAPOLATE in run.scenario.tasks:
        degree = run.scenario.extrapolation_degree
    report = estimand_report(outcome_curve(pop), degree)
    rows = comparison_rows(report, pop)
    if run.scenario.write_csv:
        write_rows_csv(rows, run.out_dir / "estimands.csv")
    return {"report": _dump(report), "comparison": [_dump(r) for r in rows]}


def _task_extrapolate(run: ScenarioRun) -> Dict[str, Any]:
    pop = run.require_normalized()
    degree = run.scenario.extrapolation_degree
    curve = outcome_curve(pop)
    value, truth = extrapolate_ate(curve, degree), true_ate(pop)
    return {
        "degree": degree,
        "coefficients": [float(c) for c in fit_outcome_polynomial(curve, degree)],
        "ate_extrapolated": value,
        "true_ate": truth,
        "gap": abs(value - truth),
    }


def _task_montecarlo(run: ScenarioRun) -> Dict[str, Any]:
    settings = run.scenario.montecarlo
    if settings is None or settings.seed is None:
        raise ScenarioError(
            "montecarlo settings with a seed are required", field="montecarlo"
        )
    seed = settings.seed
    # Populations without a first stage can still be sampled on their raw
    # grid, which is what the split-sample demonstration needs.
    normalized = run.try_normalized()
    pop = normalized if normalized is not None else run.population
    degree = None
    if TaskName.EXTRAPOLATE in run.scenario.tasks:
        degree = run.scenario.extrapolation_degree

    data = sample(pop, settings.n, seed)
    if run.scenario.export_sample:
        write_sample_csv(data, run.out_dir / "sample.csv")
    curve = empirical_curve(data)
    section: Dict[str, Any] = {
        "n": settings.n,
        "seed": seed,
        "population_id": data.source,
        "empirical_propensities": [float(p) for p in curve.propensities],
        "empirical_means": [float(m) for m in curve.means],
        "empirical": None,
        "bootstrap_se": None,
        "local_linear": None,
        "split_sample": None,
        "split_sample_study": None,
        "convergence": None,
    }

    if normalized is not None:
        section["empirical"] = report_values(empirical_estimands(data, degree))
        if settings.bootstrap >= 2:
            section["bootstrap_se"] = bootstrap_se(
                data, settings.bootstrap, derive_seed(seed, 1), degree
            )
    if settings.bandwidth is not None:
        z = pop.grid.points
        section["local_linear"] = {
            "bandwidth": settings.bandwidth,
            "z": [z[0], z[-1]],
            "values": [
                local_linear_mean(data, z[0], settings.bandwidth),
                local_linear_mean(data, z[-1], settings.bandwidth),
            ],
        }
    if settings.split_sample:
        halves = split_sample_extremes(data, derive_seed(seed, 2))
        section["split_sample"] = _dump(halves)
        if settings.reps >= 2:
            section["split_sample_study"] = _dump(
                split_sample_study(
                    pop,
                    settings.n,
                    settings.reps,
                    derive_seed(seed, 3),
                    settings.workers,
                )
            )
    if settings.sizes and normalized is not None:
        table = convergence_study(
            normalized,
            settings.sizes,
            max(settings.reps, 2),
            derive_seed(seed, 4),
            settings.workers,
            degree,
        )
        if run.scenario.write_csv:
            write_convergence_csv(table, run.out_dir / "convergence.csv")
        section["convergence"] = table.to_dict(orient="records")
    return section


def _task_theorem_check(run: ScenarioRun) -> List[Dict[str, Any]]:
    results = theorem_check(run.scenario.theorem_check, run.out_dir)
    if run.scenario.write_csv:
        summary_table(results).to_csv(run.out_dir / "theorem_check.csv", index=False)
    return [_dump(r) for r in results]


_TASKS = {
    TaskName.ORACLE: _task_oracle,
    TaskName.ESTIMANDS: _task_estimands,
    TaskName.EXTRAPOLATE: _task_extrapolate,
    TaskName.MONTECARLO: _task_montecarlo,
    TaskName.THEOREM_CHECK: _task_theorem_check,
}


def execute(
    scenario: Scenario,
    population: Population,
    out_dir: Union[str, Path],
    only: Optional[Sequence[TaskName]] = None,
) -> Dict[str, Any]:
    """Run the scenario's tasks (or ``only`` these) and write report.json."""
    run = ScenarioRun(scenario=scenario, population=population, out_dir=Path(out_dir))
    run.out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [t for t in scenario.ordered_tasks() if only is None or t in only]

    report: Dict[str, Any] = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": scenario.name,
        "population_id": population_id(population),
        "tasks": [t.value for t in tasks],
    }
    for task in tasks:
        logger.info(f"Task '{task.value}' started")
        try:
            report[task.value] = _TASKS[task](run)
        except ScenarioError:
            raise
        except MteMonoError as e:
            raise TaskError(task.value, e) from e
        logger.info(f"Task '{task.value}' finished")

    write_json(report, run.out_dir / "report.json")
    return report


def run_scenario(
    path: Union[str, Path], only: Optional[Sequence[TaskName]] = None
) -> Dict[str, Any]:
    """Load, validate and run a scenario file. Relative population files and
    the output directory resolve against the scenario's directory."""
    path = Path(path)
    scenario = load_scenario(path)
    if only is not None:
        if TaskName.MONTECARLO in only and scenario.montecarlo is None:
            raise ScenarioError(
                "scenario has no montecarlo settings", field="montecarlo"
            )
        scenario = scenario.model_copy(update={"tasks": list(only)})
    population = resolve_population(scenario, path.parent)
    return execute(scenario, population, path.parent / scenario.output_dir)
