import json
from pathlib import Path
from typing import Any, Callable, List, Optional, Union

import pandas as pd

from mtemono.core.errors import UndefinedParameterError
from mtemono.core.oracle.monotonicity import check_monotonicity
from mtemono.core.oracle.parameters import (
    true_ate,
    true_late,
    true_latt,
    true_latut,
)
from mtemono.models.population_model import Population
from mtemono.models.report_model import ComparisonRow, EstimandReport

COMPARISON_COLUMNS = [
    "name",
    "value",
    "condition",
    "condition_holds",
    "true_value",
    "gap",
]

# estimand field -> (target parameter, identifying condition)
_TARGETS = {
    "late_tilde": (true_late, "late"),
    "late_wald": (true_late, "late"),
    "latt_tilde": (true_latt, "latt"),
    "latt_direct": (true_latt, "latt"),
    "latut_tilde": (true_latut, "latut"),
    "latut_direct": (true_latut, "latut"),
}


def _defined(fn: Callable[[Population], float], pop: Population) -> Optional[float]:
    try:
        return fn(pop)
    except UndefinedParameterError:
        return None


def comparison_rows(report: EstimandReport, pop: Population) -> List[ComparisonRow]:
    """One row per estimand: value, identifying condition and whether it holds
    in ``pop``, the oracle value, and the absolute gap."""
    rows = []
    for name, (target, family) in _TARGETS.items():
        kind = report.conditions[family]
        value = getattr(report, name)
        truth = _defined(target, pop)
        rows.append(
            ComparisonRow(
                name=name,
                value=value,
                condition=kind.value,
                condition_holds=check_monotonicity(pop, kind).holds,
                true_value=truth,
                gap=None if truth is None else abs(value - truth),
            )
        )
    if report.ate_extrapolated is not None:
        truth = true_ate(pop)
        rows.append(
            ComparisonRow(
                name="ate_extrapolated",
                value=report.ate_extrapolated,
                condition=f"polynomial degree {report.extrapolation_degree}",
                condition_holds=None,
                true_value=truth,
                gap=abs(report.ate_extrapolated - truth),
            )
        )
    return rows


def write_rows_csv(rows: List[ComparisonRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=COMPARISON_COLUMNS)
    frame.to_csv(path, index=False)
    return path


def write_json(doc: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")
    return path
