import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from mtemono.core.constants import DEFAULT_BOOTSTRAP
from mtemono.core.errors import MteMonoError, SampleError
from mtemono.core.estimation.estimands import estimand_report
from mtemono.core.montecarlo.sampling import Sample
from mtemono.models.population_model import InstrumentGrid, OutcomeCurve
from mtemono.models.report_model import EstimandReport

logger = logging.getLogger(__name__)

ESTIMAND_FIELDS = (
    "late_tilde",
    "latt_tilde",
    "latut_tilde",
    "late_wald",
    "latt_direct",
    "latut_direct",
    "ate_extrapolated",
)


@dataclass(frozen=True)
class EmpiricalCurve:
    """Per-grid-point sample means of y, with counts and treated counts."""

    grid: InstrumentGrid
    means: np.ndarray
    counts: np.ndarray
    treated: np.ndarray

    @property
    def propensities(self) -> np.ndarray:
        return self.treated / self.counts

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    def outcome_curve(self) -> OutcomeCurve:
        """Means on the source grid (the source must be normalized)."""
        return OutcomeCurve(
            grid=self.grid, values=tuple(float(v) for v in self.means)
        )

    def normalized_curve(self) -> OutcomeCurve:
        """Means on empirical propensities, weighted by observed frequencies."""
        p = self.propensities
        if np.any(np.diff(p) <= 0):
            raise SampleError(
                f"empirical propensities {np.round(p, 6).tolist()} are not "
                "strictly increasing"
            )
        freq = self.frequencies
        grid = InstrumentGrid(
            points=tuple(float(v) for v in p),
            weights=tuple(float(v) for v in freq / freq.sum()),
        )
        return OutcomeCurve(grid=grid, values=tuple(float(v) for v in self.means))


def curve_from_arrays(
    grid: InstrumentGrid, z_index: np.ndarray, d: np.ndarray, y: np.ndarray
) -> EmpiricalCurve:
    k = grid.size
    counts = np.bincount(z_index, minlength=k).astype(float)
    if np.any(counts == 0):
        missing = grid.points[int(np.flatnonzero(counts == 0)[0])]
        raise SampleError(f"grid point z = {missing!r} is not observed")
    sums = np.bincount(z_index, weights=y, minlength=k)
    treated = np.bincount(z_index, weights=d, minlength=k).astype(float)
    return EmpiricalCurve(
        grid=grid, means=sums / counts, counts=counts, treated=treated
    )


def empirical_curve(data: Sample) -> EmpiricalCurve:
    return curve_from_arrays(data.grid, data.z_index, data.d, data.y)


def empirical_estimands(
    data: Sample, degree: Optional[int] = None
) -> EstimandReport:
    """Closed-form estimands on the empirical curve and instrument law."""
    return estimand_report(empirical_curve(data).normalized_curve(), degree)


def report_values(report: EstimandReport) -> Dict[str, float]:
    values = {}
    for name in ESTIMAND_FIELDS:
        value = getattr(report, name)
        if value is not None:
            values[name] = float(value)
    return values


def bootstrap_se(
    data: Sample,
    resamples: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    degree: Optional[int] = None,
) -> Dict[str, float]:
    """Nonparametric bootstrap over records; descriptive only."""
    if resamples < 2:
        raise SampleError("bootstrap needs at least 2 resamples")
    rng = np.random.default_rng(seed)
    n = len(data)
    logger.info(f"Bootstrap: {resamples} resamples of {n} records")
    draws = []
    for _ in range(resamples):
        idx = rng.integers(0, n, size=n)
        curve = curve_from_arrays(
            data.grid, data.z_index[idx], data.d[idx], data.y[idx]
        )
        try:
            report = estimand_report(curve.normalized_curve(), degree)
        except MteMonoError as e:
            raise SampleError(f"bootstrap resample failed: {e}") from e
        draws.append(report_values(report))
    names = draws[0].keys()
    return {
        name: float(np.std([draw[name] for draw in draws], ddof=1)) for name in names
    }
