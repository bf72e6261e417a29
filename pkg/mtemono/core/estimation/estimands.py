import logging
from typing import Optional

from mtemono.core.constants import MASS_THRESHOLD, NORMALIZED_TOL
from mtemono.core.errors import IdentityError, SupportError
from mtemono.core.estimation.extrapolation import extrapolate_ate
from mtemono.core.estimation.liv import (
    cdf_weighted_liv_integral,
    liv_integral,
    survival_weighted_liv_integral,
)
from mtemono.models.population_model import InstrumentGrid, OutcomeCurve
from mtemono.models.report_model import EstimandReport, MonotonicityKind

logger = logging.getLogger(__name__)

# Condition under which each estimand equals its parameter for every
# potential-outcome distribution.
IDENTIFYING_CONDITIONS = {
    "late": MonotonicityKind.EXTREME_PAIR,
    "latt": MonotonicityKind.BOTTOM_ANCHORED,
    "latut": MonotonicityKind.TOP_ANCHORED,
}


def _agree(name: str, integral: float, closed: float) -> None:
    scale = max(1.0, abs(closed))
    if abs(integral - closed) > NORMALIZED_TOL * scale:
        raise IdentityError(
            f"{name}: integral form {integral!r} != closed form {closed!r}"
        )


def _with_law(curve: OutcomeCurve, grid: Optional[InstrumentGrid]) -> OutcomeCurve:
    if grid is None or grid == curve.grid:
        return curve
    if len(grid.points) != len(curve.grid.points) or any(
        abs(a - b) > NORMALIZED_TOL for a, b in zip(grid.points, curve.grid.points)
    ):
        raise SupportError("instrument law and outcome curve use different points")
    return OutcomeCurve(grid=grid, values=curve.values)


def late_tilde(curve: OutcomeCurve) -> float:
    span = curve.grid.high - curve.grid.low
    return liv_integral(curve) / span


def latt_tilde(curve: OutcomeCurve) -> float:
    return survival_weighted_liv_integral(curve) / _mean_above_low(curve.grid)


def latut_tilde(curve: OutcomeCurve) -> float:
    return cdf_weighted_liv_integral(curve) / _mean_below_high(curve.grid)


def _mean_above_low(grid: InstrumentGrid) -> float:
    gap = grid.mean() - grid.low
    if gap <= MASS_THRESHOLD:
        raise SupportError("E[Z] is not above the lowest instrument value")
    return gap


def _mean_below_high(grid: InstrumentGrid) -> float:
    gap = grid.high - grid.mean()
    if gap <= MASS_THRESHOLD:
        raise SupportError("E[Z] is not below the highest instrument value")
    return gap


def estimand_late(curve: OutcomeCurve) -> float:
    """(E[Y | Z = z_high] - E[Y | Z = z_low]) / (z_high - z_low)."""
    m = curve.m()
    span = curve.grid.high - curve.grid.low
    if span <= MASS_THRESHOLD:
        raise SupportError("degenerate instrument support")
    closed = float(m[-1] - m[0]) / span
    _agree("LATE", late_tilde(curve), closed)
    return closed


def estimand_latt(
    curve: OutcomeCurve, grid: Optional[InstrumentGrid] = None
) -> float:
    """(E[Y] - E[Y | Z = z_low]) / (E[Z] - z_low)."""
    curve = _with_law(curve, grid)
    gap = _mean_above_low(curve.grid)
    closed = (curve.mean_outcome() - curve.values[0]) / gap
    _agree("LATT", latt_tilde(curve), closed)
    return closed


def estimand_latut(
    curve: OutcomeCurve, grid: Optional[InstrumentGrid] = None
) -> float:
    """(E[Y | Z = z_high] - E[Y]) / (z_high - E[Z])."""
    curve = _with_law(curve, grid)
    gap = _mean_below_high(curve.grid)
    closed = (curve.values[-1] - curve.mean_outcome()) / gap
    _agree("LATUT", latut_tilde(curve), closed)
    return closed


def wald(curve: OutcomeCurve, k1: int, k2: int) -> float:
    z = curve.grid.points
    if not (0 <= k1 < len(z) and 0 <= k2 < len(z)):
        raise IndexError(f"grid indices ({k1}, {k2}) out of range")
    if k1 == k2 or z[k1] == z[k2]:
        raise SupportError("Wald estimand needs two distinct instrument values")
    return (curve.values[k1] - curve.values[k2]) / (z[k1] - z[k2])


def estimand_report(
    curve: OutcomeCurve, degree: Optional[int] = None
) -> EstimandReport:
    ate = extrapolate_ate(curve, degree) if degree is not None else None
    report = EstimandReport(
        late_tilde=late_tilde(curve),
        latt_tilde=latt_tilde(curve),
        latut_tilde=latut_tilde(curve),
        late_wald=estimand_late(curve),
        latt_direct=estimand_latt(curve),
        latut_direct=estimand_latut(curve),
        ate_extrapolated=ate,
        extrapolation_degree=degree,
        conditions=dict(IDENTIFYING_CONDITIONS),
    )
    logger.debug(
        f"Estimands: LATE={report.late_wald:.6g} LATT={report.latt_direct:.6g} "
        f"LATUT={report.latut_direct:.6g}"
    )
    return report
