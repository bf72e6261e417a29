"""LIV on a piecewise-linear outcome curve and its exact integrals.

Between knots the curve is linear, so LIV is a step function and every
integral below is a finite sum over segments rather than a quadrature.
"""
import numpy as np

from mtemono.core.constants import NORMALIZED_TOL
from mtemono.core.errors import SupportError
from mtemono.models.population_model import OutcomeCurve


def segment_slopes(curve: OutcomeCurve) -> np.ndarray:
    z, m = curve.grid.z(), curve.m()
    return np.diff(m) / np.diff(z)


def liv(curve: OutcomeCurve, u: float) -> float:
    """dE[Y | Z = u]/du. At an interior knot the right-segment slope is used,
    at the top of the support the left one."""
    z = curve.grid.z()
    if not (z[0] - NORMALIZED_TOL <= u <= z[-1] + NORMALIZED_TOL):
        raise SupportError(f"u = {u!r} outside support [{z[0]!r}, {z[-1]!r}]")
    k = int(np.searchsorted(z, u, side="right")) - 1
    k = min(max(k, 0), len(z) - 2)
    return float(segment_slopes(curve)[k])


def liv_integral(curve: OutcomeCurve) -> float:
    """Integral of LIV over [z_low, z_high]."""
    return float(segment_slopes(curve) @ np.diff(curve.grid.z()))


def survival_weighted_liv_integral(curve: OutcomeCurve) -> float:
    """Integral of Pr[Z > u] * LIV(u) over the support."""
    increments = segment_slopes(curve) * np.diff(curve.grid.z())
    return float(curve.grid.survival() @ increments)


def cdf_weighted_liv_integral(curve: OutcomeCurve) -> float:
    """Integral of Pr[Z < u] * LIV(u) over the support."""
    increments = segment_slopes(curve) * np.diff(curve.grid.z())
    return float(curve.grid.cdf_below() @ increments)


def avg_liv_range(curve: OutcomeCurve, u_low: float, u_high: float) -> float:
    """Mean of LIV over [u_low, u_high]; equals the Wald slope between the
    interpolated endpoints."""
    z = curve.grid.z()
    if not u_low < u_high:
        raise SupportError(f"empty or inverted range [{u_low!r}, {u_high!r}]")
    if u_low < z[0] - NORMALIZED_TOL or u_high > z[-1] + NORMALIZED_TOL:
        raise SupportError(
            f"range [{u_low!r}, {u_high!r}] outside support [{z[0]!r}, {z[-1]!r}]"
        )
    lo = np.clip(z[:-1], u_low, u_high)
    hi = np.clip(z[1:], u_low, u_high)
    area = float(segment_slopes(curve) @ (hi - lo))
    return area / (u_high - u_low)
