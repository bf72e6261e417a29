import numpy as np
from numpy.polynomial import polynomial as P

from mtemono.core.errors import FitError
from mtemono.models.population_model import OutcomeCurve


def fit_outcome_polynomial(curve: OutcomeCurve, degree: int) -> np.ndarray:
    """Weighted least-squares polynomial through the curve points, weighted by
    the instrument law. Coefficients in increasing order."""
    if degree < 1:
        raise FitError(f"polynomial degree must be >= 1, got {degree}")
    if degree + 1 > curve.grid.size:
        raise FitError(
            f"degree {degree} fit is under-determined with {curve.grid.size} points"
        )
    # polyfit squares w, so pass sqrt of the probability weights
    return P.polyfit(
        curve.grid.z(), curve.m(), degree, w=np.sqrt(curve.grid.w())
    )


def extrapolate_ate(curve: OutcomeCurve, degree: int) -> float:
    """Integral of the fitted LIV over [0, 1], i.e. f_hat(1) - f_hat(0)."""
    coefs = fit_outcome_polynomial(curve, degree)
    return float(P.polyval(1.0, coefs) - P.polyval(0.0, coefs))
