import numpy as np

from mtemono.core.errors import SampleError
from mtemono.core.montecarlo.sampling import Sample


def triangular_kernel(u: np.ndarray) -> np.ndarray:
    return np.clip(1.0 - np.abs(u), 0.0, None)


def local_linear_mean(data: Sample, z0: float, bandwidth: float) -> float:
    """Intercept at z0 of a triangular-kernel weighted line fit of y on z.

    Records sharing a grid point share a kernel weight, so the fit runs on
    per-point means weighted by kernel weight times count; the coefficients
    are those of the record-level fit.
    """
    if not bandwidth > 0:
        raise SampleError(f"bandwidth must be positive, got {bandwidth!r}")
    points = data.grid.z()
    counts = np.bincount(data.z_index, minlength=points.size).astype(float)
    sums = np.bincount(data.z_index, weights=data.y, minlength=points.size)

    x = points - z0
    weights = triangular_kernel(x / bandwidth) * counts
    mask = weights > 0
    if mask.sum() < 2:
        raise SampleError(
            f"fewer than 2 observed instrument values within {bandwidth!r} of {z0!r}"
        )
    x, w = x[mask], weights[mask]
    y = sums[mask] / counts[mask]

    X = np.column_stack([np.ones_like(x), x])
    sw = np.sqrt(w)
    beta, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    return float(beta[0])
