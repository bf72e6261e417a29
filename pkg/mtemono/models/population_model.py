import math
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from mtemono.core.constants import EXACT_TOL, NORMALIZED_TOL


class InterpolationRule(str, Enum):
    PIECEWISE_LINEAR = "piecewise_linear"


class InstrumentGrid(BaseModel):
    """Ordered instrument values together with the law of Z on them."""

    model_config = ConfigDict(frozen=True)

    points: Tuple[float, ...]  # strictly increasing
    weights: Tuple[float, ...]  # Pr[Z = z_k]

    @model_validator(mode="after")
    def _check(self):
        if len(self.points) < 2:
            raise ValueError("instrument grid needs at least 2 points")
        if len(self.weights) != len(self.points):
            raise ValueError(
                f"grid has {len(self.points)} points but {len(self.weights)} weights"
            )
        if not all(math.isfinite(p) for p in self.points):
            raise ValueError("grid points must be finite")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ValueError("grid points must be strictly increasing")
        if any(not w > 0 for w in self.weights):
            raise ValueError("every instrument weight must be > 0")
        total = math.fsum(self.weights)
        if abs(total - 1.0) > EXACT_TOL:
            raise ValueError(f"instrument weights sum to {total!r}, not 1")
        return self

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def low(self) -> float:
        return self.points[0]

    @property
    def high(self) -> float:
        return self.points[-1]

    def z(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def w(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def mean(self) -> float:
        return float(self.w() @ self.z())

    def survival(self) -> np.ndarray:
        # Pr[Z > u] on each open segment (z_k, z_{k+1}); right-continuous at knots.
        w = self.w()
        return np.array([w[k + 1 :].sum() for k in range(self.size - 1)])

    def cdf_below(self) -> np.ndarray:
        # Pr[Z < u] on each open segment (z_k, z_{k+1}).
        w = self.w()
        return np.array([w[: k + 1].sum() for k in range(self.size - 1)])


class ResponseType(BaseModel):
    """The map s(z): treatment taken at each grid index."""

    model_config = ConfigDict(frozen=True)

    pattern: Tuple[int, ...]

    @model_validator(mode="after")
    def _check(self):
        if any(v not in (0, 1) for v in self.pattern):
            raise ValueError(f"response pattern {self.pattern} is not 0/1")
        return self

    def __len__(self) -> int:
        return len(self.pattern)

    @property
    def label(self) -> str:
        return "".join(str(v) for v in self.pattern)


class StratumSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    response: ResponseType
    mass: float
    mu0: float  # E[Y(0) | S = s]
    mu1: float  # E[Y(1) | S = s]
    noise_sd0: float = 0.0
    noise_sd1: float = 0.0

    @model_validator(mode="after")
    def _check(self):
        if not self.mass >= 0:
            raise ValueError(f"stratum mass {self.mass!r} is negative")
        if not (self.noise_sd0 >= 0 and self.noise_sd1 >= 0):
            raise ValueError("noise standard deviations must be nonnegative")
        values = (self.mass, self.mu0, self.mu1, self.noise_sd0, self.noise_sd1)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("stratum fields must be finite")
        return self

    @property
    def effect(self) -> float:
        return self.mu1 - self.mu0


class Population(BaseModel):
    """A finite mixture of response-type strata over an instrument grid."""

    model_config = ConfigDict(frozen=True)

    grid: InstrumentGrid
    strata: Tuple[StratumSpec, ...]
    normalized: bool = False

    @model_validator(mode="after")
    def _check(self):
        if not self.strata:
            raise ValueError("population has no strata")
        for i, stratum in enumerate(self.strata):
            if len(stratum.response) != self.grid.size:
                raise ValueError(
                    f"stratum {i} pattern has length {len(stratum.response)}, "
                    f"grid has {self.grid.size} points"
                )
        total = math.fsum(s.mass for s in self.strata)
        if abs(total - 1.0) > EXACT_TOL:
            raise ValueError(f"stratum masses sum to {total!r}, not 1")
        if self.normalized:
            p = self.propensities()
            if np.any(np.abs(p - self.grid.z()) > NORMALIZED_TOL):
                raise ValueError("normalized population has p(z) != z")
            if np.any(p < -NORMALIZED_TOL) or np.any(p > 1 + NORMALIZED_TOL):
                raise ValueError("propensities outside [0, 1]")
        return self

    def masses(self) -> np.ndarray:
        return np.array([s.mass for s in self.strata], dtype=float)

    def patterns(self) -> np.ndarray:
        # strata x grid matrix of 0/1 treatment choices
        return np.array([s.response.pattern for s in self.strata], dtype=float)

    def mu0(self) -> np.ndarray:
        return np.array([s.mu0 for s in self.strata], dtype=float)

    def mu1(self) -> np.ndarray:
        return np.array([s.mu1 for s in self.strata], dtype=float)

    def effects(self) -> np.ndarray:
        return self.mu1() - self.mu0()

    def propensities(self) -> np.ndarray:
        return self.masses() @ self.patterns()

    def treated_shares(self) -> np.ndarray:
        # Pr[D = 1 | S = s] for every stratum
        return self.patterns() @ self.grid.w()


class OutcomeCurve(BaseModel):
    """m(u) = E[Y | Z = u] tabulated on a normalized grid."""

    model_config = ConfigDict(frozen=True)

    grid: InstrumentGrid
    values: Tuple[float, ...]
    interpolation: InterpolationRule = InterpolationRule.PIECEWISE_LINEAR

    @model_validator(mode="after")
    def _check(self):
        if len(self.values) != self.grid.size:
            raise ValueError(
                f"curve has {len(self.values)} values for {self.grid.size} points"
            )
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("outcome curve values must be finite")
        z = self.grid.z()
        if z[0] < -NORMALIZED_TOL or z[-1] > 1 + NORMALIZED_TOL:
            raise ValueError("outcome curve grid is not a propensity grid")
        return self

    def m(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def mean_outcome(self) -> float:
        # E[Y] by the law of total probability over Z
        return float(self.grid.w() @ self.m())

    def at(self, u: float) -> float:
        return float(np.interp(u, self.grid.z(), self.m()))
