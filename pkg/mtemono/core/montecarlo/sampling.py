import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from mtemono.core.constants import NORMALIZED_TOL
from mtemono.core.errors import SampleError
from mtemono.core.population.codec import population_id
from mtemono.models.population_model import InstrumentGrid, Population

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sample:
    """n agent records (z, d, y) drawn from one population."""

    z: np.ndarray
    d: np.ndarray
    y: np.ndarray
    z_index: np.ndarray  # grid index of each z
    grid: InstrumentGrid
    seed: int
    source: str  # population id
    stratum: Optional[np.ndarray] = None  # drawn stratum, when known

    def __len__(self) -> int:
        return int(self.y.shape[0])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"z": self.z, "d": self.d, "y": self.y})


def sample(pop: Population, n: int, seed: int) -> Sample:
    """Draw stratum by mass and z by the instrument law, independently; then
    d = s(z) and y = d * (mu1 + e1) + (1 - d) * (mu0 + e0) with Gaussian e."""
    if n < 1:
        raise SampleError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    strata = rng.choice(len(pop.strata), size=n, p=pop.masses())
    z_index = rng.choice(pop.grid.size, size=n, p=pop.grid.w())
    d = pop.patterns().astype(np.int8)[strata, z_index]

    sd0 = np.array([s.noise_sd0 for s in pop.strata])[strata]
    sd1 = np.array([s.noise_sd1 for s in pop.strata])[strata]
    e0 = rng.standard_normal(n) * sd0
    e1 = rng.standard_normal(n) * sd1
    y = np.where(d == 1, pop.mu1()[strata] + e1, pop.mu0()[strata] + e0)

    return Sample(
        z=pop.grid.z()[z_index],
        d=d,
        y=y,
        z_index=z_index,
        grid=pop.grid,
        seed=seed,
        source=population_id(pop),
        stratum=strata,
    )


def write_sample_csv(data: Sample, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data.to_frame().to_csv(path, index=False)
    logger.info(f"Wrote {len(data)} records to {path}")
    return path


def read_sample_csv(
    path: Union[str, Path], pop: Population, seed: int = 0
) -> Sample:
    """Load a "z,d,y" CSV whose z values are grid points of ``pop``."""
    frame = pd.read_csv(path)
    missing = [c for c in ("z", "d", "y") if c not in frame.columns]
    if missing:
        raise SampleError(f"{path}: missing column '{missing[0]}'")
    z = frame["z"].to_numpy(dtype=float)
    points = pop.grid.z()
    idx = np.abs(z[:, None] - points[None, :]).argmin(axis=1)
    off_grid = np.abs(points[idx] - z) > NORMALIZED_TOL
    if off_grid.any():
        bad = z[np.flatnonzero(off_grid)[0]]
        raise SampleError(f"{path}: z = {bad!r} is not a grid point")
    d = frame["d"].to_numpy()
    if not np.isin(d, (0, 1)).all():
        raise SampleError(f"{path}: d must be 0/1")
    return Sample(
        z=points[idx],
        d=d.astype(np.int8),
        y=frame["y"].to_numpy(dtype=float),
        z_index=idx,
        grid=pop.grid,
        seed=seed,
        source=population_id(pop),
    )
