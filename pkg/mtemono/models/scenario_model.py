from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mtemono.core.constants import CONVERSE_GAP, DEFAULT_BOOTSTRAP, NORMALIZED_TOL


class GeneratorMode(str, Enum):
    IA_FULL = "ia-full"
    EXTREME_PAIR_ONLY = "extreme-pair-only"
    BOTTOM_ANCHORED_ONLY = "bottom-anchored-only"
    TOP_ANCHORED_ONLY = "top-anchored-only"
    UNRESTRICTED = "unrestricted"
    PAIR = "pair"  # s(z_high) >= s(z_low) for one given pair


class GeneratorConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_points: int = Field(4, ge=2)
    n_strata: int = Field(8, ge=1)
    mu_low: float = -5.0
    mu_high: float = 5.0
    mode: GeneratorMode = GeneratorMode.UNRESTRICTED
    pair: Optional[Tuple[int, int]] = None  # (high index, low index)
    noise_sd: float = Field(0.0, ge=0)
    min_gap: float = Field(0.02, ge=0)  # between consecutive propensities
    weight_concentration: float = Field(2.0, gt=0)
    max_attempts: int = Field(5000, ge=1)

    @model_validator(mode="after")
    def _check(self):
        if self.mu_high < self.mu_low:
            raise ValueError("mu_high must be >= mu_low")
        if self.mode is GeneratorMode.PAIR:
            if self.pair is None:
                raise ValueError("mode 'pair' needs a (high, low) index pair")
            if self.pair[0] == self.pair[1]:
                raise ValueError("pair indices must differ")
            if not all(0 <= k < self.n_points for k in self.pair):
                raise ValueError("pair indices out of range")
        return self


class TaskName(str, Enum):
    ORACLE = "oracle"
    ESTIMANDS = "estimands"
    EXTRAPOLATE = "extrapolate"
    MONTECARLO = "montecarlo"
    THEOREM_CHECK = "theorem-check"


# Fixed execution order, independent of how the scenario lists its tasks.
TASK_ORDER = (
    TaskName.ORACLE,
    TaskName.ESTIMANDS,
    TaskName.EXTRAPOLATE,
    TaskName.MONTECARLO,
    TaskName.THEOREM_CHECK,
)

THEOREM_PARTS = ("i", "ii", "iii", "iv", "prop2")


class MonteCarloSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    reps: int = Field(1, ge=1)
    seed: Optional[int] = None
    sizes: List[int] = []  # convergence study sample sizes
    bootstrap: int = Field(DEFAULT_BOOTSTRAP, ge=0)
    workers: int = Field(1, ge=1)
    bandwidth: Optional[float] = Field(None, gt=0)  # local-linear endpoints
    split_sample: bool = True


class TheoremCheckConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    modes: List[str] = list(THEOREM_PARTS[:4])
    trials: int = Field(..., ge=1)
    seed: int
    n_points: int = Field(4, ge=3)
    n_strata: int = Field(8, ge=4)
    mu_low: float = -5.0
    mu_high: float = 5.0
    tolerance: float = Field(NORMALIZED_TOL, gt=0)
    converse_gap: float = Field(CONVERSE_GAP, gt=0)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check(self):
        unknown = [m for m in self.modes if m not in THEOREM_PARTS]
        if unknown:
            raise ValueError(f"unknown theorem parts {unknown}; use {THEOREM_PARTS}")
        if not self.modes:
            raise ValueError("at least one theorem part is required")
        return self


class Scenario(BaseModel):
    name: str = "scenario"
    population: Optional[Dict[str, Any]] = None  # inline population document
    population_file: Optional[str] = None  # relative to the scenario file
    tasks: List[TaskName]
    montecarlo: Optional[MonteCarloSettings] = None
    theorem_check: Optional[TheoremCheckConfig] = None
    extrapolation_degree: int = Field(2, ge=1)
    output_dir: str = "out"
    write_csv: bool = True
    export_sample: bool = False

    @model_validator(mode="after")
    def _check(self):
        if not self.tasks:
            raise ValueError("scenario must request at least one task")
        if len(set(self.tasks)) != len(self.tasks):
            raise ValueError("tasks must not repeat")
        if (self.population is None) == (self.population_file is None):
            raise ValueError("give exactly one of 'population' or 'population_file'")
        if TaskName.MONTECARLO in self.tasks:
            if self.montecarlo is None or self.montecarlo.seed is None:
                raise ValueError("task 'montecarlo' needs montecarlo.seed")
        if TaskName.THEOREM_CHECK in self.tasks and self.theorem_check is None:
            raise ValueError("task 'theorem-check' needs theorem_check settings")
        return self

    def ordered_tasks(self) -> List[TaskName]:
        return [t for t in TASK_ORDER if t in self.tasks]
