from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class MonotonicityKind(str, Enum):
    IA_FULL = "ia_full"
    EXTREME_PAIR = "extreme_pair"
    BOTTOM_ANCHORED = "bottom_anchored"
    TOP_ANCHORED = "top_anchored"
    PAIR = "pair"


class Witness(BaseModel):
    model_config = ConfigDict(frozen=True)

    stratum: int
    indices: Tuple[int, int]


class MonotonicityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: MonotonicityKind
    pair: Optional[Tuple[int, int]] = None  # (k1, k2) for kind == pair
    holds: bool
    witnesses: List[Witness] = []

    @model_validator(mode="after")
    def _check(self):
        if self.holds != (not self.witnesses):
            raise ValueError("holds must be true exactly when there are no witnesses")
        return self


class TrueParams(BaseModel):
    """Oracle values. A parameter is None when its conditioning mass is zero."""

    model_config = ConfigDict(frozen=True)

    late: Optional[float] = None
    latt: Optional[float] = None
    latut: Optional[float] = None
    ate: float
    complier_mass: float
    treated_complier_mass: float
    untreated_complier_mass: float


class StratumWeight(BaseModel):
    model_config = ConfigDict(frozen=True)

    stratum: int
    pattern: str
    mass: float
    effect: float
    weight: float


class PairDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True)

    k1: int
    k2: int
    complier_mass: float
    defier_mass: float
    complier_effect: Optional[float] = None
    defier_effect: Optional[float] = None
    wald: float


class InteriorTypes(BaseModel):
    model_config = ConfigDict(frozen=True)

    mass: float
    effect: Optional[float] = None
    strata: List[int] = []


class MteSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    u_low: float
    u_high: float
    mte: float
    liv: float


class EstimandReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    late_tilde: float
    latt_tilde: float
    latut_tilde: float
    late_wald: float
    latt_direct: float
    latut_direct: float
    ate_extrapolated: Optional[float] = None
    extrapolation_degree: Optional[int] = None
    conditions: Dict[str, MonotonicityKind] = {}


class ComparisonRow(BaseModel):
    name: str
    value: Optional[float] = None
    condition: Optional[str] = None
    condition_holds: Optional[bool] = None
    true_value: Optional[float] = None
    gap: Optional[float] = None


class SplitSampleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    low_z: float
    high_z: float
    low_propensity: float
    high_propensity: float
    low_mean: float
    high_mean: float
    propensity_gap: float  # held-out half
    naive_gap: float  # full sample, max minus min
    wald_late: Optional[float] = None


class SplitSampleStudy(BaseModel):
    replications: int
    naive_gap_mean: float
    naive_gap_se: float
    split_gap_mean: float
    split_gap_se: float


class PartResult(BaseModel):
    part: str
    forward_trials: int
    forward_max_gap: float
    forward_passed: bool
    converse_status: str  # "found", "inconclusive"
    converse_draws: int
    converse_gap: Optional[float] = None
    seeded: bool = False  # witness came from a supplied fixture
    witness_file: Optional[str] = None
