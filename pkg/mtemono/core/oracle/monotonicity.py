from typing import List, Optional, Sequence, Tuple

from mtemono.core.constants import MASS_THRESHOLD
from mtemono.models.population_model import Population
from mtemono.models.report_model import MonotonicityKind, MonotonicityReport, Witness

# Conditions from strongest to weakest; each implies the ones that follow it
# on its own branch (ia_full => bottom/top anchored => extreme_pair).
KINDS = (
    MonotonicityKind.IA_FULL,
    MonotonicityKind.BOTTOM_ANCHORED,
    MonotonicityKind.TOP_ANCHORED,
    MonotonicityKind.EXTREME_PAIR,
)


def violations(
    pattern: Sequence[int],
    kind: MonotonicityKind,
    pair: Optional[Tuple[int, int]] = None,
) -> List[Tuple[int, int]]:
    """Index pairs (a, b) at which the pattern breaks the condition.

    For the ordered kinds a < b and the pattern is treated at a but not at b.
    For ``pair`` = (k1, k2) the condition is s(z_k1) >= s(z_k2) and the
    witness is (k1, k2) itself.
    """
    last = len(pattern) - 1
    if kind is MonotonicityKind.IA_FULL:
        return [
            (a, b)
            for a in range(last + 1)
            for b in range(a + 1, last + 1)
            if pattern[a] > pattern[b]
        ]
    if kind is MonotonicityKind.EXTREME_PAIR:
        return [(0, last)] if pattern[0] > pattern[last] else []
    if kind is MonotonicityKind.BOTTOM_ANCHORED:
        return [(0, b) for b in range(1, last + 1) if pattern[0] > pattern[b]]
    if kind is MonotonicityKind.TOP_ANCHORED:
        return [(a, last) for a in range(last) if pattern[a] > pattern[last]]
    if kind is MonotonicityKind.PAIR:
        if pair is None:
            raise ValueError("pair monotonicity needs a (k1, k2) pair")
        k1, k2 = pair
        return [(k1, k2)] if pattern[k2] > pattern[k1] else []
    raise ValueError(f"unknown monotonicity kind {kind!r}")


def satisfies(
    pattern: Sequence[int],
    kind: MonotonicityKind,
    pair: Optional[Tuple[int, int]] = None,
) -> bool:
    return not violations(pattern, kind, pair)


def check_monotonicity(
    pop: Population,
    kind: MonotonicityKind,
    pair: Optional[Tuple[int, int]] = None,
) -> MonotonicityReport:
    kind = MonotonicityKind(kind)
    if kind is MonotonicityKind.PAIR:
        if pair is None:
            raise ValueError("pair monotonicity needs a (k1, k2) pair")
        for k in pair:
            if not 0 <= k < pop.grid.size:
                raise IndexError(f"grid index {k} out of range")
    witnesses = []
    for i, stratum in enumerate(pop.strata):
        # zero-mass strata are not part of the type set
        if stratum.mass <= MASS_THRESHOLD:
            continue
        for indices in violations(stratum.response.pattern, kind, pair):
            witnesses.append(Witness(stratum=i, indices=indices))
    return MonotonicityReport(
        kind=kind,
        pair=tuple(pair) if kind is MonotonicityKind.PAIR else None,
        holds=not witnesses,
        witnesses=witnesses,
    )


def monotonicity_summary(pop: Population) -> List[MonotonicityReport]:
    return [check_monotonicity(pop, kind) for kind in KINDS]
