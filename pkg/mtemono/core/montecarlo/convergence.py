import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from mtemono.core.montecarlo.empirical import empirical_estimands, report_values
from mtemono.core.montecarlo.replication import run_replications
from mtemono.core.montecarlo.sampling import sample
from mtemono.core.montecarlo.seeds import child_seeds
from mtemono.models.population_model import Population

logger = logging.getLogger(__name__)

CONVERGENCE_COLUMNS = ["n", "estimand", "mean", "sd"]


def _one_replication(
    job: Tuple[Population, int, int, Optional[int]]
) -> Dict[str, float]:
    pop, n, seed, degree = job
    return report_values(empirical_estimands(sample(pop, n, seed), degree))


def convergence_study(
    pop: Population,
    sizes: Sequence[int],
    replications: int,
    seed: int,
    workers: int = 1,
    degree: Optional[int] = None,
) -> pd.DataFrame:
    """Mean and sd of every empirical estimand across replications, per size.

    Replication r at size index i uses the child seed (seed, i, r), so the
    table does not depend on worker count or execution order.
    """
    rows = []
    for i, n in enumerate(sizes):
        jobs = [
            (pop, int(n), child, degree)
            for child in child_seeds(seed, replications, i)
        ]
        draws = run_replications(_one_replication, jobs, workers)
        for name in draws[0]:
            values = np.array([draw[name] for draw in draws])
            sd = float(values.std(ddof=1)) if replications > 1 else 0.0
            rows.append(
                {"n": int(n), "estimand": name, "mean": float(values.mean()), "sd": sd}
            )
        logger.info(f"Convergence study: n={n} done ({replications} replications)")
    return pd.DataFrame(rows, columns=CONVERGENCE_COLUMNS)


def write_convergence_csv(table: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, columns=CONVERGENCE_COLUMNS)
    return path
