from typing import List

import numpy as np


def derive_seed(seed: int, *keys: int) -> int:
    """Child seed for (seed, *keys); stable across runs and platforms."""
    state = np.random.SeedSequence([int(seed), *(int(k) for k in keys)])
    return int(state.generate_state(1, dtype=np.uint32)[0])


def child_seeds(seed: int, count: int, *keys: int) -> List[int]:
    return [derive_seed(seed, *keys, i) for i in range(count)]
