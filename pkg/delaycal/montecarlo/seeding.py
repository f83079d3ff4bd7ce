"""
Trial seed derivation.

seed_i = first 64-bit word of numpy SeedSequence(entropy=master_seed,
spawn_key=(i,)).generate_state(1, uint64). SeedSequence hashes entropy and
spawn key together, so the mapping is portable across machines and numpy
versions that keep the documented SeedSequence algorithm. Each trial draws
from Generator(Philox(seed_i)), a counter-based bit generator.
"""

import numpy as np


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def trial_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))
