import logging

import numpy as np
import torch

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


class SeededRNG:
    """Deterministic random stream backed by numpy's PCG64.

    Every randomized operation in the package draws from one of these; torch
    generators are derived from the stream so torch-side sampling (weight init,
    dropout, shuffling) is reproducible as well.
    """

    def __init__(self, seed_sequence):
        self.seed_sequence = seed_sequence
        self.generator = np.random.Generator(np.random.PCG64(seed_sequence))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def spawn(self, count):
        return [SeededRNG(child) for child in self.seed_sequence.spawn(count)]

    def torch_generator(self):
        gen = torch.Generator()
        gen.manual_seed(int(self.generator.integers(0, 2**63 - 1)))
        return gen


def seeded_rng(seed):
    seed = int(seed) & _SEED_MASK
    logger.debug(f"Creating random stream for seed {seed}")
    return SeededRNG(np.random.SeedSequence(seed))
