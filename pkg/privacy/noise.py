import numpy as np

RANDOM = "random"
ZERO_NOISE = "zero-noise"
MODES = (RANDOM, ZERO_NOISE)


class NoiseSource:
    """
    Seedable randomness shared by every mechanism of one run.

    A NoiseSource wraps a numpy Generator (PCG64) seeded from a SeedSequence.
    Identical seed, spawn path and mode give identical draw sequences.

    In zero-noise mode no randomness is consumed: Laplace draws are 0 and the
    exponential mechanism returns the smallest argmax, which turns every private
    algorithm into its deterministic skeleton for exact tests.

    A source is single-owner mutable state. Parallel trials take independent
    children from `spawn(index)`, whose seed is derived as
    SeedSequence(seed, spawn_key=path + (index,)).

    Args:
        seed (int): 64-bit seed, 0 <= seed < 2**64. Default 0.
        mode (str): "random" (default) or "zero-noise".
    """

    def __init__(self, seed: int = 0, mode: str = RANDOM, spawn_key=()):
        if not 0 <= int(seed) < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.seed = int(seed)
        self.mode = mode
        self.spawn_key = tuple(spawn_key)
        self._sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._rng = np.random.Generator(np.random.PCG64(self._sequence))

    @classmethod
    def zero_noise(cls, seed: int = 0):
        return cls(seed, mode=ZERO_NOISE)

    @property
    def is_zero_noise(self) -> bool:
        return self.mode == ZERO_NOISE

    def uniform(self) -> float:
        """One draw from U[0, 1)."""
        return float(self._rng.random())

    def uniform_array(self, size: int):
        # Generator.random(size) consumes the stream exactly like `size` scalar calls
        return self._rng.random(size)

    def spawn(self, index: int):
        """Independent child source for trial / repeat `index`; same mode."""
        if index < 0:
            raise ValueError("spawn index must be non-negative")
        return NoiseSource(self.seed, self.mode, spawn_key=self.spawn_key + (int(index),))

    def split(self, count: int) -> list:
        return [self.spawn(i) for i in range(count)]

    def __repr__(self):
        path = "/".join(str(i) for i in self.spawn_key)
        return f"NoiseSource(seed={self.seed}, mode={self.mode!r}, path={path!r})"
