"""Seeded random number generator for reproducible searches."""

from __future__ import annotations

import random
from typing import Union

Seed = Union[int, str]


class SeededRNG:
    """Wrapper around random.Random so every draw in a search comes from one seeded stream."""

    def __init__(self, seed: Seed):
        self._rng = random.Random(seed)
        self._seed = seed

    @property
    def seed(self) -> Seed:
        return self._seed

    def randrange(self, stop: int) -> int:
        return self._rng.randrange(stop)

    def random(self) -> float:
        return self._rng.random()

    def shuffle(self, seq: list) -> None:
        self._rng.shuffle(seq)

    def fork(self, label: str) -> SeededRNG:
        """Create an independent child stream with a derived, label-specific seed."""
        return SeededRNG(f"{self._seed}:{label}")
