"""
Loop-ordering search space: counting and enumerating distinct multiset
permutations of the LPF list, and the swap neighborhood used by annealing.
"""

from collections import Counter
from math import factorial
from typing import Iterator, List, Optional, Sequence, Tuple

from src.models.mapping import LoopOrdering
from src.models.workload import Loop
from src.utils.errors import IndexOutOfRange, SameIndex, TooShort
from src.utils.rng import SeededRNG


def _multinomial(counts: Sequence[int]) -> int:
    total = factorial(sum(counts))
    for count in counts:
        total //= factorial(count)
    return total


def count_distinct_orderings(lpfs: Sequence[Loop]) -> int:
    """n! / prod(k_i!) over the multiplicities of identical (dim, factor) loops."""
    return _multinomial(list(Counter(lpfs).values()))


def canonical_ordering(lpfs: Sequence[Loop]) -> LoopOrdering:
    """Loops sorted by dimension order then ascending factor."""
    return tuple(sorted(lpfs, key=Loop.sort_key))


def _next_permutation(keys: List[int]) -> bool:
    """Advance ``keys`` in place to the next lexicographic permutation; False at the last one."""
    j = len(keys) - 2
    while j >= 0 and keys[j] >= keys[j + 1]:
        j -= 1
    if j < 0:
        return False
    l = len(keys) - 1
    while keys[j] >= keys[l]:
        l -= 1
    keys[j], keys[l] = keys[l], keys[j]
    keys[j + 1:] = reversed(keys[j + 1:])
    return True


def _unrank(counts: List[int], rank: int) -> List[int]:
    """The rank-th lexicographic arrangement of a multiset given as key counts."""
    counts = list(counts)
    keys = []
    for _ in range(sum(counts)):
        for key, count in enumerate(counts):
            if count == 0:
                continue
            counts[key] -= 1
            block = _multinomial(counts)
            if rank < block:
                keys.append(key)
                break
            rank -= block
            counts[key] += 1
    return keys


def generate_orderings(lpfs: Sequence[Loop], start: int = 0,
                       stop: Optional[int] = None) -> Iterator[LoopOrdering]:
    """
    Yield every distinct ordering once, in lexicographic order of the canonical loop order.

    ``start``/``stop`` select a sub-range of permutation ranks so the stream can
    be split across workers; each sub-range restarts independently.
    """
    alphabet = sorted(set(lpfs), key=Loop.sort_key)
    index = {loop: key for key, loop in enumerate(alphabet)}
    counts = [0] * len(alphabet)
    for loop in lpfs:
        counts[index[loop]] += 1

    total = _multinomial(counts)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return

    keys = _unrank(counts, start)
    for rank in range(start, stop):
        yield tuple(alphabet[key] for key in keys)
        if rank + 1 < stop:
            _next_permutation(keys)


def swap_neighbor(o: LoopOrdering, i: int, j: int) -> LoopOrdering:
    """Copy of ``o`` with entries i and j exchanged."""
    n = len(o)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexOutOfRange(f"swap indices ({i}, {j}) outside ordering of length {n}")
    if i == j:
        raise SameIndex(f"swap needs two different indices, got {i} twice")
    loops = list(o)
    loops[i], loops[j] = loops[j], loops[i]
    return tuple(loops)


def sample_swap(o: LoopOrdering, rng: SeededRNG) -> Tuple[LoopOrdering, int, int]:
    """Draw i uniformly from [0, n), then j uniformly from the other n-1 indices."""
    n = len(o)
    if n < 2:
        raise TooShort(f"cannot swap within an ordering of length {n}")
    i = rng.randrange(n)
    j = rng.randrange(n - 1)
    if j >= i:
        j += 1
    return swap_neighbor(o, i, j), i, j


def random_ordering(lpfs: Sequence[Loop], rng: SeededRNG) -> LoopOrdering:
    """Uniform random shuffle of the loops."""
    loops = list(lpfs)
    rng.shuffle(loops)
    return tuple(loops)
