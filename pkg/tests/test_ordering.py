"""
Tests for ordering-space counting, enumeration and the swap neighborhood.
"""

import itertools
import math
from collections import Counter

import pytest

from src.models.workload import Loop
from src.services.ordering import (
    canonical_ordering,
    count_distinct_orderings,
    generate_orderings,
    random_ordering,
    sample_swap,
    swap_neighbor,
)
from src.utils.errors import IndexOutOfRange, SameIndex, TooShort
from src.utils.rng import SeededRNG

POOL = [Loop("K", 2), Loop("K", 3), Loop("C", 2), Loop("OY", 2), Loop("FX", 3)]


def _random_multisets(count, seed, max_n=8):
    rng = SeededRNG(seed)
    for _ in range(count):
        n = 1 + rng.randrange(max_n)
        yield [POOL[rng.randrange(len(POOL))] for _ in range(n)]


def test_count_matches_brute_force_dedup():
    """n! / prod(k!) equals the number of distinct permutations for n <= 8."""
    for lpfs in _random_multisets(60, seed=3):
        assert count_distinct_orderings(lpfs) == len(set(itertools.permutations(lpfs)))


def test_count_examples():
    assert count_distinct_orderings([]) == 1
    assert count_distinct_orderings([Loop("K", 2)] * 5) == 1
    assert count_distinct_orderings([Loop("K", 2), Loop("K", 2), Loop("C", 2), Loop("C", 2)]) == 6
    # 22 prime factors of a 64x64x16x16x3x3 convolution
    lpfs = [Loop("K", 2)] * 6 + [Loop("C", 2)] * 6 + [Loop("OY", 2)] * 4 + [Loop("OX", 2)] * 4 \
        + [Loop("FY", 3), Loop("FX", 3)]
    assert count_distinct_orderings(lpfs) == 3764255695200


def test_generate_orderings_enumerates_each_ordering_once():
    for lpfs in _random_multisets(20, seed=11, max_n=7):
        orderings = list(generate_orderings(lpfs))
        assert len(orderings) == count_distinct_orderings(lpfs)
        assert len(set(orderings)) == len(orderings)
        assert set(orderings) == set(itertools.permutations(lpfs))


def test_generate_orderings_starts_canonical_and_is_sorted():
    lpfs = [Loop("C", 2), Loop("K", 2), Loop("C", 2), Loop("K", 3)]
    orderings = list(generate_orderings(lpfs))
    assert orderings[0] == canonical_ordering(lpfs)
    keys = [tuple(loop.sort_key() for loop in ordering) for ordering in orderings]
    assert keys == sorted(keys)


def test_generate_orderings_split_ranges_concatenate():
    lpfs = [Loop("K", 2), Loop("K", 2), Loop("C", 2), Loop("OY", 3), Loop("OY", 3), Loop("FX", 3)]
    full = list(generate_orderings(lpfs))
    pieces = []
    for start in range(0, len(full), 7):
        pieces.extend(generate_orderings(lpfs, start, start + 7))
    assert pieces == full
    assert list(generate_orderings(lpfs, len(full), len(full) + 5)) == []


def test_generate_orderings_empty_list():
    assert list(generate_orderings([])) == [()]


def test_canonical_ordering():
    lpfs = [Loop("FX", 3), Loop("K", 3), Loop("C", 2), Loop("K", 2)]
    assert canonical_ordering(lpfs) == (Loop("K", 2), Loop("K", 3), Loop("C", 2), Loop("FX", 3))


def test_swap_neighbor():
    o = (Loop("K", 2), Loop("C", 2), Loop("OY", 3))
    assert swap_neighbor(o, 0, 2) == (Loop("OY", 3), Loop("C", 2), Loop("K", 2))
    assert sorted(swap_neighbor(o, 1, 2)) == sorted(o)


def test_swap_neighbor_errors():
    o = (Loop("K", 2), Loop("C", 2))
    with pytest.raises(IndexOutOfRange):
        swap_neighbor(o, 0, 2)
    with pytest.raises(IndexOutOfRange):
        swap_neighbor(o, -1, 1)
    with pytest.raises(SameIndex):
        swap_neighbor(o, 1, 1)


def test_sample_swap_draws_distinct_indices():
    o = tuple(POOL)
    rng = SeededRNG(5)
    for _ in range(200):
        candidate, i, j = sample_swap(o, rng)
        assert i != j
        assert candidate == swap_neighbor(o, i, j)


def test_sample_swap_too_short():
    with pytest.raises(TooShort):
        sample_swap((Loop("K", 2),), SeededRNG(0))


def test_random_ordering_is_seeded_permutation():
    a = random_ordering(POOL, SeededRNG(9))
    b = random_ordering(POOL, SeededRNG(9))
    assert a == b
    assert sorted(a) == sorted(POOL)


def test_sample_swap_pairs_are_uniform():
    """Over 10^5 draws on four loops, each of the six pairs turns up about 1/6 of the time."""
    o = (Loop("K", 2), Loop("C", 2), Loop("OY", 3), Loop("FX", 3))
    rng = SeededRNG(21)
    draws = 100_000
    counts = Counter()
    for _ in range(draws):
        _, i, j = sample_swap(o, rng)
        counts[frozenset((i, j))] += 1

    assert len(counts) == 6
    expected = draws / 6
    sigma = math.sqrt(draws * (1 / 6) * (5 / 6))
    assert all(abs(count - expected) < 4 * sigma for count in counts.values())
    # chi-square with 5 degrees of freedom, p = 0.001
    assert sum((count - expected) ** 2 / expected for count in counts.values()) < 20.52


def test_random_ordering_is_uniform():
    """Over 10^5 shuffles of three unique loops, each of the six orderings turns up about 1/6 of the time."""
    lpfs = [Loop("K", 2), Loop("C", 3), Loop("FX", 5)]
    rng = SeededRNG(13)
    draws = 100_000
    counts = Counter(random_ordering(lpfs, rng) for _ in range(draws))

    assert len(counts) == 6
    expected = draws / 6
    sigma = math.sqrt(draws * (1 / 6) * (5 / 6))
    assert all(abs(count - expected) < 4 * sigma for count in counts.values())
    assert sum((count - expected) ** 2 / expected for count in counts.values()) < 20.52


def _neighbors(o):
    return {swap_neighbor(o, i, j) for i in range(len(o)) for j in range(i + 1, len(o))}


def test_every_ordering_reachable_within_n_minus_one_swaps():
    """Breadth-first search over swap neighbors reaches every permutation by depth n - 1."""
    for lpfs in (POOL[:3], POOL[:4], POOL, [Loop("K", 2), Loop("K", 2), Loop("C", 2), Loop("C", 3)]):
        start = canonical_ordering(lpfs)
        depth = {start: 0}
        frontier = [start]
        while frontier:
            following = []
            for o in frontier:
                for neighbor in _neighbors(o):
                    if neighbor not in depth:
                        depth[neighbor] = depth[o] + 1
                        following.append(neighbor)
            frontier = following
        assert set(depth) == set(itertools.permutations(lpfs))
        assert max(depth.values()) <= len(lpfs) - 1


def test_neighborhood_size():
    """n(n-1)/2 distinct neighbors for unique loops, fewer when loops repeat."""
    for n in range(2, 7):
        unique = tuple(Loop(dim, 2) for dim in ("B", "K", "C", "OY", "OX", "FY")[:n])
        assert len(_neighbors(unique)) == n * (n - 1) // 2
    for lpfs in _random_multisets(30, seed=17, max_n=6):
        if len(lpfs) < 2:
            continue
        o = canonical_ordering(lpfs)
        neighbors = _neighbors(o) - {o}
        n = len(o)
        assert len(neighbors) <= n * (n - 1) // 2
        if len(set(o)) == n:
            assert len(neighbors) == n * (n - 1) // 2
