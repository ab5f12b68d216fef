"""Allocation, construction, uniformity checks, enumeration, text format."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmcbounds import (
    EnumerationTooLargeError,
    FiniteCell,
    FiniteTable,
    FunctionModel,
    InstanceFormatError,
    NonIntegerAllocationError,
    OutOfDomainError,
    allocation,
    construct_uniform,
    enumerate_uniform,
    equal_partition_1d,
    interval,
    is_uniform,
    load_pointset,
    make_cube_space,
    make_finite_space,
    make_partition,
    refine_partition,
    save_pointset,
    single_cell_partition,
)
from qmcbounds.pointsets import STRATEGIES, STRATEGY_RANDOM
from oracles import brute_force_uniform_configs


def two_cell_finite():
    space = make_finite_space([(str(i), 0.25) for i in range(1, 5)])
    return space, make_partition(space, [FiniteCell((0, 1)), FiniteCell((2, 3))])


def test_allocation_equal_quarters():
    # 4 equal cells, N=8: (2, 2, 2, 2)
    assert allocation(equal_partition_1d(4), 8) == (2, 2, 2, 2)


def test_allocation_infeasible_suggests_next_size():
    # 4 equal cells, N=6: 1.5 nodes per cell; smallest feasible is 8
    with pytest.raises(NonIntegerAllocationError) as err:
        allocation(equal_partition_1d(4), 6)
    assert err.value.suggested_n == 8
    assert err.value.product == 1.5


def test_allocation_finite_uneven():
    # weights (0.25, 0.75), N=4: (1, 3)
    space = make_finite_space([("a", 0.25), ("b", 0.75)])
    p = make_partition(space, [FiniteCell((0,)), FiniteCell((1,))])
    assert allocation(p, 4) == (1, 3)


def test_allocation_thirds():
    p = make_partition(
        make_cube_space(1),
        [interval(0, 1 / 3), interval(1 / 3, 2 / 3), interval(2 / 3, 1)],
    )
    assert allocation(p, 9) == (3, 3, 3)
    with pytest.raises(NonIntegerAllocationError) as err:
        allocation(p, 4)
    assert err.value.suggested_n == 6


def test_construct_midpoint_quarters():
    # 4 equal cells, N=4: nodes (0.125, 0.375, 0.625, 0.875)
    ps = construct_uniform(equal_partition_1d(4), 4, "cell-midpoint")
    assert ps.nodes == ((0.125,), (0.375,), (0.625,), (0.875,))
    assert ps.allocation == (1, 1, 1, 1)


def test_construct_equispaced_two_cells():
    # 2 equal cells, N=4: (0.125, 0.375 | 0.625, 0.875), verified uniform
    p = equal_partition_1d(2)
    ps = construct_uniform(p, 4, "per-cell-equispaced")
    assert ps.nodes == ((0.125,), (0.375,), (0.625,), (0.875,))
    assert is_uniform(ps, p)


def test_construct_finite_strategies():
    space, p = two_cell_finite()
    mid = construct_uniform(p, 4, "cell-midpoint")
    assert mid.nodes == (0, 0, 2, 2)
    eq = construct_uniform(p, 4, "per-cell-equispaced")
    assert eq.nodes == (0, 1, 2, 3)


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("k,n_points", [(1, 1), (2, 4), (4, 4), (4, 16), (8, 8)])
def test_construct_is_always_uniform_cube(strategy, k, n_points):
    p = equal_partition_1d(k)
    for seed in range(5):
        ps = construct_uniform(p, n_points, strategy, seed=seed)
        report = is_uniform(ps, p)
        assert report.ok, report


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_construct_is_always_uniform_finite(strategy):
    space, p = two_cell_finite()
    for n_points in (2, 4, 8):
        ps = construct_uniform(p, n_points, strategy, seed=1)
        assert is_uniform(ps, p)


def test_construct_seeded_random_deterministic():
    p = equal_partition_1d(4)
    a = construct_uniform(p, 8, STRATEGY_RANDOM, seed=42)
    b = construct_uniform(p, 8, STRATEGY_RANDOM, seed=42)
    c = construct_uniform(p, 8, STRATEGY_RANDOM, seed=43)
    assert a.nodes == b.nodes
    assert a.nodes != c.nodes


def test_construct_avoids_listed_points():
    p = single_cell_partition(make_cube_space(1))
    rng = random.Random(7)
    forbidden = tuple((rng.uniform(0, 1),) for _ in range(50))
    ps = construct_uniform(p, 64, STRATEGY_RANDOM, seed=7, avoid_points=forbidden)
    assert not set(ps.nodes) & set(forbidden)


def test_is_uniform_trivial_partition():
    # any nonempty point set is uniform for the one-cell partition
    p = single_cell_partition(make_cube_space(1))
    assert is_uniform([(0.1,), (0.9,), (0.3,)], p)


def test_is_uniform_counts_mismatch():
    p = equal_partition_1d(4)
    report = is_uniform([(0.1,), (0.2,), (0.3,), (0.8,)], p)
    assert not report.ok
    assert report.counts == (2, 1, 0, 1)
    assert report.expected == (1.0, 1.0, 1.0, 1.0)


def test_is_uniform_rejects_out_of_space():
    p = equal_partition_1d(2)
    with pytest.raises(OutOfDomainError):
        is_uniform([(0.1,), (1.2,)], p)


def test_is_uniform_permutation_invariant():
    p = equal_partition_1d(4)
    nodes = [(0.875,), (0.125,), (0.625,), (0.375,)]
    assert is_uniform(nodes, p)
    assert is_uniform(list(reversed(nodes)), p)


def test_uniform_for_refinement_implies_uniform_for_parent():
    # counts aggregate across split cells when the parent allocation is integral
    parent = equal_partition_1d(2)
    refined = refine_partition(
        parent, {0: [interval(0, 0.25), interval(0.25, 0.5)]}
    )
    for seed in range(5):
        ps = construct_uniform(refined, 8, STRATEGY_RANDOM, seed=seed)
        assert is_uniform(ps, refined)
        assert is_uniform(ps, parent)


def test_enumerate_two_atoms_single_cell():
    # {a: .5, b: .5}, one cell, N=2: multisets {aa, ab, bb}
    space = make_finite_space([("a", 0.5), ("b", 0.5)])
    p = single_cell_partition(space)
    stream = enumerate_uniform(space, p, 2)
    assert stream.total_count == 3
    assert list(stream) == [((0, 0),), ((0, 1),), ((1, 1),)]
    # re-iterable: a second pass yields the same configurations
    assert list(stream) == [((0, 0),), ((0, 1),), ((1, 1),)]


def test_enumerate_two_cells_product():
    # cells {1,2} and {3,4}, one node each: 2 x 2 configurations
    space, p = two_cell_finite()
    stream = enumerate_uniform(space, p, 2)
    assert stream.total_count == 4
    assert list(stream) == [
        ((0,), (2,)), ((0,), (3,)), ((1,), (2,)), ((1,), (3,)),
    ]


def test_enumerate_singleton_cells():
    # every cell a singleton: exactly one configuration
    space = make_finite_space([("a", 0.5), ("b", 0.5)])
    p = make_partition(space, [FiniteCell((0,)), FiniteCell((1,))])
    stream = enumerate_uniform(space, p, 2)
    assert stream.total_count == 1
    assert list(stream) == [((0,), (1,))]


def test_enumerate_counts_match_multichoose():
    space = make_finite_space([(f"a{i}", 0.125) for i in range(8)])
    p = make_partition(space, [FiniteCell((0, 1, 2)), FiniteCell((3, 4)),
                               FiniteCell((5, 6, 7))])
    counts = allocation(p, 8)  # (3, 2, 3)
    stream = enumerate_uniform(space, p, 8)
    expected = 1
    for cell, c in zip(p.cells, counts):
        expected *= math.comb(len(cell.atoms) + c - 1, c)
    assert stream.total_count == expected
    assert sum(1 for _ in stream) == expected


def test_enumerate_matches_brute_force():
    """Cross-check against ordered-tuple brute force on small instances."""
    cases = [
        ([("a", 0.5), ("b", 0.5)], [(0, 1)], 2),
        ([("a", 0.5), ("b", 0.5)], [(0, 1)], 4),
        ([("a", 0.25), ("b", 0.25), ("c", 0.5)], [(0, 1), (2,)], 4),
        ([(str(i), 0.25) for i in range(4)], [(0, 1), (2, 3)], 4),
    ]
    for atoms, cells, n_points in cases:
        space = make_finite_space(atoms)
        p = make_partition(space, [FiniteCell(c) for c in cells])
        counts = allocation(p, n_points)
        stream = enumerate_uniform(space, p, n_points)
        got = set(stream)
        want = brute_force_uniform_configs(space.n_atoms, [set(c) for c in cells], counts)
        assert got == want
        assert stream.total_count == len(want)


def test_enumerate_respects_cap():
    space = make_finite_space([(f"a{i}", 0.125) for i in range(8)])
    p = single_cell_partition(space)
    with pytest.raises(EnumerationTooLargeError):
        enumerate_uniform(space, p, 16, cap=100)


def test_enumerate_rejects_cube_space():
    p = equal_partition_1d(2)
    with pytest.raises(OutOfDomainError):
        enumerate_uniform(p.space, p, 2)


def test_pointset_text_roundtrip_cube(tmp_path):
    p = equal_partition_1d(4)
    ps = construct_uniform(p, 8, STRATEGY_RANDOM, seed=3)
    path = tmp_path / "nodes.txt"
    save_pointset(path, ps, p)
    back = load_pointset(path, p.space, p)
    assert back == ps.nodes


def test_pointset_text_roundtrip_finite(tmp_path):
    space, p = two_cell_finite()
    ps = construct_uniform(p, 4, "per-cell-equispaced")
    path = tmp_path / "nodes.txt"
    save_pointset(path, ps, p)
    assert load_pointset(path, space, p) == ps.nodes
    text = path.read_text()
    assert text.splitlines()[0].startswith("# qmcbounds-pointset N=4 partition=")


def test_pointset_load_rejects_wrong_partition(tmp_path):
    p4 = equal_partition_1d(4)
    p2 = equal_partition_1d(2)
    ps = construct_uniform(p4, 4)
    path = tmp_path / "nodes.txt"
    save_pointset(path, ps, p4)
    with pytest.raises(InstanceFormatError):
        load_pointset(path, p2.space, p2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10**6),
       k=st.sampled_from([1, 2, 4, 8]),
       mult=st.sampled_from([1, 2, 3]))
def test_construct_uniform_property(seed, k, mult):
    """Every constructed set passes the uniformity check."""
    p = equal_partition_1d(k)
    n_points = k * mult
    ps = construct_uniform(p, n_points, STRATEGY_RANDOM, seed=seed)
    report = is_uniform(ps, p)
    assert report.ok
    assert report.counts == ps.allocation
