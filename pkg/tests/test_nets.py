from fractions import Fraction
from math import cos, pi, sin

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entro.errors import ConfigurationError, DomainError, EmptyRegionError
from entro.nets import (
    exhaustive_max_separated,
    greedy_cover,
    is_dense,
    is_separated,
    max_separated,
    packing_bound,
    packing_constant,
    verify_pack_cov_chain,
    verify_packing_propagation,
)
from entro.spaces import Ball, Euclidean, HyperbolicPlane, RegularTree, Sphere

from oracles import max_separated_size, min_cover_size

E1 = Euclidean(1)
E2 = Euclidean(2)
T2 = RegularTree(2)


def line_points(xs):
    return [E1.point(x) for x in xs]


def tree_vertices(R, sphere=False):
    region = Sphere(T2.basepoint, R) if sphere else Ball(T2.basepoint, R)
    return [p for p in T2.sample_region(region, 1.0) if p.is_vertex]


def test_line_points_all_kept():
    net = max_separated(line_points([0, 1, 2, 3]), 0.4, E1)
    assert len(net) == 4 and net.role == "both"


def test_tree_ball_two_separated():
    pts = tree_vertices(2)
    assert len(pts) == 10
    s = T2.make_sample(pts)
    net = max_separated(s, 1.0)
    assert len(net) == 3 == max_separated_size(s.distance_matrix(), 2.0)
    assert is_separated(s, net.indices, 2.0)


@pytest.mark.parametrize("r", [0.1, 1.0, 50.0])
def test_singleton(r):
    net = max_separated(line_points([0.7]), r, E1)
    assert net.points == [E1.point(0.7)]
    assert len(greedy_cover(line_points([0.7]), r, E1)) == 1


def test_short_interval_one_center():
    assert len(greedy_cover(line_points([0, 0.5, 1]), 1.0, E1)) == 1


def test_tree_sphere_cover_pairs_siblings():
    pts = tree_vertices(3, sphere=True)
    assert len(pts) == 12
    s = T2.make_sample(pts)
    net = greedy_cover(s, 2.0)
    assert len(net) == 6 == min_cover_size(s.distance_matrix(), 2.0)


def test_hexagon_cover():
    pts = [E2.point(cos(k * pi / 3), sin(k * pi / 3)) for k in range(6)]
    s = E2.make_sample(pts)
    net = greedy_cover(s, 1.0)
    # greedy merges adjacent pairs; opposite vertices alone already cover
    assert len(net) == 3
    assert min_cover_size(s.distance_matrix(), 1.0) == 2


@pytest.mark.parametrize("fn", [max_separated, greedy_cover])
def test_empty_sample(fn):
    with pytest.raises(EmptyRegionError):
        fn([], 1.0, E1)


@pytest.mark.parametrize("fn", [max_separated, greedy_cover])
def test_nonpositive_scale(fn):
    with pytest.raises(DomainError):
        fn(line_points([0]), 0.0, E1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=12), st.floats(0.05, 2.0))
def test_greedy_nets_certify_their_roles(xs, r):
    s = E1.make_sample(line_points(xs))
    sep = max_separated(s, r)
    cov = greedy_cover(s, r)
    assert is_separated(s, sep.indices, 2 * r)
    assert is_dense(s, sep.indices, 2 * r)
    assert is_dense(s, cov.indices, r)
    D = s.distance_matrix()
    # greedy values bracket the exhaustive optima
    assert len(sep) <= max_separated_size(D, 2 * r)
    assert len(cov) >= min_cover_size(D, r)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.6, 1.0]))
def test_pack_cov_chain_random_planar(seed, r):
    rng = np.random.default_rng(seed)
    pts = [E2.point(*p) for p in rng.uniform(-3, 3, (40, 2))]
    rep = verify_pack_cov_chain(pts, r, E2)
    assert rep["holds"]


def test_chain_tree_ball():
    rep = verify_pack_cov_chain(T2.make_sample(tree_vertices(4)), 1.0)
    assert rep["pack_2r"] <= rep["cov_2r"] <= rep["pack_r"]
    assert rep["holds"]


def test_chain_line_grid():
    rep = verify_pack_cov_chain(E1.sample_region(Ball(E1.point(0.0), 5), 0.1), 0.5)
    assert rep["holds"]


def test_chain_singleton():
    rep = verify_pack_cov_chain(line_points([2.0]), 0.5, E1)
    assert (rep["pack_2r"], rep["cov_2r"], rep["pack_r"]) == (1, 1, 1)


def test_exhaustive_separated_matches_clique_oracle():
    s = T2.sample_region(Ball(T2.basepoint, 2), 0.5)
    D = s.distance_matrix()
    assert len(exhaustive_max_separated(D, 1.0)) == clique_oracle(D, 1.0)


def clique_oracle(D, sep):
    G = nx.Graph()
    G.add_nodes_from(range(len(D)))
    G.add_edges_from((i, j) for i in range(len(D)) for j in range(i) if D[i, j] > sep + 1e-12)
    return max(len(c) for c in nx.find_cliques(G))


@pytest.mark.parametrize("center,expected", [
    (T2.basepoint, 7),
    (T2.point((0,), Fraction(1, 2)), 9),
], ids=["vertex", "midpoint"])
def test_tree_packing_constant(center, expected):
    # vertices and edge midpoints of B(center, 3)
    s = T2.sample_region(Ball(center, 3), 0.5)
    assert clique_oracle(s.distance_matrix(), 2.0) == expected
    assert packing_constant(T2, centers=[center]) == expected


def test_packing_bound_cases():
    assert packing_bound(5, 1, 4, 1) == 5 * 6**3
    assert packing_bound(3, 1, 3, 1) == 3 * 4**2
    assert packing_bound(7, 1, 1, 1) == 7
    assert packing_bound(3, 1, 3, 2) == 3 * 4**2
    assert packing_bound(3, 1, 3, 2, "cov") == packing_bound(3, 1, 3, 1)


def test_line_packing_propagation():
    space = Euclidean(1, packing_params=(3, 1.0))
    rep = verify_packing_propagation(space, 3.0, 1.0)
    assert rep["pack"] == 3
    assert rep["holds"]


@pytest.mark.parametrize("R,r", [(4, 1), (3, 0.5), (5, 2), (2, 2)])
def test_tree_packing_propagation(R, r):
    rep = verify_packing_propagation(RegularTree(2, packing_params=(9, 1.0)), R, r)
    assert rep["holds"]


def test_hyperbolic_packing_propagation():
    # area sandwich: 2-separated points in B(x, 3) have disjoint unit balls inside B(x, 4)
    P0 = int((np.cosh(4) - 1) / (np.cosh(1) - 1))
    rep = verify_packing_propagation(HyperbolicPlane(packing_params=(P0, 1.0)), 3.0, 1.0)
    assert rep["holds"]


def test_missing_packing_params():
    with pytest.raises(ConfigurationError):
        verify_packing_propagation(RegularTree(2), 3, 1)


def test_net_points_are_sample_points():
    s = T2.make_sample(tree_vertices(3))
    net = greedy_cover(s, 1.0)
    assert all(p in list(s) for p in net.points)
