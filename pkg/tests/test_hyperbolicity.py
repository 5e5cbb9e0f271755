from math import exp, inf, log, pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entro.errors import DomainError, InsufficientSampleError, UnsupportedBoundaryError
from entro.hyperbolicity import (
    GromovProductTable,
    Shadow,
    boundary_gromov_product,
    boundary_triple_violations,
    estimate_delta,
    four_point_delta,
    four_point_violations,
    gromov_product,
    product_rays_violations,
    projection_violations,
    shadow_membership,
    verify_shadow_ball_lemma,
    visual_ball_membership,
)
from entro.spaces import ORIGIN, Ball, Euclidean, HyperbolicPlane, IdealPoint, RegularTree

from oracles import delta_bruteforce

T2 = RegularTree(2)
H = HyperbolicPlane()
E2 = Euclidean(2)


def test_product_vanishes_on_segment():
    x, y, z = E2.point(1, 0), E2.point(0, 0), E2.point(3, 0)
    assert gromov_product(E2, x, y, z) == 0


def test_tree_product_from_bfs_distances():
    x, y, z = T2.basepoint, T2.vertex((0, 0)), T2.vertex((1, 0))
    y2 = T2.vertex((0, 1))
    # d(y, y2) = 2, d(x, .) = 2
    assert gromov_product(T2, x, y, y2) == (2 + 2 - 2) / 2 == 1
    assert gromov_product(T2, x, y, z) == 0


@pytest.mark.parametrize("space,x,y", [
    (T2, T2.vertex((2,)), T2.vertex((0, 1, 1))),
    (H, ORIGIN, H.polar_point(2.0, 0.3)),
    (E2, E2.point(1, 1), E2.point(-2, 0.5)),
])
def test_product_with_repeated_point_is_distance(space, x, y):
    assert gromov_product(space, x, y, y) == pytest.approx(space.distance(x, y))


def test_product_table_is_symmetric():
    pts = [T2.vertex(w) for w in [(0,), (0, 1), (1, 1, 0), (2,)]]
    table = GromovProductTable.build(T2, T2.basepoint, pts)
    assert table[0, 1] == table[1, 0] == 1
    assert table[2, 3] == 0


def test_tree_delta_is_zero():
    pts = [p for p in T2.sample_region(Ball(T2.basepoint, 3), 0.5)]
    assert estimate_delta(T2, pts) == 0


def test_unit_square_delta_matches_enumeration():
    pts = [E2.point(0, 0), E2.point(1, 0), E2.point(1, 1), E2.point(0, 1)]
    s = E2.make_sample(pts)
    expected = delta_bruteforce(s.distance_matrix())
    # pair sums 2, 2 and 2 sqrt 2
    assert expected == pytest.approx(np.sqrt(2) - 1, abs=1e-12)
    assert estimate_delta(E2, s) == pytest.approx(expected, abs=1e-12)
    assert expected > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(4, 9))
def test_four_point_delta_matches_bruteforce(seed, n):
    rng = np.random.default_rng(seed)
    D = rng.uniform(1, 2, (n, n))
    D = (D + D.T) / 2
    np.fill_diagonal(D, 0)
    assert four_point_delta(D) == pytest.approx(delta_bruteforce(D), abs=1e-12)


def test_hyperbolic_random_sample_delta():
    rng = np.random.default_rng(11)
    u = rng.uniform(0, 1, 200)
    r = np.arccosh(1 + u * (np.cosh(6) - 1))
    pts = [H.polar_point(a, b) for a, b in zip(r, rng.uniform(0, 2 * pi, 200))]
    est = estimate_delta(H, pts, full_output=True)
    assert est.exhaustive and est.delta <= 1.2
    # a second draw agrees to within 0.1
    r2 = np.arccosh(1 + rng.uniform(0, 1, 200) * (np.cosh(6) - 1))
    pts2 = [H.polar_point(a, b) for a, b in zip(r2, rng.uniform(0, 2 * pi, 200))]
    assert abs(estimate_delta(H, pts2) - est.delta) <= 0.1
    assert four_point_violations(H, pts, est.delta) == 0


def test_large_sample_subsampling_is_reproducible():
    rng = np.random.default_rng(5)
    pts = [E2.point(*p) for p in rng.uniform(-2, 2, (320, 2))]
    a = estimate_delta(E2, pts, full_output=True, n_quads=5000)
    b = estimate_delta(E2, pts, full_output=True, n_quads=5000)
    assert not a.exhaustive
    assert a == b


def test_too_few_points():
    with pytest.raises(InsufficientSampleError):
        estimate_delta(E2, [E2.point(0, 0), E2.point(1, 0), E2.point(0, 1)])


# -- boundary products ----------------------------------------------------------


def test_identical_ends_have_infinite_product():
    z = T2.end((), (0,))
    assert boundary_gromov_product(T2, z, z) == inf


def test_tree_product_is_common_prefix_length():
    assert boundary_gromov_product(T2, T2.end((), (0,)), T2.end((0, 0), (1,))) == 2


def test_hyperbolic_opposite_points_product_zero():
    assert abs(boundary_gromov_product(H, IdealPoint(0.0), IdealPoint(pi))) <= 1e-6


def test_hyperbolic_product_matches_ray_limit():
    z, w, x = IdealPoint(0.4), IdealPoint(1.9), H.polar_point(0.7, 2.0)
    t = 30.0
    a, b = H.ray_point(x, z, t), H.ray_point(x, w, t)
    approx = H.gromov_product(x, a, b)
    assert boundary_gromov_product(H, z, w, x) == pytest.approx(approx, abs=1e-6)


def test_euclidean_has_no_boundary_product():
    with pytest.raises(UnsupportedBoundaryError):
        boundary_gromov_product(E2, 0, 1)


@pytest.mark.parametrize("prefix,expected", [(2, False), (4, True)])
def test_visual_ball_by_prefix_overlap(prefix, expected):
    z = T2.end((), (0,))
    w = T2.end((0,) * prefix, (1,))
    assert visual_ball_membership(T2, z, exp(-3), w) is expected


@pytest.mark.parametrize("rho", [0.0, 1.5, -0.2])
def test_visual_radius_domain(rho):
    with pytest.raises(DomainError):
        visual_ball_membership(T2, T2.end((), (0,)), rho, T2.end((), (1,)))


def test_visual_ball_contains_center():
    z = IdealPoint(1.0)
    assert visual_ball_membership(H, z, 0.01, z)


# -- shadows --------------------------------------------------------------------


def test_shadow_of_point_on_ray():
    z = IdealPoint(0.8)
    y = H.ray_point(ORIGIN, z, 3.0)
    for r in (1e-3, 0.5, 2.0):
        assert shadow_membership(H, Shadow(ORIGIN, y, r), z)


def test_tree_shadow_misses_opposite_end():
    y = T2.vertex((0, 0, 0))
    z = T2.end((), (1,))
    # the ray from the basepoint toward z passes 3 from y
    assert T2.ray_distance(y, T2.basepoint, z) == 3
    assert not shadow_membership(T2, Shadow(T2.basepoint, y, 0.5), z)


def test_shadow_ball_lemma_tree_probes():
    z = T2.end((), (0,))
    probes = []
    for k in range(32):
        bits = tuple(int(c) for c in format(k, "05b"))
        word = ((bits[0] + bits[1]) % 3,) + bits[1:]
        probes.append(T2.end(word, (bits[-1],)))
    rep = verify_shadow_ball_lemma(T2, z, T2.basepoint, 4, 1.0, probes, delta=0.0)
    assert rep["holds"]
    assert rep["probes"] == 32


def test_shadow_ball_lemma_same_end():
    z = T2.end((1,), (0,))
    rep = verify_shadow_ball_lemma(T2, z, T2.basepoint, 3, 0.5, [z], delta=0.0)
    assert rep["ball_members"] == rep["shadow_members"] == 1
    assert rep["holds"]


def test_shadow_ball_lemma_hyperbolic():
    rng = np.random.default_rng(2)
    pts = [H.polar_point(a, b) for a, b in zip(rng.uniform(0, 5, 150), rng.uniform(0, 2 * pi, 150))]
    delta = estimate_delta(H, pts)
    probes = [IdealPoint(2 * pi * k / 64) for k in range(64)]
    rep = verify_shadow_ball_lemma(H, IdealPoint(0.0), ORIGIN, 5, 0.5, probes, delta=delta)
    assert rep["holds"]


# -- further delta-hyperbolicity consequences --------------------------------------


def test_boundary_triples_tree():
    ends = [T2.end(w, c) for w in [(0,), (0, 1), (1, 0, 0), (2, 1)] for c in [(0,), (1,), (0, 1)]]
    assert boundary_triple_violations(T2, ends, T2.basepoint, 0.0) == 0


def test_boundary_triples_hyperbolic():
    ends = [IdealPoint(t) for t in np.linspace(0, 2 * pi, 24, endpoint=False)]
    assert boundary_triple_violations(H, ends, ORIGIN, log(2)) == 0


def test_close_ends_have_close_rays():
    ends = [IdealPoint(t) for t in np.linspace(0, 0.5, 12)]
    pairs = [(a, b) for a in ends for b in ends if a != b]
    rep = product_rays_violations(H, pairs, ORIGIN, 2.0, log(2) + 0.5, tol=1e-9)
    assert rep["checked"] > 0 and rep["violations"] == 0


@pytest.mark.parametrize("space", [T2, H], ids=["tree", "hyperbolic"])
def test_projection_estimate(space):
    rng = np.random.default_rng(4)
    if space is T2:
        words = [(int(rng.integers(3)),) + tuple(int(c) for c in rng.integers(0, 2, rng.integers(0, 4)))
                 for _ in range(30)]
        pts = [T2.vertex(w) for w in words]
        delta = 0.0
    else:
        pts = [H.polar_point(a, b) for a, b in zip(rng.uniform(0, 4, 30), rng.uniform(0, 2 * pi, 30))]
        delta = log(2)
    triples = [tuple(pts[i:i + 3]) for i in range(0, 27, 3)]
    triples = [t for t in triples if space.distance(t[1], t[2]) > 0]
    assert projection_violations(space, triples, delta) == 0
