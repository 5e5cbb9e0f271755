"""End-to-end acceptance criteria AC1 to AC10.

Each test records a single PASS or FAIL line through the ``report``
fixture, and the lines are repeated in the terminal summary.
"""

import hashlib
import json
import time
from math import cosh, log, pi, tau

import numpy as np

from entro.boundary_sets import (
    full_boundary,
    letter_subset,
    relative_covering_growth,
    relative_flow_growth,
    relative_measure_growth,
    relative_minkowski_growth,
)
from entro.cli import main
from entro.entropy import (
    covering_growth,
    fit_entropy,
    measure_growth,
    natural_measure,
    sphere_covering_growth,
    verify_entropy_upper_bound,
)
from entro.flow import EXP_HALF, f_distance, flow_entropy_series, generate_line_family, verify_key_lemma, \
    verify_no_recurrence
from entro.hyperbolicity import four_point_violations, verify_shadow_ball_lemma
from entro.nets import verify_pack_cov_chain, verify_packing_propagation
from entro.spaces import ORIGIN, Ball, Euclidean, HyperbolicPlane, IdealPoint, RegularTree

from oracles import tree_ball_length

LOG2 = log(2)
T2 = RegularTree(2, packing_params=(9, 1.0))
T3 = RegularTree(3)
H = HyperbolicPlane()
E1 = Euclidean(1, packing_params=(3, 1.0))
E2 = Euclidean(2)
hyp_area = lambda R: 2 * pi * (cosh(R) - 1)
# disjoint unit balls about 2-separated points of B(x, 3) fill at most B(x, 4)
H_PACKED = HyperbolicPlane(packing_params=(int(hyp_area(4) / hyp_area(1)), 1.0))
E2_PACKED = Euclidean(2, packing_params=(16, 1.0))


def slope(series, window):
    return fit_entropy(series, window).slope


def spread(values):
    return max(values) - min(values)


def fmt(d):
    return ", ".join(f"{k}={v:.4f}" for k, v in d.items())


def random_lines(space, rng, n):
    if space is T2:
        def end():
            w = (int(rng.integers(3)),) + tuple(int(c) for c in rng.integers(0, 2, rng.integers(0, 4)))
            return T2.end(w, tuple(int(c) for c in rng.integers(0, 2, rng.integers(1, 3))))
        out = []
        while len(out) < n:
            a, b = end(), end()
            if a != b:
                out.append(T2.line_from_boundary_pair(a, b))
        return out
    if space is H:
        out = []
        for _ in range(n):
            a = rng.uniform(0, tau)
            out.append(H.line_from_boundary_pair(IdealPoint(a), IdealPoint(a + rng.uniform(0.2, tau - 0.2))))
        return out
    out = []
    while len(out) < n:
        x, y = rng.uniform(-3, 3, (2, 2))
        if np.linalg.norm(x - y) > 1e-3:
            out.append(E2.extend_to_line(E2.point(*x), E2.point(*y)))
    return out


def test_ac1_tree_covering_entropy(report):
    t0 = time.perf_counter()
    s = covering_growth(T2, T2.basepoint, 0.5, range(2, 13), witness=False)
    elapsed = time.perf_counter() - t0
    est = fit_entropy(s).slope
    # a 0.5-ball has length at most 1.5, and disjoint 0.25-balls have length at least 0.5
    sandwich = all(tree_ball_length(2, T) / 1.5 <= v <= 3 * (2 ** (T + 0.25) - 1) / 0.5
                   for T, v in zip(range(2, 13), s.values))
    ok = abs(est - LOG2) < 0.05 and sandwich and elapsed < 60
    assert report("AC1", ok, f"slope={est:.4f} target={LOG2:.4f} sandwich={sandwich} time={elapsed:.1f}s")


def test_ac2_hyperbolic_covering_entropy(report):
    r = 1.0
    t0 = time.perf_counter()
    s = covering_growth(H, ORIGIN, r, range(2, 11), witness=False)
    elapsed = time.perf_counter() - t0
    est = fit_entropy(s).slope
    sandwich = all(hyp_area(T) / hyp_area(2 * r) <= v <= hyp_area(T + r) / hyp_area(r / 2)
                   for T, v in s.samples)
    ok = abs(est - 1.0) < 0.1 and sandwich and elapsed < 120
    assert report("AC2", ok, f"slope={est:.4f} target=1 sandwich={sandwich} time={elapsed:.1f}s")


def test_ac3_euclidean_null_case(report):
    # polynomial growth c T^k has log-slope near k / T, so the window sits far out
    T = np.arange(60, 121, 10)
    x = E2.point(0, 0)
    slopes = {
        "covering": slope(covering_growth(E2, x, 4.0, T, witness=False), "full"),
        "volume": slope(measure_growth(E2, natural_measure(E2), x, T), "full"),
        "flow": slope(flow_entropy_series(E2, 1.0, T), "full"),
    }
    ok = all(abs(v) < 0.05 for v in slopes.values())
    assert report("AC3", ok, fmt(slopes) + " window=[60,120]")


def test_ac4_tree_equalities(report):
    T = range(2, 13)
    x = T2.basepoint
    W = (6, 12)
    slopes = {
        "covering": slope(covering_growth(T2, x, 0.5, T, witness=False), W),
        "sphere": slope(sphere_covering_growth(T2, x, 0.5, T), W),
        "volume": slope(measure_growth(T2, natural_measure(T2), x, T), W),
        "minkowski": slope(relative_minkowski_growth(T2, full_boundary(T2), None, T), W),
        "flow": slope(flow_entropy_series(T2, 1.0, T), W),
    }
    ok = spread(slopes.values()) < 0.1 and all(abs(v - LOG2) < 0.1 for v in slopes.values())
    assert report("AC4", ok, fmt(slopes) + f" spread={spread(slopes.values()):.4f}")


def test_ac5_hyperbolic_equalities(report):
    T = range(2, 9)
    W = (4, 8)
    t0 = time.perf_counter()
    slopes = {
        "covering": slope(covering_growth(H, ORIGIN, 1.0, T, witness=False), W),
        "volume": slope(measure_growth(H, natural_measure(H), ORIGIN, T), W),
        "minkowski": slope(relative_minkowski_growth(H, full_boundary(H), None, T), W),
        "flow": slope(flow_entropy_series(H, 1.0, T), W),
    }
    elapsed = time.perf_counter() - t0
    ok = spread(slopes.values()) < 0.15 and elapsed < 600
    assert report("AC5", ok, fmt(slopes) + f" spread={spread(slopes.values()):.4f} time={elapsed:.1f}s")


def test_ac6_relative_entropies(report):
    C = letter_subset(T3, (0, 1))
    T = range(2, 13)
    W = (6, 12)
    rel = {
        "covering": slope(relative_covering_growth(T3, C, None, 1.0, T, 1.0), W),
        "minkowski": slope(relative_minkowski_growth(T3, C, None, T), W),
        "measure": slope(relative_measure_growth(T3, C, None, None, 1.0, T), W),
        "flow": slope(relative_flow_growth(T3, C, EXP_HALF, 1.0, T), W),
    }
    # the ambient ball grows like 3^T, so its grid stops earlier
    ambient = slope(covering_growth(T3, T3.basepoint, 0.5, range(2, 10), witness=False), "upper-half")
    gap = ambient - max(rel.values())
    ok = all(abs(v - LOG2) < 0.1 for v in rel.values()) and abs(ambient - log(3)) < 0.05 and gap >= 0.3
    assert report("AC6", ok, fmt(rel) + f", ambient={ambient:.4f} gap={gap:.4f}")


def _random_regions(n, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        r = float(rng.choice([0.5, 1.0, 1.5]))
        if k % 3 == 0:
            c = rng.uniform(-3, 3, 2)
            rad = rng.uniform(1, 4)
            m = int(rng.integers(10, 60))
            ang = rng.uniform(0, tau, m)
            rho = rad * np.sqrt(rng.uniform(0, 1, m))
            pts = [E2.point(c[0] + p * np.cos(a), c[1] + p * np.sin(a)) for p, a in zip(rho, ang)]
            out.append((E2, pts, r))
        elif k % 3 == 1:
            word = (int(rng.integers(3)),) + tuple(int(b) for b in rng.integers(0, 2, rng.integers(0, 3)))
            region = Ball(T2.vertex(word), float(rng.integers(1, 4)))
            out.append((T2, T2.sample_region(region, 0.5), r))
        else:
            center = H.polar_point(rng.uniform(0, 3), rng.uniform(0, tau))
            out.append((H, H.sample_region(Ball(center, rng.uniform(1, 2.5)), 0.3), r))
    return out


def _packing_pairs(space):
    if space is T2:
        return [(R, r) for R in (2, 3, 4, 5, 6) for r in (0.5, 1.0, 1.5, 2.0)]
    if space is E1:
        return [(R, r) for R in (2, 3, 4, 5, 6) for r in (0.5, 1.0, 1.5, 2.0)]
    return [(R, r) for R in (1.0, 1.5, 2.0, 2.5, 3.0) for r in (0.25, 0.5, 0.75, 1.0)]


def test_ac7_inequality_suites(report):
    parts = {}
    regions = _random_regions(50)
    parts["chain"] = sum(not verify_pack_cov_chain(pts, r, sp)["holds"] for sp, pts, r in regions)

    bad = 0
    for sp in (T2, E1, E2_PACKED, H_PACKED):
        pairs = _packing_pairs(sp)
        assert len(pairs) == 20
        bad += sum(not verify_packing_propagation(sp, R, r)["holds"] for R, r in pairs)
    parts["packing"] = bad

    bad = 0
    for sp, x, r, T in [(T2, T2.basepoint, 0.5, range(2, 11)), (E1, E1.point(0.0), 0.5, range(1, 9)),
                        (H_PACKED, ORIGIN, 1.0, range(2, 9))]:
        bad += not verify_entropy_upper_bound(sp, fit_entropy(covering_growth(sp, x, r, T, witness=False)))["holds"]
    parts["entropy_bound"] = bad

    rng = np.random.default_rng(7)
    u = rng.uniform(0, 1, 60)
    hpts = [H.polar_point(a, b) for a, b in zip(np.arccosh(1 + u * (cosh(4) - 1)), rng.uniform(0, tau, 60))]
    tpts = list(T2.sample_region(Ball(T2.basepoint, 3), 0.5))
    parts["four_point"] = four_point_violations(H, hpts, H.delta_hint) + four_point_violations(T2, tpts, 0.0)

    bad = 0
    probes = []
    for k in range(32):
        bits = tuple(int(c) for c in format(k, "05b"))
        probes.append(T2.end(((bits[0] + bits[1]) % 3,) + bits[1:], (bits[-1],)))
    rep = verify_shadow_ball_lemma(T2, T2.end((), (0,)), T2.basepoint, 4, 1.0, probes, delta=0.0)
    bad += not rep["holds"]
    probes = [IdealPoint(tau * k / 64) for k in range(64)]
    rep = verify_shadow_ball_lemma(H, IdealPoint(0.0), ORIGIN, 5, 0.5, probes, delta=H.delta_hint)
    bad += not rep["holds"]
    parts["shadow_ball"] = bad

    bad = 0
    for sp, R, mesh in [(T2, 3, None), (H, 2, 0.1), (E2, 2, 0.2)]:
        fam = generate_line_family(sp, sp.basepoint, mesh, depth=2 * R + 1)
        bad += verify_no_recurrence(sp, fam, R)["violations"]
    parts["no_recurrence"] = bad

    ok = not any(parts.values())
    assert report("AC7", ok, "violations: " + ", ".join(f"{k}={v}" for k, v in parts.items()))


def test_ac8_f_metric_properties(report):
    tol = 1e-6
    worst = {"upper": -np.inf, "lower": -np.inf, "asym": 0.0, "triangle": -np.inf}
    for sp in (T2, H, E2):
        rng = np.random.default_rng(31)
        lines = random_lines(sp, rng, 1000)
        for g, h in zip(lines[::2], lines[1::2]):
            d0 = sp.distance(g(0.0), h(0.0))
            f = f_distance(sp, g, h, tol=tol)
            worst["upper"] = max(worst["upper"], f - d0 - EXP_HALF.C_f)
            worst["lower"] = max(worst["lower"], d0 - f)
            worst["asym"] = max(worst["asym"], abs(f - f_distance(sp, h, g, tol=tol)))
        lines = random_lines(sp, rng, 600)
        for a, b, c in zip(lines[0::3], lines[1::3], lines[2::3]):
            ab, bc, ac = (f_distance(sp, *p, tol=tol) for p in [(a, b), (b, c), (a, c)])
            worst["triangle"] = max(worst["triangle"], ac - ab - bc)
    ok = (worst["upper"] <= tol and worst["lower"] <= tol and worst["asym"] == 0
          and worst["triangle"] <= 3e-6)
    assert report("AC8", ok, "worst excess: " + ", ".join(f"{k}={v:.2e}" for k, v in worst.items()))


def test_ac9_key_lemma(report):
    rng = np.random.default_rng(12)
    tree = verify_key_lemma(T2, random_lines(T2, rng, 5), r=1.0, r2=2.0, T_list=(4, 6, 8, 10))
    pairs = [(pi, pi), (0.3, 2.0), (1.0, 2.5), (2.0, 1.2), (4.0, 3.0)]
    hyp_lines = [H.line_from_boundary_pair(IdealPoint(a), IdealPoint(a + b)) for a, b in pairs]
    hyp = verify_key_lemma(H, hyp_lines, r=1.0, r2=2.0, T_list=(4, 6, 8, 10))
    ok = tree["max_slope"] <= 0.05 and hyp["max_slope"] <= 0.05
    assert report("AC9", ok, f"max slope tree={tree['max_slope']:.4f} hyperbolic={hyp['max_slope']:.4f} "
                             f"tree counts={tree['counts']}")


CONFIGS = [
    {"space": {"model": "tree", "branching": 2}, "task": "entropy", "r": 0.5, "T": [2, 10, 1]},
    {"space": {"model": "hyperbolic"}, "task": "flow", "r": 1.0, "T": [2, 8, 1]},
    {"space": {"model": "hyperbolic"}, "task": "delta", "r": 1.0, "T": [1, 3, 1], "seed": 99},
    {"space": {"model": "tree", "branching": 3}, "task": "relative", "relative_kind": "covering",
     "r": 1.0, "T": [2, 8, 1]},
    {"space": {"model": "euclidean", "dim": 2}, "task": "volume", "T": [2, 20, 2]},
    {"space": {"model": "tree", "branching": 2, "packing_params": [9, 1.0]}, "task": "verify",
     "r": 1.0, "T": [2, 6, 1], "seed": 5},
]


def test_ac10_determinism(report, tmp_path):
    subset = tmp_path / "binary.json"
    subset.write_text(json.dumps({"type": "automaton", "alphabet": 2,
                                  "transitions": [[0, 0, 0], [0, 1, 0]], "accepting_cycles": True}))
    mismatched = []
    files = 0
    for k, cfg in enumerate(CONFIGS):
        cfg = dict(cfg, subset=str(subset)) if cfg["task"] == "relative" else cfg
        path = tmp_path / f"c{k}.json"
        path.write_text(json.dumps(cfg))
        digests = []
        for rep in range(2):
            out = tmp_path / f"run{k}_{rep}"
            cmd = "verify" if cfg["task"] == "verify" else "estimate"
            assert main([cmd, "--config", str(path), "--out", str(out)]) == 0
            digests.append({p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir())})
        files += len(digests[0])
        if digests[0] != digests[1]:
            mismatched.append(cfg["task"])
    ok = not mismatched
    assert report("AC10", ok, f"{len(CONFIGS)} configs, {files} artifacts hashed, mismatches={mismatched}")
