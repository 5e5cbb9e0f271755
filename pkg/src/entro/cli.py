"""Command line driver: ``entro estimate | verify | compare``.

Exit status 0 means success, 1 a failed verification and 2 a
configuration problem (no artifacts are written in that case).
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from math import pi
from pathlib import Path

import numpy as np

from . import boundary_sets as bs
from .entropy import (
    GrowthSeries,
    check_asymptotic_equivalence,
    covering_growth,
    fit_entropy,
    measure_growth,
    natural_measure,
    sphere_covering_growth,
    verify_entropy_upper_bound,
)
from .errors import ConfigurationError, GeometryError
from .flow import EXP_HALF, flow_entropy_series, generate_line_family, verify_no_recurrence
from .hyperbolicity import estimate_delta, four_point_violations, verify_shadow_ball_lemma
from .nets import verify_pack_cov_chain, verify_packing_propagation
from .spaces import Ball, Euclidean, HyperbolicPlane, MetricGraph, RegularTree, parse_edge_list

TASKS = ("entropy", "sphere-entropy", "volume", "minkowski", "flow", "relative", "delta", "verify")
TOP_KEYS = {"space", "task", "r", "T", "weight", "subset", "out", "seed", "window", "mesh", "tau",
            "relative_kind"}
SPACE_KEYS = {
    "tree": {"model", "branching", "packing_params", "delta_hint", "cap"},
    "hyperbolic": {"model", "packing_params", "delta_hint", "cap"},
    "euclidean": {"model", "dim", "packing_params", "delta_hint", "cap"},
    "graph": {"model", "edges", "basepoint", "packing_params", "delta_hint", "cap"},
}
RELATIVE_KINDS = ("covering", "minkowski", "measure", "flow")
SEED_MAX = 2**64 - 1


@dataclass
class RunConfig:
    space: dict
    task: str
    r: float = 1.0
    T: tuple = (2.0, 8.0, 1.0)
    weight: str = "ExpHalf"
    subset: str = None
    out: str = "out"
    seed: int = 0
    window: object = "upper-half"
    mesh: float = None
    tau: float = 1.0
    relative_kind: str = "covering"
    threads: int = field(default=1, compare=False)

    def resolved(self):
        """Configuration embedded into artifacts (output and thread settings excluded)."""
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        d["T"] = list(d["T"])
        return d

    @property
    def T_list(self):
        lo, hi, step = self.T
        n = int(np.floor((hi - lo) / step + 1e-9))
        return [round(lo + k * step, 12) for k in range(n + 1)]


def _reject_unknown(d, allowed, where):
    for k in d:
        if k not in allowed:
            raise ConfigurationError(f"unknown key {k!r} in {where}")


def parse_config(source=None, overrides=None):
    """Validated :class:`RunConfig` from a JSON path, JSON text or dict plus overrides."""
    if source is None:
        raw = {}
    elif isinstance(source, dict):
        raw = dict(source)
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as e:
                raise ConfigurationError(f"cannot read config: {e}") from None
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"malformed JSON at line {e.lineno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError("the config must be a JSON object")
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    _reject_unknown(raw, TOP_KEYS | {"threads"}, "config")
    task = raw.get("task")
    if task not in TASKS:
        raise ConfigurationError(f"task must be one of {', '.join(TASKS)}")
    space = raw.get("space")
    if not isinstance(space, dict) or space.get("model") not in SPACE_KEYS:
        raise ConfigurationError("space.model must be one of tree, hyperbolic, euclidean, graph")
    _reject_unknown(space, SPACE_KEYS[space["model"]], "space")
    if space["model"] == "tree":
        b = space.get("branching", 2)
        if not isinstance(b, int) or b < 2:
            raise ConfigurationError("branching must be ≥ 2")
    if space["model"] == "graph" and "edges" not in space:
        raise ConfigurationError("graph spaces need 'edges'")
    r = raw.get("r", 1.0)
    if not isinstance(r, (int, float)) or not r > 0:
        raise ConfigurationError("r must be positive")
    T = raw.get("T", [2, 8, 1])
    if not (isinstance(T, list) and len(T) == 3 and all(isinstance(t, (int, float)) for t in T)):
        raise ConfigurationError("T must be [lo, hi, step]")
    if not (T[2] > 0 and T[1] >= T[0]):
        raise ConfigurationError("T grid needs step > 0 and hi >= lo")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed <= SEED_MAX:
        raise ConfigurationError("seed must be an unsigned 64-bit integer")
    weight = raw.get("weight", "ExpHalf")
    if weight != "ExpHalf":
        raise ConfigurationError("weight must be 'ExpHalf' (custom weights need the library API)")
    if task == "relative" and not raw.get("subset"):
        raise ConfigurationError("task 'relative' needs a subset file ('subset')")
    rk = raw.get("relative_kind", "covering")
    if rk not in RELATIVE_KINDS:
        raise ConfigurationError(f"relative_kind must be one of {', '.join(RELATIVE_KINDS)}")
    window = raw.get("window", "upper-half")
    if isinstance(window, list):
        if len(window) != 2:
            raise ConfigurationError("window must be 'upper-half', 'full' or [lo, hi]")
        window = tuple(float(w) for w in window)
    elif window not in ("upper-half", "full"):
        raise ConfigurationError("window must be 'upper-half', 'full' or [lo, hi]")
    mesh = raw.get("mesh")
    if mesh is not None and not mesh > 0:
        raise ConfigurationError("mesh must be positive")
    tau_ = raw.get("tau", 1.0)
    if not tau_ >= 0:
        raise ConfigurationError("tau must be nonnegative")
    threads = raw.get("threads", 1)
    if not isinstance(threads, int) or threads < 1:
        raise ConfigurationError("threads must be a positive integer")
    return RunConfig(space, task, float(r), tuple(float(t) for t in T), weight, raw.get("subset"),
                     raw.get("out", "out"), seed, window, mesh, float(tau_), rk, threads)


def build_space(spec):
    model = spec["model"]
    pp = spec.get("packing_params")
    pp = tuple(pp) if pp is not None else None
    kw = {"packing_params": pp}
    if "cap" in spec:
        kw["cap"] = int(spec["cap"])
    if "delta_hint" in spec:
        kw["delta_hint"] = spec["delta_hint"]
    if model == "tree":
        return RegularTree(spec.get("branching", 2), **kw)
    if model == "hyperbolic":
        return HyperbolicPlane(**kw)
    if model == "euclidean":
        return Euclidean(spec.get("dim", 2), **kw)
    edges = spec["edges"]
    if isinstance(edges, str):
        edges = parse_edge_list(Path(edges).read_text())
    return MetricGraph(edges, spec.get("basepoint"), **kw)


def _series(cfg, space):
    T = cfg.T_list
    x = space.basepoint
    r = cfg.r
    if cfg.task == "entropy":
        return covering_growth(space, x, r, T, cfg.mesh, witness=False)
    if cfg.task == "sphere-entropy":
        return sphere_covering_growth(space, x, r, T, cfg.mesh)
    if cfg.task == "volume":
        return measure_growth(space, natural_measure(space), x, T)
    if cfg.task == "minkowski":
        return bs.relative_minkowski_growth(space, bs.full_boundary(space), None, T)
    if cfg.task == "flow":
        return flow_entropy_series(space, r, T)
    C = bs.load_subset(cfg.subset, space)
    if cfg.relative_kind == "covering":
        return bs.relative_covering_growth(space, C, None, r, T, cfg.tau, cfg.mesh)
    if cfg.relative_kind == "minkowski":
        return bs.relative_minkowski_growth(space, C, None, T)
    if cfg.relative_kind == "measure":
        return bs.relative_measure_growth(space, C, None, None, cfg.tau, T)
    return bs.relative_flow_growth(space, C, EXP_HALF, r, T)


def _dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, tuple):
        return list(o)
    return repr(o)


def _verify(cfg, space):
    """Inequality checks on one sampled ball; every entry carries ``holds``."""
    R = cfg.T[1]
    mesh = cfg.mesh or cfg.r / 2
    sample = space.sample_region(Ball(space.basepoint, min(R, 2.0)), mesh)
    checks = {}
    chain = verify_pack_cov_chain(sample, cfg.r)
    checks["pack_cov_chain"] = {k: chain[k] for k in ("pack_2r", "cov_2r", "pack_r", "holds")}
    if space.packing_params is not None:
        checks["packing_propagation"] = verify_packing_propagation(space, min(R, 3.0), cfg.r)
        est = fit_entropy(covering_growth(space, space.basepoint, cfg.r, cfg.T_list, witness=False),
                          "full")
        checks["entropy_upper_bound"] = verify_entropy_upper_bound(space, est)
    if space.delta_hint is not None:
        small = space.sample_region(Ball(space.basepoint, 1.5), max(mesh, 0.5))
        bad = four_point_violations(space, small, space.delta_hint + 1e-9)
        checks["four_point"] = {"violations": bad, "holds": bad == 0}
    if space.kind in ("tree", "hyperbolic"):
        Rn = min(R, 3.0)
        fam = generate_line_family(space, space.basepoint, mesh=0.1, depth=2 * Rn + 1)
        checks["no_recurrence"] = verify_no_recurrence(space, fam, Rn)
        if space.kind == "tree":
            z = space.end((0,), (1,))
            probes = [space.end(w, (0,)) for w in [(0,), (0, 1), (0, 1, 1), (1,), (0, 0, 1)]]
        else:
            from .spaces import IdealPoint

            z = IdealPoint(0.0)
            probes = [IdealPoint(t) for t in np.linspace(0, 2 * pi, 200, endpoint=False)]
        checks["shadow_ball"] = verify_shadow_ball_lemma(space, z, space.basepoint, 3.0, 1.0, probes)
    return checks


def run(cfg):
    """Execute a configuration; returns the exit status."""
    try:
        space = build_space(cfg.space)
    except (GeometryError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    out = Path(cfg.out)
    resolved = cfg.resolved()
    try:
        if cfg.task == "delta":
            mesh = cfg.mesh or cfg.r / 2
            sample = space.sample_region(Ball(space.basepoint, cfg.T[1]), mesh)
            d = estimate_delta(space, sample, seed=cfg.seed, full_output=True)
            report = {"task": "delta", "delta": d.delta, "quadruples": d.quadruples,
                      "exhaustive": d.exhaustive, "seed": d.seed, "config": resolved}
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.json").write_text(_dump(report))
            print(f"task=delta slope=nan residual=nan delta={d.delta!r}")
            return 0
        if cfg.task == "verify":
            checks = _verify(cfg, space)
            ok = all(c["holds"] for c in checks.values())
            out.mkdir(parents=True, exist_ok=True)
            (out / "report.json").write_text(_dump({"task": "verify", "checks": checks,
                                                    "holds": ok, "config": resolved}))
            print("task=verify slope=nan residual=nan")
            return 0 if ok else 1
        series = _series(cfg, space)
        est = fit_entropy(series, cfg.window)
    except GeometryError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)
    (out / "series.csv").write_text(series.to_csv())
    doc = {"task": cfg.task, "kind": series.kind, "r": cfg.r, "slope": est.slope,
           "window": list(est.window), "residual": est.residual, "config": resolved}
    (out / "estimate.json").write_text(_dump(doc))
    print(f"task={cfg.task} slope={est.slope!r} residual={est.residual!r}")
    return 0


def compare(path_a, path_b, eps, T_eps):
    """Asymptotic equivalence of two CSV series; returns the exit status."""
    try:
        a = GrowthSeries.from_csv(Path(path_a).read_text())
        b = GrowthSeries.from_csv(Path(path_b).read_text())
        rep = check_asymptotic_equivalence(a, b, eps, T_eps)
    except (GeometryError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"max_deviation={rep['max_deviation']!r} holds={rep['holds']}")
    return 0 if rep["holds"] else 1


def _threads(value):
    if value is not None:
        return value
    env = os.environ.get("ENTRO_THREADS")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise ConfigurationError("ENTRO_THREADS must be an integer") from None


def main(argv=None):
    p = argparse.ArgumentParser(prog="entro")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("estimate", "verify"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--out")
        s.add_argument("--seed", type=int)
        s.add_argument("--threads", type=int)
    c = sub.add_parser("compare")
    c.add_argument("series", nargs=2)
    c.add_argument("--eps", type=float, default=0.2)
    c.add_argument("--T-eps", dest="T_eps", type=float, default=0.0)
    try:
        args = p.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    if args.command == "compare":
        return compare(args.series[0], args.series[1], args.eps, args.T_eps)
    try:
        over = {"out": args.out, "seed": args.seed, "threads": _threads(args.threads)}
        if args.command == "verify":
            over["task"] = "verify"
        cfg = parse_config(args.config, over)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
