"""Growth series of balls, spheres and measures, and their exponential rates."""

from dataclasses import dataclass, field
from math import log

import numpy as np

from .errors import AlignmentError, ConfigurationError, DomainError, FitError
from .nets import greedy_cover, max_separated
from .spaces import Ball, Sphere

KINDS = ("BallCover", "SphereCover", "BallMeasure", "BoundaryCover", "FlowCover")
UNCONVERGED_RESIDUAL = 0.5


@dataclass(frozen=True)
class GrowthSeries:
    """Values of a growth function at increasing times ``T``."""

    kind: str
    r: float
    T: tuple
    values: tuple
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        T = tuple(float(t) for t in self.T)
        v = tuple(float(x) for x in self.values)
        if len(T) != len(v):
            raise DomainError("T and values differ in length")
        if any(b <= a for a, b in zip(T, T[1:])):
            raise DomainError("T values must be strictly increasing")
        if any(not x > 0 for x in v):
            raise DomainError("growth values must be positive")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "values", v)

    @property
    def samples(self):
        return list(zip(self.T, self.values))

    def log_values(self):
        return np.log(np.asarray(self.values))

    def scaled(self, c):
        return GrowthSeries(self.kind, self.r, self.T, tuple(c * x for x in self.values))

    def to_csv(self):
        lines = ["T,value,log_value"]
        for t, v in zip(self.T, self.values):
            lines.append(f"{t!r},{v!r},{log(v)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text, kind="BallCover", r=float("nan")):
        rows = [ln.strip() for ln in text.strip().splitlines()]
        if not rows or rows[0] != "T,value,log_value":
            raise DomainError("CSV header must be 'T,value,log_value'")
        T, v = [], []
        for ln in rows[1:]:
            a, b, _ = ln.split(",")
            T.append(float(a))
            v.append(float(b))
        return cls(kind, r, tuple(T), tuple(v))


@dataclass(frozen=True)
class EntropyEstimate:
    """Least-squares exponential rate of a series over a window."""

    slope: float
    intercept: float
    window: tuple
    residual: float
    converged: bool
    series: GrowthSeries = field(repr=False)

    def as_dict(self):
        return {
            "kind": self.series.kind,
            "r": self.series.r,
            "slope": self.slope,
            "window": list(self.window),
            "residual": self.residual,
        }


def _window(T, policy):
    T = np.asarray(T)
    if policy == "upper-half":
        lo, hi = (T[0] + T[-1]) / 2, T[-1]
    elif policy == "full":
        lo, hi = T[0], T[-1]
    else:
        lo, hi = policy
    return float(lo), float(hi)


def fit_entropy(series, window_policy="upper-half"):
    """Least-squares slope of ``log(value)`` against ``T`` over a window.

    Parameters
    ----------
    series : GrowthSeries
    window_policy : {"upper-half", "full"} or (lo, hi)
        ``"upper-half"`` keeps ``T >= (T_min + T_max) / 2``.

    Raises
    ------
    FitError
        Fewer than four samples fall inside the window.
    """
    T = np.asarray(series.T)
    if T.size == 0:
        raise FitError("empty series")
    lo, hi = _window(T, window_policy)
    mask = (T >= lo - 1e-9) & (T <= hi + 1e-9)
    if mask.sum() < 4:
        raise FitError(f"window [{lo}, {hi}] holds {int(mask.sum())} samples, need at least 4")
    t = T[mask]
    y = series.log_values()[mask]
    slope, intercept = np.polyfit(t, y, 1)
    residual = float(np.max(np.abs(y - (slope * t + intercept))))
    return EntropyEstimate(
        float(slope), float(intercept), (float(t[0]), float(t[-1])), residual,
        residual <= UNCONVERGED_RESIDUAL, series,
    )


def _check_T(T_list):
    T = [float(t) for t in T_list]
    if any(b <= a for a, b in zip(T, T[1:])):
        raise DomainError("T_list must be increasing")
    return T


def covering_growth(space, x, r, T_list, mesh=None, witness=True):
    """Greedy ``r``-cover counts of ``B(x, T)`` samples.

    With ``witness`` the diagnostics also hold the size of a greedy
    ``2r``-separated set, a lower bound for the covering number.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    mesh = r / 2 if mesh is None else mesh
    T = _check_T(T_list)
    vals, lower, sizes = [], [], []
    for t in T:
        s = space.sample_region(Ball(x, t), mesh)
        vals.append(len(greedy_cover(s, r)))
        sizes.append(len(s))
        if witness:
            lower.append(len(max_separated(s, r)))
    diag = {"mesh": mesh, "sample_sizes": sizes}
    if witness:
        diag["pack_2r_lower"] = lower
    return GrowthSeries("BallCover", r, T, vals, diag)


def sphere_covering_growth(space, x, r, T_list, mesh=None, witness=False):
    """Greedy ``r``-cover counts of sphere samples ``S(x, T)``."""
    if r <= 0:
        raise DomainError("r must be positive")
    mesh = r / 2 if mesh is None else mesh
    T = _check_T(T_list)
    vals, lower = [], []
    for t in T:
        s = space.sample_region(Sphere(x, t), mesh)
        vals.append(len(greedy_cover(s, r)))
        if witness:
            lower.append(len(max_separated(s, r)))
    diag = {"mesh": mesh}
    if witness:
        diag["pack_2r_lower"] = lower
    return GrowthSeries("SphereCover", r, T, vals, diag)


@dataclass(frozen=True)
class HomogeneousMeasure:
    """The natural measure of a model (length, area or Lebesgue).

    ``H`` and ``r`` record a homogeneity constant once computed by
    :func:`verify_homogeneity`.
    """

    kind: str
    H: float = None
    r: float = None

    def ball(self, space, x, T):
        if space.kind != self.kind:
            raise ConfigurationError(f"measure for {self.kind} used on {space.kind}")
        return space.ball_measure(x, T)


def natural_measure(space):
    return HomogeneousMeasure(space.kind)


def measure_growth(space, measure, x, T_list):
    """Exact ``mu(B(x, T))`` per ``T`` from closed forms or edge enumeration."""
    T = _check_T(T_list)
    vals = [measure.ball(space, x, t) for t in T]
    if any(v <= 0 for v in vals):
        raise DomainError("ball measure vanishes; use T > 0")
    return GrowthSeries("BallMeasure", float("nan") if measure.r is None else measure.r, T, vals)


def verify_homogeneity(space, measure, r, centers):
    """Smallest ``H`` with ``1/H <= mu(B(x, r)) <= H`` over ``centers``.

    Returns
    -------
    H : float
    report : dict
        Ball measures at ``r`` and ``2r`` and the constant at ``2r``.
    """
    if r <= 0:
        raise DomainError("r must be positive")
    vals = np.array([measure.ball(space, c, r) for c in centers])
    vals2 = np.array([measure.ball(space, c, 2 * r) for c in centers])
    H = float(max(vals.max(), 1 / vals.min()))
    H2 = float(max(vals2.max(), 1 / vals2.min()))
    report = {
        "r": r,
        "H": H,
        "min": float(vals.min()),
        "max": float(vals.max()),
        "H_at_2r": H2,
        "holds": bool(np.all(vals <= H) and np.all(vals >= 1 / H)),
    }
    return H, report


def check_asymptotic_equivalence(f, g, eps, T_eps):
    """Compare ``log(f)/T`` and ``log(g)/T`` on the common grid beyond ``T_eps``."""
    gT = {round(t, 9): v for t, v in zip(g.T, g.values)}
    common = [(t, v, gT[round(t, 9)]) for t, v in zip(f.T, f.values)
              if round(t, 9) in gT and t >= T_eps and t > 0]
    if not common:
        raise AlignmentError("no common T values at or beyond the threshold")
    devs = [abs(log(a) / t - log(b) / t) for t, a, b in common]
    first = next((t for (t, _, _), d in zip(common, devs) if d > eps), None)
    return {
        "eps": eps,
        "T_eps": T_eps,
        "T": [t for t, _, _ in common],
        "deviations": devs,
        "max_deviation": max(devs),
        "first_violation": first,
        "holds": first is None,
    }


def entropy_upper_bound(space):
    if space.packing_params is None:
        raise ConfigurationError("space declares no packing_params (P0, r0)")
    P0, r0 = space.packing_params
    return log(1 + P0) / r0


def verify_entropy_upper_bound(space, estimate, slack=0.05):
    """Check ``slope <= log(1 + P0) / r0 + slack``."""
    bound = entropy_upper_bound(space)
    return {"slope": estimate.slope, "bound": bound, "holds": estimate.slope <= bound + slack}
