"""Gauge-side dichotomy for the Liouville set.

For a dimension function h the profile

    Gamma_h(r) = inf_{0 < s <= r} r * h(s)/s

governs a 0/infinity law: if Gamma_h(r)/r^t -> 0 for some t > 0 the h-measure of
the Liouville set vanishes; if it stays positive for every t > 0 the measure is
not sigma-finite. The infimum is discretized on a declared geometric grid; profile
computations share one master lattice so the structural invariants
(Gamma_h <= h, Gamma_h/r nonincreasing) hold exactly on the emitted floats, and
grid-boundary minima are flagged because the true infimum may sit below the grid.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidGaugeError, ParseError


@dataclass(frozen=True)
class GaugeFunction:
    """Evaluator for a dimension function h on (0, r_max]."""

    fn: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    text: str = "custom"
    r_max: float = 0.25

    def __post_init__(self):
        if not (0.0 < self.r_max <= 1.0):
            raise InvalidGaugeError("r_max must lie in (0, 1]")

    def h(self, s):
        s_arr = np.asarray(s, dtype=float)
        out = np.asarray(self.fn(s_arr), dtype=float)
        return out if out.shape else float(out)

    def validate(self, s_grid: np.ndarray) -> dict:
        """Positivity and monotonicity on the sampled grid; InvalidGaugeError on
        violation. Returns a small report including the vanishing-trend flag."""
        vals = np.asarray(self.h(s_grid), dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise InvalidGaugeError(f"gauge {self.text!r} nonpositive or nonfinite "
                                    "on the sampled grid")
        drops = vals[1:] - vals[:-1]
        worst = float(drops.min()) if len(drops) else 0.0
        if worst < -1e-12 * float(vals.max()):
            raise InvalidGaugeError(f"gauge {self.text!r} decreasing on the sampled "
                                    f"grid (worst drop {worst:.3e})")
        return {"vanishing_trend": bool(vals[0] <= 0.05 * vals[-1]),
                "h_min": float(vals[0]), "h_max": float(vals[-1])}

    def concavity_report(self, points: int = 200) -> dict:
        """Optional check: slopes of h on a linear grid; not required by the
        dichotomy, exposed for comparison with concavity-assuming weaker results."""
        s = np.linspace(self.r_max / points, self.r_max, points)
        vals = np.asarray(self.h(s), dtype=float)
        slopes = np.diff(vals) / np.diff(s)
        tol = 1e-10 * max(1.0, float(np.abs(slopes).max()))
        return {"concave_on_sample": bool(np.all(np.diff(slopes) <= tol)),
                "points": points}


# ---------------------------------------------------------------------------
# gauge text grammar: s^t | 1/log(1/s) | exp(-log(1/s)^p) | prod(g,g) | compose(g,g)

_NUM = r"[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?"


def _power_gauge(t: float) -> GaugeFunction:
    if t <= 0.0:
        raise ParseError("gauge exponent must be > 0")
    return GaugeFunction(lambda s, t=t: s ** t, f"s^{_fmt(t)}")


def _invlog_gauge() -> GaugeFunction:
    return GaugeFunction(lambda s: 1.0 / np.log(1.0 / s), "1/log(1/s)")


def _explog_gauge(p: float) -> GaugeFunction:
    if p <= 0.0:
        raise ParseError("gauge exponent must be > 0")
    return GaugeFunction(lambda s, p=p: np.exp(-np.log(1.0 / s) ** p),
                         f"exp(-log(1/s)^{_fmt(p)})")


def _fmt(x: float) -> str:
    return str(int(x)) if float(x) == int(x) else repr(float(x))


def _split_args(body: str) -> tuple[str, str]:
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1:]
    raise ParseError(f"expected two comma-separated gauges in {body!r}")


def parse_gauge(text: str) -> GaugeFunction:
    t = text.strip()
    m = re.fullmatch(rf"s\^({_NUM})", t)
    if m:
        return _power_gauge(float(m.group(1)))
    if t == "1/log(1/s)":
        return _invlog_gauge()
    m = re.fullmatch(rf"exp\(-log\(1/s\)\^({_NUM})\)", t)
    if m:
        return _explog_gauge(float(m.group(1)))
    for name in ("prod", "compose"):
        if t.startswith(name + "(") and t.endswith(")"):
            left, right = _split_args(t[len(name) + 1:-1])
            a, b = parse_gauge(left), parse_gauge(right)
            if name == "prod":
                return GaugeFunction(lambda s, a=a, b=b: np.asarray(a.h(s)) * np.asarray(b.h(s)),
                                     f"prod({a.text},{b.text})",
                                     min(a.r_max, b.r_max))
            return GaugeFunction(lambda s, a=a, b=b: np.asarray(a.h(np.asarray(b.h(s)))),
                                 f"compose({a.text},{b.text})", b.r_max)
    raise ParseError(f"unknown gauge {text!r}")


# ---------------------------------------------------------------------------
# the Gamma_h functional

@dataclass(frozen=True)
class GammaValue:
    r: float
    value: float
    argmin_s: float
    boundary_min: bool


def gamma_h(h: GaugeFunction, r: float, points_per_decade: int = 60,
            decades: int = 12) -> GammaValue:
    """Discretized inf_{0<s<=r} r h(s)/s on a geometric s-grid below r.

    The s = r endpoint contributes exactly h(r) (the algebraic value of r*h(r)/r),
    so Gamma_h(r) <= h(r) holds as floats. A minimum attained at the bottom grid
    point is flagged: the true infimum may be smaller.
    """
    if not (0.0 < r <= h.r_max):
        raise InvalidGaugeError(f"r must lie in (0, r_max={h.r_max}]")
    n = points_per_decade * decades + 1
    s = np.geomspace(r * 10.0 ** (-decades), r, n)
    hv = np.asarray(h.h(s), dtype=float)
    if np.any(hv <= 0.0) or not np.all(np.isfinite(hv)):
        raise InvalidGaugeError("gauge nonpositive on the s-grid")
    vals = r * (hv / s)
    vals[-1] = hv[-1]  # s = r term, computed without the r/s round trip
    idx = int(np.argmin(vals))
    return GammaValue(r=r, value=float(vals[idx]), argmin_s=float(s[idx]),
                      boundary_min=idx == 0)


@dataclass(frozen=True)
class GammaProfile:
    """Gamma_h on a descending r-grid sharing one master s-lattice.

    ``ratio`` holds min_{s<=r} h(s)/s (so Gamma/r monotonicity can be asserted on
    the reported floats directly), ``gamma`` the clamped product min(h(r), r*ratio).
    """

    r: np.ndarray
    gamma: np.ndarray
    ratio: np.ndarray
    argmin_s: np.ndarray
    boundary_min: np.ndarray
    gauge_text: str

    def rows(self):
        for i in range(len(self.r)):
            yield (float(self.r[i]), float(self.gamma[i]), float(self.ratio[i]),
                   float(self.argmin_s[i]), bool(self.boundary_min[i]))


def gamma_profile(h: GaugeFunction, r_decades: int = 50,
                  points_per_decade: int = 20, extra_s_decades: int = 12,
                  r_max: float | None = None) -> GammaProfile:
    top = h.r_max if r_max is None else min(r_max, h.r_max)
    total = r_decades + extra_s_decades
    n = points_per_decade * total + 1
    s = np.geomspace(top * 10.0 ** (-total), top, n)
    hv = np.asarray(h.h(s), dtype=float)
    if np.any(hv <= 0.0) or not np.all(np.isfinite(hv)):
        raise InvalidGaugeError("gauge nonpositive on the master lattice")
    v = hv / s
    run_min = np.minimum.accumulate(v)
    run_arg = np.empty(n, dtype=int)
    best = 0
    for i in range(n):
        if v[i] <= v[best]:
            best = i
        run_arg[i] = best
    r_lo = points_per_decade * extra_s_decades
    idx = np.arange(n - 1, r_lo - 1, -1)  # descending r toward 0
    r = s[idx]
    ratio = run_min[idx]
    gamma = np.minimum(hv[idx], r * ratio)
    return GammaProfile(r=r, gamma=gamma, ratio=ratio, argmin_s=s[run_arg[idx]],
                        boundary_min=(run_arg[idx] == 0), gauge_text=h.text)


# ---------------------------------------------------------------------------
# the dichotomy

class DichotomyOutcome(enum.Enum):
    ZERO_MEASURE = "zero-measure"
    NOT_SIGMA_FINITE = "not-sigma-finite"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class DichotomyResult:
    outcome: DichotomyOutcome
    witness_t: float | None
    per_t_tail_max: dict
    profile: GammaProfile
    zero_threshold: float
    positive_threshold: float

    def to_json(self) -> dict:
        return {"outcome": self.outcome.value, "witness_t": self.witness_t,
                "per_t_tail_max": {str(k): v for k, v in self.per_t_tail_max.items()},
                "gauge": self.profile.gauge_text,
                "zero_threshold": self.zero_threshold,
                "positive_threshold": self.positive_threshold}


def hausdorff_dichotomy(h: GaugeFunction, t_exponents: int = 21,
                        profile: GammaProfile | None = None,
                        zero_threshold: float = 1e-6,
                        positive_threshold: float = 1e-2) -> DichotomyResult:
    """Classify h by the tail behaviour of Gamma_h(r)/r^t over t in {2^-j}.

    Zero measure requires some sampled t whose tail max falls below the zero
    threshold; not-sigma-finite requires every sampled t to stay above the
    positive threshold; the outcomes are mutually exclusive by construction.
    """
    prof = profile if profile is not None else gamma_profile(h)
    ts = [2.0 ** (-j) for j in range(t_exponents)]
    tail = slice(len(prof.r) // 2, None)  # smallest-r half (descending grid)
    log_g = np.log(prof.gamma[tail])
    log_r = np.log(prof.r[tail])
    per_t: dict[float, float] = {}
    witness = None
    all_above = True
    for t in ts:
        m = float((log_g - t * log_r).max())
        with np.errstate(over="ignore"):
            per_t[t] = float(np.exp(m))
        if m < math.log(zero_threshold) and witness is None:
            witness = t
        if m <= math.log(positive_threshold):
            all_above = False
    if witness is not None:
        outcome = DichotomyOutcome.ZERO_MEASURE
    elif all_above:
        outcome = DichotomyOutcome.NOT_SIGMA_FINITE
    else:
        outcome = DichotomyOutcome.INCONCLUSIVE
        witness = None
    return DichotomyResult(outcome=outcome, witness_t=witness, per_t_tail_max=per_t,
                           profile=prof, zero_threshold=zero_threshold,
                           positive_threshold=positive_threshold)
