"""Decay-function grammar with dual direct / log-domain evaluation.

Every node represents a candidate Fourier-decay function f on [xi_min, +inf) and
knows how to evaluate

    f(xi)          directly,
    phi(gamma) = -log f(e^gamma)   in the log-abscissa domain,

with the two routes agreeing wherever neither overflows. The log-domain route is
the primary tool: tower-type nodes (steptower) and far-tail classification grids
live at abscissas where f itself underflows any float. tau is derived from phi:

    tau(xi) = phi(log xi) / log xi.

Zeros of f are signalled by a +inf phi sentinel, never by exceptions.

Text grammar (round-trip parse/print):

    const(c) powerlaw(a) logpow(p) explogpow(p) invloglog steptower theta(k)
    bluhmB pow(e,n) prod(e1,e2,...) abscos(w,e) tauexp(const(c)|abscos(w))
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegenerateInputError, DomainError, ParseError
from .grids import GeometricGrid
from .kernels import (BluhmSchedule, DEFAULT_BLUHM_SCHEDULE, bluhm_partial,
                      log_bluhm, log_theta_k, theta_k)

_LOG_MAX = math.log(np.finfo(float).max)  # largest gamma with e^gamma representable


def _neg_log(value: float) -> float:
    return -math.log(value) if value > 0.0 else math.inf


# ---------------------------------------------------------------------------
# tau sub-expressions (exponent functions for tauexp)

@dataclass(frozen=True)
class TauConst:
    c: float

    def __post_init__(self):
        if self.c < 0.0:
            raise ValueError("constant tau exponent must be >= 0")

    oscillates = False

    def value(self, xi: float) -> float:
        return self.c

    def text(self) -> str:
        return f"const({_num(self.c)})"


@dataclass(frozen=True)
class TauAbsCos:
    omega: float

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError("abscos frequency must be > 0")

    oscillates = True

    def value(self, xi: float) -> float:
        return abs(math.cos(self.omega * math.pi * xi))

    def text(self) -> str:
        return f"abscos({_num(self.omega)})"


@dataclass(frozen=True)
class TauCustom:
    fn: Callable[[float], float] = field(compare=False)
    name: str = "custom"
    oscillates: bool = True

    def value(self, xi: float) -> float:
        return float(self.fn(xi))

    def text(self) -> str:
        return f"taucustom({self.name})"


TauExpr = TauConst | TauAbsCos | TauCustom


# ---------------------------------------------------------------------------
# decay expression nodes

@dataclass(frozen=True)
class Const:
    c: float

    def __post_init__(self):
        if self.c < 0.0:
            raise ValueError("constant decay must be >= 0")

    xi_min = 0.0

    def f(self, xi: float) -> float:
        return self.c

    def phi(self, gamma: float) -> float:
        return _neg_log(self.c)

    def text(self) -> str:
        return f"const({_num(self.c)})"


@dataclass(frozen=True)
class PowerLaw:
    """f(xi) = xi^(-alpha); bounded by 1 on [1, +inf)."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0.0:
            raise ValueError("power-law exponent must be > 0")

    xi_min = 1.0

    def f(self, xi: float) -> float:
        return xi ** (-self.alpha)

    def phi(self, gamma: float) -> float:
        return self.alpha * gamma

    def text(self) -> str:
        return f"powerlaw({_num(self.alpha)})"


@dataclass(frozen=True)
class LogPower:
    """f(xi) = 1/log^p(xi); bounded by 1 on [e, +inf)."""

    p: float

    def __post_init__(self):
        if self.p <= 0.0:
            raise ValueError("log power must be > 0")

    xi_min = math.e

    def f(self, xi: float) -> float:
        return math.log(xi) ** (-self.p)

    def phi(self, gamma: float) -> float:
        return self.p * math.log(gamma)

    def text(self) -> str:
        return f"logpow({_num(self.p)})"


@dataclass(frozen=True)
class ExpLogPower:
    """f(xi) = exp(-(log xi)^p); bounded by 1 on [1, +inf)."""

    p: float

    def __post_init__(self):
        if self.p <= 0.0:
            raise ValueError("exponent power must be > 0")

    xi_min = 1.0

    def f(self, xi: float) -> float:
        return math.exp(-math.log(xi) ** self.p)

    def phi(self, gamma: float) -> float:
        return gamma ** self.p

    def text(self) -> str:
        return f"explogpow({_num(self.p)})"


@dataclass(frozen=True)
class InverseLogLog:
    """f(xi) = xi^(-1/log log xi), i.e. phi(gamma) = gamma/log gamma."""

    xi_min = math.exp(math.e)

    def f(self, xi: float) -> float:
        g = math.log(xi)
        return math.exp(-g / math.log(g))

    def phi(self, gamma: float) -> float:
        return gamma / math.log(gamma)

    def text(self) -> str:
        return "invloglog"


@dataclass(frozen=True)
class StepTower:
    """Step function 1/a_k on [a_k, a_{k+1}) with a_k = e^(e^(e^k)) by default.

    Stored and evaluated in double-log form: levels are u_k = log log a_k (so the
    default schedule is u_k = e^k, generated analytically as far as float gamma can
    reach); a_k itself overflows binary64 from k = 2 on. With an explicit finite
    ``levels`` tuple the last step extends to +inf so f stays positive.
    """

    levels: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.levels is not None:
            if len(self.levels) < 1 or any(b <= a for a, b in
                                           zip(self.levels, self.levels[1:])):
                raise ValueError("levels must be strictly increasing, nonempty")

    @property
    def xi_min(self) -> float:
        u0 = 1.0 if self.levels is None else self.levels[0]
        return math.exp(math.exp(u0))

    def _level_value(self, u: float) -> float:
        """u = log gamma -> phi = exp(u_k) for the largest level u_k <= u."""
        if self.levels is None:
            if u < 1.0:
                raise DomainError("steptower abscissa below a_0 = e^e")
            k = math.floor(math.log(u))
            # floor guard: log(e^k) can land a hair under k
            if math.exp(k + 1) <= u:
                k += 1
            elif math.exp(k) > u:
                k -= 1
            return math.exp(math.exp(k))
        if u < self.levels[0]:
            raise DomainError("steptower abscissa below first level")
        idx = max(i for i, lv in enumerate(self.levels) if lv <= u)
        return math.exp(self.levels[idx])

    def f(self, xi: float) -> float:
        return math.exp(-self.phi(math.log(xi)))

    def phi(self, gamma: float) -> float:
        if gamma <= 0.0:
            raise DomainError("steptower needs gamma > 0")
        return self._level_value(math.log(gamma))

    def text(self) -> str:
        if self.levels is None:
            return "steptower"
        return "steptower(" + ",".join(_num(v) for v in self.levels) + ")"


@dataclass(frozen=True)
class ThetaK:
    """The control kernel theta_k itself (power-like decay xi^(-1/(2+k)))."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("theta index must be >= 1")

    xi_min = 0.0

    def f(self, xi: float) -> float:
        return float(theta_k(self.k, xi))

    def phi(self, gamma: float) -> float:
        return -float(log_theta_k(self.k, gamma))

    def text(self) -> str:
        return f"theta({self.k})"


@dataclass(frozen=True)
class BluhmB:
    """B(xi) = sum_k c_k theta_k(xi) for a summable schedule (default c_k = 2^-k).

    The node stands for the full infinite series; numeric evaluation truncates
    adaptively with a certified tail bound (see kernels.bluhm_partial).
    """

    schedule: BluhmSchedule = DEFAULT_BLUHM_SCHEDULE

    xi_min = 0.0

    def f(self, xi: float) -> float:
        value, _, _ = bluhm_partial(xi, self.schedule)
        return value

    def phi(self, gamma: float) -> float:
        return -log_bluhm(gamma, self.schedule)

    def text(self) -> str:
        return "bluhmB"


@dataclass(frozen=True)
class Power:
    child: "DecayExpr"
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("power must be a positive integer")

    @property
    def xi_min(self) -> float:
        return self.child.xi_min

    def f(self, xi: float) -> float:
        return self.child.f(xi) ** self.n

    def phi(self, gamma: float) -> float:
        return self.n * self.child.phi(gamma)

    def text(self) -> str:
        return f"pow({self.child.text()},{self.n})"


@dataclass(frozen=True)
class Product:
    children: tuple["DecayExpr", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("product needs at least two factors")

    @property
    def xi_min(self) -> float:
        return max(c.xi_min for c in self.children)

    def f(self, xi: float) -> float:
        out = 1.0
        for c in self.children:
            out *= c.f(xi)
        return out

    def phi(self, gamma: float) -> float:
        return sum(c.phi(gamma) for c in self.children)

    def text(self) -> str:
        return "prod(" + ",".join(c.text() for c in self.children) + ")"


@dataclass(frozen=True)
class AbsCosTimes:
    """f(xi) = |cos(omega*pi*xi)| * child(xi); unbounded zero set."""

    omega: float
    child: "DecayExpr"

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError("abscos frequency must be > 0")

    @property
    def xi_min(self) -> float:
        return self.child.xi_min

    def f(self, xi: float) -> float:
        return abs(math.cos(self.omega * math.pi * xi)) * self.child.f(xi)

    def phi(self, gamma: float) -> float:
        if gamma > _LOG_MAX:
            raise DomainError("phase of cos(omega*pi*e^gamma) unresolvable: "
                              f"gamma={gamma} exceeds log(float max)")
        c = abs(math.cos(self.omega * math.pi * math.exp(gamma)))
        return _neg_log(c) + self.child.phi(gamma)

    def text(self) -> str:
        return f"abscos({_num(self.omega)},{self.child.text()})"


@dataclass(frozen=True)
class TauExponent:
    """f(xi) = xi^(-tau(xi)) for a supplied exponent function tau >= 0."""

    tau: TauExpr

    xi_min = 1.0

    def f(self, xi: float) -> float:
        return math.exp(-self.tau.value(xi) * math.log(xi))

    def phi(self, gamma: float) -> float:
        if isinstance(self.tau, TauConst):
            return self.tau.c * gamma
        if gamma > _LOG_MAX:
            raise DomainError("oscillating tau exponent unresolvable: "
                              f"gamma={gamma} exceeds log(float max)")
        return self.tau.value(math.exp(gamma)) * gamma

    def text(self) -> str:
        return f"tauexp({self.tau.text()})"


@dataclass(frozen=True)
class CustomPhi:
    """Caller-supplied phi evaluator; the direct route is derived as exp(-phi)."""

    fn: Callable[[float], float] = field(compare=False)
    gamma_min: float = 1.0
    name: str = "custom"

    @property
    def xi_min(self) -> float:
        return math.exp(self.gamma_min)

    def f(self, xi: float) -> float:
        p = self.phi(math.log(xi))
        return 0.0 if math.isinf(p) else math.exp(-p)

    def phi(self, gamma: float) -> float:
        return float(self.fn(gamma))

    def text(self) -> str:
        return f"custom({self.name})"


DecayExpr = (Const | PowerLaw | LogPower | ExpLogPower | InverseLogLog | StepTower
             | ThetaK | BluhmB | Power | Product | AbsCosTimes | TauExponent
             | CustomPhi)


# ---------------------------------------------------------------------------
# evaluation API

def eval_f(expr: DecayExpr, xi: float) -> float:
    """Direct evaluation of f(xi); DomainError below the node's cutoff."""
    if not (xi >= expr.xi_min):
        raise DomainError(f"xi={xi} below cutoff {expr.xi_min} of {expr.text()}")
    return expr.f(float(xi))


def eval_phi(expr: DecayExpr, gamma: float) -> float:
    """phi(gamma) = -log f(e^gamma); +inf sentinel where f vanishes."""
    gamma_min = -math.inf if expr.xi_min == 0.0 else math.log(expr.xi_min)
    if not (gamma >= gamma_min):
        raise DomainError(f"gamma={gamma} below cutoff {gamma_min} of {expr.text()}")
    return expr.phi(float(gamma))


def eval_tau(expr: DecayExpr, xi: float) -> float:
    """tau(xi) = phi(log xi)/log xi, defined for xi > max(1, cutoff)."""
    if not (xi > 1.0):
        raise DomainError("tau needs xi > 1")
    g = math.log(xi)
    return eval_phi(expr, g) / g


def phi_on_grid(expr: DecayExpr, gammas: np.ndarray) -> np.ndarray:
    return np.array([eval_phi(expr, float(g)) for g in gammas])


# ---------------------------------------------------------------------------
# empirical tail estimates (Lemma LS/LI counterpart)

@dataclass(frozen=True)
class TailEstimate:
    """Empirical sup/inf of xi^(-alpha)/f(xi) over the tail half of a grid."""

    alpha: float
    ls_empirical: float
    li_empirical: float
    zeros: tuple[float, ...]
    grid: GeometricGrid

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "ls": self.ls_empirical,
                "li": self.li_empirical, "zeros": list(self.zeros),
                "grid": self.grid.to_json()}


def tail_log_ratios(expr: DecayExpr, alpha: float,
                    grid: GeometricGrid) -> tuple[np.ndarray, np.ndarray]:
    """(grid values, log of xi^(-alpha)/f(xi)); +inf where f vanishes."""
    xs = grid.values()
    if xs[0] <= max(1.0, expr.xi_min):
        raise DomainError("grid start must exceed max(1, cutoff)")
    gammas = np.log(xs)
    phis = phi_on_grid(expr, gammas)
    return xs, phis - alpha * gammas


def estimate_tails(expr: DecayExpr, alpha: float, grid: GeometricGrid) -> TailEstimate:
    if alpha <= 0.0:
        raise ValueError("alpha must be > 0")
    xs, logr = tail_log_ratios(expr, alpha, grid)
    zero_mask = np.isinf(logr)
    if zero_mask.all():
        raise DegenerateInputError("f vanishes at every grid point")
    t0 = grid.tail_start()
    tail_logr = logr[t0:]
    tail_finite = tail_logr[~np.isinf(tail_logr)]
    if tail_finite.size == 0:
        raise DegenerateInputError("f vanishes on the entire tail half of the grid")
    with np.errstate(over="ignore"):
        ls = float(np.exp(tail_finite.max()))
        li = float(np.exp(tail_finite.min()))
    return TailEstimate(alpha=alpha, ls_empirical=ls, li_empirical=li,
                        zeros=tuple(float(x) for x in xs[zero_mask]), grid=grid)


# ---------------------------------------------------------------------------
# asymptotic closeness (the O-equivalence underlying the Fourier set)

@dataclass(frozen=True)
class AsymptoticCloseness:
    close: bool
    c_f_over_g: float
    c_g_over_f: float
    incomparable: bool
    bound: float
    grid: GeometricGrid

    def to_json(self) -> dict:
        return {"close": self.close, "c_f_over_g": self.c_f_over_g,
                "c_g_over_f": self.c_g_over_f, "incomparable": self.incomparable,
                "bound": self.bound, "grid": self.grid.to_json()}


def asymptotically_close(f: DecayExpr, g: DecayExpr, grid: GeometricGrid,
                         bound: float = 1e8) -> AsymptoticCloseness:
    """Empirical two-sided O-comparison over the tail half of the grid."""
    xs = grid.values()
    if xs[0] <= max(1.0, f.xi_min, g.xi_min):
        raise DomainError("grid start must exceed both cutoffs and 1")
    t0 = grid.tail_start()
    gammas = np.log(xs[t0:])
    phi_f = phi_on_grid(f, gammas)
    phi_g = phi_on_grid(g, gammas)
    f_zero, g_zero = np.isinf(phi_f), np.isinf(phi_g)
    if (f_zero ^ g_zero).any():
        return AsymptoticCloseness(False, math.inf, math.inf, True, bound, grid)
    both = ~(f_zero & g_zero)
    if not both.any():
        return AsymptoticCloseness(False, math.inf, math.inf, True, bound, grid)
    d = phi_g[both] - phi_f[both]  # log(f/g)
    with np.errstate(over="ignore"):
        c_fg = float(np.exp(d.max()))
        c_gf = float(np.exp(-d.min()))
    return AsymptoticCloseness(bool(c_fg <= bound and c_gf <= bound),
                               c_fg, c_gf, False, bound, grid)


def power_closure(expr: DecayExpr, n: int) -> DecayExpr:
    """f -> f^n; the admissibility condition is stable under this map."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return expr
    if isinstance(expr, Power):
        return Power(expr.child, expr.n * n)
    return Power(expr, n)


# ---------------------------------------------------------------------------
# text grammar

def _num(x: float) -> str:
    xf = float(x)
    return str(int(xf)) if xf == int(xf) and abs(xf) < 1e15 else repr(xf)


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*|[(),]|[-+]?[0-9.eE+-]+)")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"bad character at {text[pos:pos + 8]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def number(self) -> float:
        tok = self.take()
        try:
            return float(tok)
        except ValueError:
            raise ParseError(f"expected a number, found {tok!r}") from None

    def expr(self) -> DecayExpr:
        name = self.take()
        if name == "const":
            self.take("(")
            c = self.number()
            self.take(")")
            return Const(c)
        if name == "powerlaw":
            self.take("(")
            a = self.number()
            self.take(")")
            return PowerLaw(a)
        if name == "logpow":
            self.take("(")
            p = self.number()
            self.take(")")
            return LogPower(p)
        if name == "explogpow":
            self.take("(")
            p = self.number()
            self.take(")")
            return ExpLogPower(p)
        if name == "invloglog":
            return InverseLogLog()
        if name == "steptower":
            if self.peek() == "(":
                self.take("(")
                levels = [self.number()]
                while self.peek() == ",":
                    self.take(",")
                    levels.append(self.number())
                self.take(")")
                return StepTower(tuple(levels))
            return StepTower()
        if name == "theta":
            self.take("(")
            k = self.number()
            self.take(")")
            if k != int(k):
                raise ParseError("theta index must be an integer")
            return ThetaK(int(k))
        if name == "bluhmB":
            return BluhmB()
        if name == "pow":
            self.take("(")
            child = self.expr()
            self.take(",")
            n = self.number()
            self.take(")")
            if n != int(n) or n < 1:
                raise ParseError("pow exponent must be a positive integer")
            return Power(child, int(n))
        if name == "prod":
            self.take("(")
            children = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                children.append(self.expr())
            self.take(")")
            return Product(tuple(children))
        if name == "abscos":
            self.take("(")
            w = self.number()
            self.take(",")
            child = self.expr()
            self.take(")")
            return AbsCosTimes(w, child)
        if name == "tauexp":
            self.take("(")
            tau = self.tau_expr()
            self.take(")")
            return TauExponent(tau)
        raise ParseError(f"unknown expression {name!r}")

    def tau_expr(self) -> TauExpr:
        name = self.take()
        if name == "const":
            self.take("(")
            c = self.number()
            self.take(")")
            return TauConst(c)
        if name == "abscos":
            self.take("(")
            w = self.number()
            self.take(")")
            return TauAbsCos(w)
        raise ParseError(f"unknown tau expression {name!r}")


def parse_expr(text: str) -> DecayExpr:
    parser = _Parser(_tokenize(text))
    expr = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"trailing input after expression: {parser.peek()!r}")
    return expr


def print_expr(expr: DecayExpr) -> str:
    return expr.text()
