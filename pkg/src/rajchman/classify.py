"""Membership classification for candidate decay functions.

The admissible decays for the Liouville set are exactly those dominated by no
power law (limsup tau = 0); a positive liminf of tau excludes a candidate; and
oscillating exponents land in a gap the basic dichotomy cannot decide. Known node
shapes are classified symbolically; everything else falls through to numerics on a
doubling log-abscissa grid (tau trend, second differences of phi, multiplicativity),
with conservative thresholds so an uncertain sample yields Inconclusive rather than
a false certificate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .expressions import (AbsCosTimes, BluhmB, Const, CustomPhi, DecayExpr,
                          ExpLogPower, InverseLogLog, LogPower, Power, PowerLaw,
                          Product, StepTower, TauAbsCos, TauConst, TauCustom,
                          TauExponent, ThetaK, eval_phi)
from .grids import doubling_gamma_grid


class Outcome(enum.Enum):
    IN_FOURIER_SET = "in"
    NOT_IN_FOURIER_SET = "not-in"
    GAP = "gap"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Evidence:
    """Which test fired, with the sampled data that backs it."""

    rule: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"rule": self.rule, "detail": _jsonable(self.detail)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    evidence: Evidence

    def to_json(self) -> dict:
        return {"outcome": self.outcome.value, "evidence": self.evidence.to_json()}


@dataclass(frozen=True)
class ClassifyPolicy:
    """Grid spans and thresholds for the numeric fallback.

    The tau-limit thresholds are deliberately asymmetric and conservative: a limit
    is declared zero only when the last quarter of the doubling grid stays below
    1e-3, positive only when it stays above 1e-2; the band between is Inconclusive.
    """

    gamma_base: float = 4.0
    max_doublings: int = 24
    tau_zero_max: float = 1e-3
    tau_positive_min: float = 1e-2
    second_diff_rel_tol: float = 1e-9
    mult_lambdas: tuple[float, ...] = (1.5, 2.0, 3.0)
    mult_rel_tol: float = 1e-9
    certificates: tuple = ()  # GapCertificate objects from the multipliers module

    def gamma_grid(self) -> np.ndarray:
        return doubling_gamma_grid(self.gamma_base, self.max_doublings)


DEFAULT_POLICY = ClassifyPolicy()


def _verdict(outcome: Outcome, rule: str, **detail) -> Verdict:
    return Verdict(outcome, Evidence(rule, detail))


def _symbolic(expr: DecayExpr) -> Verdict | None:
    """Structural rules for known node shapes; None defers to numerics."""
    if isinstance(expr, Const):
        if expr.c == 0.0:
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-zero-function")
        return _verdict(Outcome.IN_FOURIER_SET, "symbolic-constant",
                        note="tau(xi) = -log c/log xi -> 0")
    if isinstance(expr, PowerLaw):
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-power-law",
                        tau_limit=expr.alpha)
    if isinstance(expr, LogPower):
        return _verdict(Outcome.IN_FOURIER_SET, "symbolic-log-power",
                        note="phi = p log gamma is sublinear")
    if isinstance(expr, ExpLogPower):
        if expr.p < 1.0:
            return _verdict(Outcome.IN_FOURIER_SET, "symbolic-exp-log-power",
                            note="phi = gamma^p, p < 1")
        if expr.p == 1.0:
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-exp-log-power",
                            note="p = 1 reduces exactly to powerlaw(1)")
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-exp-log-power",
                        note="tau = gamma^(p-1) diverges")
    if isinstance(expr, InverseLogLog):
        return _verdict(Outcome.IN_FOURIER_SET, "symbolic-inv-loglog",
                        note="tau = 1/log log xi -> 0")
    if isinstance(expr, StepTower):
        return _verdict(Outcome.GAP, "symbolic-step-tower",
                        note="left step ends deny the admissibility condition, "
                             "right step ends deny the exclusion condition")
    if isinstance(expr, ThetaK):
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-theta-kernel",
                        tau_limit=1.0 / (2 + expr.k))
    if isinstance(expr, BluhmB):
        if expr.schedule.max_index() is None:
            return _verdict(Outcome.IN_FOURIER_SET, "symbolic-bluhm-series",
                            note="limsup tau <= inf_k 1/(2+k) = 0 for the "
                                 "infinite summable schedule")
        # finite schedule: the slowest retained kernel dominates -> power-like
        last = expr.schedule.max_index()
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-bluhm-truncated",
                        tau_limit=1.0 / (2 + last))
    if isinstance(expr, Power):
        inner = _symbolic(expr.child)
        if inner is None:
            return None
        return _verdict(inner.outcome, "symbolic-power-closure",
                        n=expr.n, child_rule=inner.evidence.rule)
    if isinstance(expr, Product):
        allowed = []
        for child in expr.children:
            v = _symbolic(child)
            if v is None:
                return None
            allowed.append(v)
        outcomes = [v.outcome for v in allowed]
        rules = [v.evidence.rule for v in allowed]
        if any(r == "symbolic-zero-function" for r in rules):
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-zero-function")
        if any(o is Outcome.NOT_IN_FOURIER_SET for o in outcomes):
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-product",
                            note="liminf tau >= liminf over the excluded factor "
                                 "(all factors bounded)", child_rules=rules)
        gaps = sum(o is Outcome.GAP for o in outcomes)
        if gaps == 0:
            return _verdict(Outcome.IN_FOURIER_SET, "symbolic-product",
                            note="tau of the product is the sum of vanishing taus",
                            child_rules=rules)
        if gaps == 1:
            return _verdict(Outcome.GAP, "symbolic-product",
                            note="single oscillating factor, others admissible",
                            child_rules=rules)
        return _verdict(Outcome.INCONCLUSIVE, "symbolic-product",
                        note="two or more oscillating factors: the summed "
                             "exponent may leave the gap", child_rules=rules)
    if isinstance(expr, AbsCosTimes):
        inner = _symbolic(expr.child)
        if inner is None:
            return None
        if inner.outcome is Outcome.NOT_IN_FOURIER_SET:
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-abscos",
                            note="f <= excluded factor pointwise")
        if inner.outcome is Outcome.IN_FOURIER_SET:
            return _verdict(Outcome.GAP, "symbolic-abscos",
                            note="unbounded zero set denies the admissibility "
                                 "condition; cosine peaks deny the exclusion "
                                 "condition")
        return _verdict(inner.outcome, "symbolic-abscos",
                        child_rule=inner.evidence.rule)
    if isinstance(expr, TauExponent):
        tau = expr.tau
        if isinstance(tau, TauConst):
            if tau.c == 0.0:
                return _verdict(Outcome.IN_FOURIER_SET, "symbolic-tau-exponent",
                                note="f is constant 1")
            return _verdict(Outcome.NOT_IN_FOURIER_SET, "symbolic-tau-exponent",
                            tau_limit=tau.c)
        if isinstance(tau, TauAbsCos):
            return _verdict(Outcome.GAP, "symbolic-tau-exponent",
                            note="tau oscillates between 0 and 1 with liminf 0")
        return None  # TauCustom: numeric fallback
    return None


def _attached_certificate(expr: DecayExpr, policy: ClassifyPolicy) -> Verdict | None:
    text = expr.text()
    for cert in policy.certificates:
        if getattr(cert, "target_expr", None) == text:
            outcome = (Outcome.IN_FOURIER_SET if cert.direction == "in"
                       else Outcome.NOT_IN_FOURIER_SET)
            return _verdict(outcome, "multiplier-certificate",
                            period=cert.period, citations=list(cert.citations))
    return None


def _tau_trend_verdict(taus: np.ndarray, policy: ClassifyPolicy, rule: str,
                       grid: np.ndarray, closes_gap_note: str) -> Verdict:
    """Once a gap-closing hypothesis is established, decide by the tau tail."""
    q = 3 * len(taus) // 4
    tail = taus[q:]
    decreasing = bool(np.all(np.diff(taus[len(taus) // 2:]) <= 1e-12))
    if decreasing and tail[-1] < policy.tau_positive_min:
        return _verdict(Outcome.IN_FOURIER_SET, rule,
                        note=closes_gap_note + "; tau decreasing with tail below "
                             "the positivity threshold",
                        gammas=grid, taus=taus)
    if tail.min() >= policy.tau_positive_min:
        return _verdict(Outcome.NOT_IN_FOURIER_SET, rule,
                        note=closes_gap_note + "; tau tail bounded away from 0",
                        gammas=grid, taus=taus)
    return _verdict(Outcome.INCONCLUSIVE, rule,
                    note=closes_gap_note + "; tau tail in the indeterminate band",
                    gammas=grid, taus=taus)


def classify(expr: DecayExpr, policy: ClassifyPolicy = DEFAULT_POLICY) -> Verdict:
    """Classify a decay expression; gap verdicts may be overridden by an
    attached multiplier certificate."""
    cert = _attached_certificate(expr, policy)
    if cert is not None:
        return cert
    symbolic = _symbolic(expr)
    if symbolic is not None:
        return symbolic

    # numeric fallback on the doubling gamma grid
    grid = policy.gamma_grid()
    gamma_min = -math.inf if expr.xi_min == 0.0 else math.log(expr.xi_min)
    grid = grid[grid > max(gamma_min * 1.0000001, gamma_min + 1e-9)]
    if len(grid) < 8:
        return _verdict(Outcome.INCONCLUSIVE, "numeric-grid-too-short",
                        note="cutoff leaves fewer than 8 doubling points")
    phis = np.array([eval_phi(expr, float(g)) for g in grid])
    zero_mask = np.isinf(phis)
    if zero_mask.any():
        last_quarter = zero_mask[3 * len(grid) // 4:]
        if last_quarter.any():
            return _verdict(Outcome.GAP, "numeric-unbounded-zero-set",
                            note="sampled zero set reaches the far tail, denying "
                                 "the admissibility condition; no exclusion "
                                 "certificate",
                            zero_gammas=grid[zero_mask])
        grid, phis = grid[~zero_mask], phis[~zero_mask]
    taus = phis / grid

    q = 3 * len(grid) // 4
    tail_tau = taus[q:]
    if tail_tau.max() < policy.tau_zero_max:
        return _verdict(Outcome.IN_FOURIER_SET, "tau-limit-zero",
                        note="max tau over the last grid quarter below threshold",
                        gammas=grid, taus=taus, threshold=policy.tau_zero_max)
    if tail_tau.min() > policy.tau_positive_min:
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "tau-limit-positive",
                        note="min tau over the last grid quarter above threshold",
                        gammas=grid, taus=taus, threshold=policy.tau_positive_min)

    # second differences of phi: slopes on the (uneven) doubling grid
    slopes = np.diff(phis) / np.diff(grid)
    dslopes = np.diff(slopes)
    scale = max(1.0, float(np.abs(slopes).max()))
    tol = policy.second_diff_rel_tol * scale
    nonconstant = float(np.abs(phis - phis[0]).max()) > tol
    if np.all(dslopes >= -tol) and nonconstant:
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "phi-convex",
                        note="slopes of phi nondecreasing on the sampled tail "
                             "and phi nonconstant",
                        gammas=grid, phis=phis)
    if np.all(dslopes <= tol):
        return _tau_trend_verdict(taus, policy, "phi-concave", grid,
                                  "phi concave on the sample closes the gap")

    # multiplicativity of f(xi^lambda) vs f(xi)^lambda, in phi form
    sub, sup = True, True
    pairs = []
    for g in grid[: len(grid) // 2]:
        for lam in policy.mult_lambdas:
            if lam * g > grid[-1]:
                continue
            lhs = eval_phi(expr, lam * g)
            rhs = lam * eval_phi(expr, float(g))
            pairs.append((float(g), lam, lhs, rhs))
            t = policy.mult_rel_tol * max(1.0, abs(rhs))
            if lhs > rhs + t:
                sub = False
            if lhs < rhs - t:
                sup = False
    if sup and not sub:
        return _verdict(Outcome.NOT_IN_FOURIER_SET, "tau-supermultiplicative",
                        note="f(xi^lambda) <= f(xi)^lambda on all sampled pairs "
                             "forces a positive tau limit",
                        pairs=pairs)
    if sub and not sup:
        return _tau_trend_verdict(taus, policy, "tau-submultiplicative", grid,
                                  "f(xi^lambda) >= f(xi)^lambda on all sampled "
                                  "pairs closes the gap")
    return _verdict(Outcome.INCONCLUSIVE, "no-test-fired",
                    note="tau in the indeterminate band, mixed second "
                         "differences, mixed multiplicativity",
                    gammas=grid, taus=taus)
