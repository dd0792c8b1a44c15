"""The control kernel theta_k and the Bluhm series built from it.

    theta_k(xi) = (1+|xi|)^(-1/(2+k)) * log(e+|xi|) * log(e+log(e+|xi|))

decays like a power times logarithms; the Bluhm series B(xi) = sum_k c_k theta_k(xi)
with a summable positive schedule decays slower than any power. Both are needed in
the log-abscissa domain far beyond float range, so the -log forms are computed
without ever exponentiating gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LOG_MAX = math.log(np.finfo(float).max)  # ~709.78


def theta_k(k: int, xi):
    """Exact formula evaluation; valid for all real xi, any k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x = np.abs(np.asarray(xi, dtype=float))
    l1 = np.log(math.e + x)
    l2 = np.log(math.e + l1)
    out = (1.0 + x) ** (-1.0 / (2 + k)) * l1 * l2
    return out if out.shape else float(out)


def log_theta_k(k: int, gamma):
    """log theta_k(e^gamma), stable for gamma far beyond log(float max)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    g = np.asarray(gamma, dtype=float)
    out = np.empty_like(g)
    small = g < _LOG_MAX - 1.0
    if small.any():
        out[small] = np.log(theta_k(k, np.exp(g[small])))
    big = ~small
    if big.any():
        gb = g[big]
        # log(1+xi) = gamma + log1p(e^-gamma) and L1 = log(e+xi) = gamma + log1p(e^(1-gamma));
        # both corrections underflow to zero in this branch.
        l1 = gb
        l2 = np.log(math.e + l1)
        out[big] = -gb / (2 + k) + np.log(l1) + np.log(l2)
    return out if out.shape else float(out)


def theta_sup_log_factor(xi):
    """Upper bound log(e+|xi|)*log(e+log(e+|xi|)) >= theta_k(xi) for every k."""
    x = np.abs(np.asarray(xi, dtype=float))
    l1 = np.log(math.e + x)
    out = l1 * np.log(math.e + l1)
    return out if out.shape else float(out)


@dataclass(frozen=True)
class BluhmSchedule:
    """Summable nonnegative coefficient schedule c_k, k >= 1.

    Either geometric (c_k = head * ratio^(k-1)) or an explicit finite tuple with
    zero tail. ``tail_sum(k)`` is the exact sum of all coefficients beyond index k,
    which makes truncation bounds certified rather than heuristic.
    """

    ratio: float = 0.5
    head: float = 0.5
    explicit: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.explicit is None:
            if not (0.0 < self.ratio < 1.0 and self.head > 0.0):
                raise ValueError("geometric schedule needs head > 0, 0 < ratio < 1")
        elif any(c < 0.0 for c in self.explicit):
            raise ValueError("explicit schedule coefficients must be >= 0")

    def coefficient(self, k: int) -> float:
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.explicit is not None:
            return self.explicit[k - 1] if k <= len(self.explicit) else 0.0
        return self.head * self.ratio ** (k - 1)

    def tail_sum(self, k: int) -> float:
        """Exact sum of c_j for j > k."""
        if self.explicit is not None:
            return float(sum(self.explicit[k:]))
        return self.head * self.ratio ** k / (1.0 - self.ratio)

    def total(self) -> float:
        return self.coefficient(1) + self.tail_sum(1)

    def max_index(self) -> int | None:
        return len(self.explicit) if self.explicit is not None else None

    def to_json(self) -> dict:
        if self.explicit is not None:
            return {"kind": "explicit", "coefficients": list(self.explicit)}
        return {"kind": "geometric", "head": self.head, "ratio": self.ratio}

    @staticmethod
    def from_json(obj: dict) -> "BluhmSchedule":
        if obj["kind"] == "explicit":
            return BluhmSchedule(explicit=tuple(obj["coefficients"]))
        return BluhmSchedule(ratio=obj["ratio"], head=obj["head"])


DEFAULT_BLUHM_SCHEDULE = BluhmSchedule()  # c_k = 2^-k


def bluhm_partial(xi, schedule: BluhmSchedule = DEFAULT_BLUHM_SCHEDULE,
                  k_trunc: int | None = None, rel_tail: float = 1e-16,
                  k_cap: int = 400) -> tuple[float, float, int]:
    """Truncated B(xi) = sum_{k>=1} c_k theta_k(xi) with a certified tail bound.

    The tail beyond K is bounded by tail_sum(K) * Theta_inf(xi) since theta_k
    increases toward the pure log factor as k grows. With k_trunc given the sum is
    cut exactly there; otherwise terms are added until the tail bound drops below
    rel_tail times the partial sum (or k_cap). Returns (value, tail_bound, K_used).
    """
    x = float(xi)
    sup_factor = float(theta_sup_log_factor(x))
    k_stop = k_trunc if k_trunc is not None else k_cap
    if schedule.max_index() is not None:
        k_stop = min(k_stop, schedule.max_index())
    total = 0.0
    k = 0
    while k < k_stop:
        k += 1
        total += schedule.coefficient(k) * theta_k(k, x)
        tail = schedule.tail_sum(k) * sup_factor
        if k_trunc is None and tail <= rel_tail * max(total, 1e-300):
            break
    return total, schedule.tail_sum(k) * sup_factor, k


def log_bluhm(gamma, schedule: BluhmSchedule = DEFAULT_BLUHM_SCHEDULE,
              rel_tail: float = 1e-16, k_cap: int = 400) -> float:
    """log B(e^gamma) via logsumexp over log c_k + log theta_k, stable for huge gamma."""
    g = float(gamma)
    if g < _LOG_MAX - 1.0:
        log_sup = math.log(float(theta_sup_log_factor(math.exp(g))))
    else:
        log_sup = math.log(g) + math.log(math.log(math.e + g))
    terms: list[float] = []
    best = -math.inf
    log_rel = math.log(rel_tail)
    k = 0
    while k < k_cap:
        k += 1
        c = schedule.coefficient(k)
        if c > 0.0:
            t = math.log(c) + float(log_theta_k(k, g))
            terms.append(t)
            best = max(best, t)
        mi = schedule.max_index()
        if mi is not None and k >= mi:
            break
        tail = schedule.tail_sum(k)
        if tail == 0.0 or (terms and math.log(tail) + log_sup < best + log_rel):
            break
    if not terms:
        raise ValueError("schedule has no positive coefficients")
    m = max(terms)
    return m + math.log(sum(math.exp(t - m) for t in terms))
