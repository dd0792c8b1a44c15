"""Sparse spectra of the 1-periodic prime-window densities.

The level-k window for a prime p places a scaled mother bump of half-width
p^-(2+k) at every rational j/p, so that the support lies exactly inside
{x : ||px|| <= p^-(1+k)}:

    phi_p(x) = sum_j p^(1+k) * w(p^(2+k) * (x - j/p)),   1-periodized,

whose Fourier coefficients vanish off the stride p and equal w_hat(n * p^-(2+k))
on it. g_{M,k} is the arithmetic mean of phi_p over the primes in (M, 2M].

A spectrum is *complete* when every true coefficient is either stored or provably
below the truncation threshold (the dropped l1 mass is carried along); it is
*windowed* when nothing beyond |n| = window is represented, in which case a sup
bound for the unrepresented coefficients travels with it and every downstream
error bound uses the distance to the window edge. Products of windowed spectra
are the algebra of the truncated objects; reports must (and do) say so.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import sympy

from .errors import CapExceededError, RajchmanError
from .windows import (SmoothBump, build_psi0, envelope_l1_tail, mother_window,
                      window_envelope, window_transform)

#: desk-scale frequency support bound
N_MAX = 1 << 22
#: default per-coefficient truncation threshold
TAU_TRUNC_DEFAULT = 1e-10
#: widths p^-(2+k) narrower than this resolution cap alias within float lattice
P_RESOLUTION_CAP = float(1 << 48)


def primes_in(M: int) -> list[int]:
    """Primes in (M, 2M], ascending (segmented sieve; nonempty by Bertrand)."""
    if M < 2:
        raise ValueError("M must be >= 2")
    return [int(p) for p in sympy.primerange(M + 1, 2 * M + 1)]


def _envelope_cut(tau: float) -> float:
    """Smallest eta (>=1) with window_envelope(eta) <= tau, by bisection."""
    lo, hi = 1.0, 2.0
    while window_envelope(hi) > tau:
        hi *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if window_envelope(mid) > tau:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass
class SparseSpectrum:
    """Coefficient map of a 1-periodic density, sorted by frequency.

    n, c: stored frequencies and values (|c| >= tau_trunc).
    window: None for complete support; otherwise nothing beyond |n| = window is
        represented and ``tail_sup`` bounds each unrepresented true coefficient.
    dropped_l1: certified upper bound on the l1 mass of true coefficients that
        were computed (or bounded) and not stored inside the representation.
    """

    n: np.ndarray
    c: np.ndarray
    tau_trunc: float = TAU_TRUNC_DEFAULT
    window: int | None = None
    dropped_l1: float = 0.0
    tail_sup: float = 0.0
    conjugate_symmetric: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.n = np.asarray(self.n, dtype=np.int64)
        self.c = np.asarray(self.c, dtype=np.complex128)
        if self.n.shape != self.c.shape:
            raise ValueError("frequency and coefficient arrays must align")
        order = np.argsort(self.n, kind="stable")
        self.n, self.c = self.n[order], self.c[order]

    # -- queries ------------------------------------------------------------

    def coefficient(self, n: int) -> complex:
        idx = np.searchsorted(self.n, n)
        if idx < len(self.n) and self.n[idx] == n:
            return complex(self.c[idx])
        return 0.0j

    def l1(self) -> float:
        return float(np.abs(self.c).sum())

    def span(self) -> int:
        return int(np.abs(self.n).max()) if len(self.n) else 0

    def is_complete(self) -> bool:
        return self.window is None

    def validate_symmetry(self, tol: float = 1e-12) -> None:
        if not self.conjugate_symmetric:
            return
        c0 = self.coefficient(0)
        if abs(c0.imag) > tol:
            raise RajchmanError(f"coefficient at 0 not real: {c0}")
        mirrored = dict(zip((-self.n).tolist(), np.conj(self.c).tolist()))
        for n, c in zip(self.n.tolist(), self.c.tolist()):
            other = mirrored.get(n)
            if other is None or abs(c - other) > tol * max(1.0, abs(c)):
                raise RajchmanError(f"conjugate symmetry broken at n={n}")

    def reconstruct(self, x) -> np.ndarray:
        """Trigonometric reconstruction sum_n c_n e^{2 pi i n x}, real part."""
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(len(x_arr))
        chunk = 4096
        for lo in range(0, len(self.n), chunk):
            ns = self.n[lo:lo + chunk]
            cs = self.c[lo:lo + chunk]
            out += (cs[None, :] * np.exp(2j * math.pi * x_arr[:, None] * ns[None, :])).real.sum(axis=1)
        return out if np.ndim(x) else float(out[0])

    # -- persistence ----------------------------------------------------------

    def to_json(self) -> dict:
        meta = {"tau_trunc": self.tau_trunc, "window": self.window,
                "dropped_l1": self.dropped_l1, "tail_sup": self.tail_sup,
                "conjugate_symmetric": self.conjugate_symmetric}
        meta.update(self.meta)
        coeffs = [[int(n), float(c.real), float(c.imag)]
                  for n, c in zip(self.n.tolist(), self.c.tolist())]
        return {"meta": meta, "coeffs": coeffs}

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    @staticmethod
    def from_json(obj: dict) -> "SparseSpectrum":
        meta = dict(obj["meta"])
        coeffs = obj["coeffs"]
        n = np.array([row[0] for row in coeffs], dtype=np.int64)
        c = np.array([complex(row[1], row[2]) for row in coeffs])
        return SparseSpectrum(
            n=n, c=c, tau_trunc=meta.pop("tau_trunc"),
            window=meta.pop("window"), dropped_l1=meta.pop("dropped_l1"),
            tail_sup=meta.pop("tail_sup"),
            conjugate_symmetric=meta.pop("conjugate_symmetric"), meta=meta)

    @staticmethod
    def load(path) -> "SparseSpectrum":
        with open(path, encoding="utf-8") as fh:
            return SparseSpectrum.from_json(json.load(fh))


def delta_spectrum() -> SparseSpectrum:
    """The identity for spectral multiplication: density identically 1."""
    return SparseSpectrum(n=np.array([0]), c=np.array([1.0 + 0j]),
                          meta={"kind": "delta"})


# ---------------------------------------------------------------------------
# prime windows

def check_resolution_cap(p: int, k: int) -> float:
    """Bump width p^-(2+k): refuse widths below the representable resolution."""
    scale = float(p) ** (2 + k)
    if scale > P_RESOLUTION_CAP:
        raise CapExceededError(
            f"width p^-(2+k) = {p}^-{2 + k} below representable resolution",
            report={"p": p, "k": k, "scale": scale, "cap": P_RESOLUTION_CAP})
    return scale


def prime_window_spectrum(p: int, k: int, tau_trunc: float = TAU_TRUNC_DEFAULT,
                          window: int | None = None) -> SparseSpectrum:
    """Spectrum of the level-k window at prime p: w_hat(i/p^(1+k)) at n = p*i.

    Support beyond N_MAX is windowed automatically with a truncation report in
    the returned fields rather than failing.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not sympy.isprime(p):
        raise ValueError(f"p = {p} is not prime")
    check_resolution_cap(p, k)
    stride_scale = float(p) ** (1 + k)  # coefficient argument is i / stride_scale
    eta_cut = _envelope_cut(tau_trunc)
    i_full = int(math.ceil(eta_cut * stride_scale))
    cap = window if window is not None else N_MAX
    i_keep = min(i_full, cap // p)
    windowed = i_keep < i_full or window is not None
    i = np.arange(-i_keep, i_keep + 1, dtype=np.int64)
    vals = np.asarray(window_transform(i / stride_scale), dtype=float)
    keep = np.abs(vals) >= tau_trunc
    dropped_interior = float(np.abs(vals[~keep]).sum())
    tail_sup = 0.0
    beyond_l1 = 0.0
    if i_keep < i_full:
        eta0 = (i_keep + 1) / stride_scale
        tail_sup = float(window_envelope(eta0))
        beyond_l1 = 2.0 * envelope_l1_tail(max(eta0, 1.0), 1.0 / stride_scale)
    spec = SparseSpectrum(
        n=p * i[keep], c=vals[keep].astype(np.complex128), tau_trunc=tau_trunc,
        window=(cap if windowed else None), dropped_l1=dropped_interior,
        tail_sup=tail_sup,
        meta={"kind": "prime-window", "p": p, "k": k,
              "beyond_window_l1": beyond_l1})
    return spec


def gM_spectrum(M: int, k: int, tau_trunc: float = TAU_TRUNC_DEFAULT,
                window: int | None = None) -> SparseSpectrum:
    """Arithmetic mean of the prime windows over p in (M, 2M]; mass 1 at n = 0."""
    primes = primes_in(M)
    parts = [prime_window_spectrum(p, k, tau_trunc=tau_trunc, window=window)
             for p in primes]
    share = 1.0 / len(parts)
    all_n = np.concatenate([s.n for s in parts])
    all_c = np.concatenate([s.c for s in parts]) * share
    uniq, inverse = np.unique(all_n, return_inverse=True)
    acc = np.zeros(len(uniq), dtype=np.complex128)
    np.add.at(acc, inverse, all_c)
    keep = np.abs(acc) >= tau_trunc
    dropped = float(np.abs(acc[~keep]).sum()) + share * sum(s.dropped_l1 for s in parts)
    windows = [s.window for s in parts]
    combined_window = None if all(w is None for w in windows) else \
        min(w for w in windows if w is not None)
    return SparseSpectrum(
        n=uniq[keep], c=acc[keep], tau_trunc=tau_trunc, window=combined_window,
        dropped_l1=dropped, tail_sup=share * sum(s.tail_sup for s in parts),
        meta={"kind": "g_M", "M": M, "k": k, "primes": primes,
              "beyond_window_l1": share * sum(s.meta.get("beyond_window_l1", 0.0)
                                              for s in parts)})


def bump_density(primes: list[int], k: int):
    """Analytic evaluator for the averaged bump density g_{M,k}(x).

    Bump half-widths p^-(2+k) are below the lattice spacing 1/p, so only the
    nearest rational j/p contributes for each prime; the offset x*p - round(x*p)
    is the numerically stable form of the distance.
    """
    share = 1.0 / len(primes)

    def evaluate(x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x_arr)
        for p in primes:
            height = float(p) ** (1 + k)
            t = x_arr * p - np.round(x_arr * p)  # = p * (x - j/p), |t| <= 1/2
            out += height * mother_window(t * float(p) ** (1 + k))
        out *= share
        return out if np.ndim(x) else float(out[0])

    return evaluate


# ---------------------------------------------------------------------------
# products

def multiply_spectra(a: SparseSpectrum, b: SparseSpectrum,
                     tau_trunc: float = TAU_TRUNC_DEFAULT,
                     n_max: int = N_MAX) -> SparseSpectrum:
    """Spectrum of the pointwise product density: discrete convolution of maps.

    Support overflow beyond n_max is truncated and reported in the result fields,
    never raised. If either input is windowed, the result is the product of the
    *windowed* objects and is flagged as such in meta.
    """
    span_a, span_b = a.span(), b.span()
    dense_a = _to_dense(a)
    dense_b = _to_dense(b)
    full = np.convolve(dense_a, dense_b)
    span = span_a + span_b
    ns = np.arange(-span, span + 1, dtype=np.int64)
    keep_window = min(span, n_max)
    inside = np.abs(ns) <= keep_window
    dropped_overflow = float(np.abs(full[~inside]).sum())
    tail_sup = float(np.abs(full[~inside]).max()) if (~inside).any() else 0.0
    ns, vals = ns[inside], full[inside]
    keep = np.abs(vals) >= tau_trunc
    dropped_small = float(np.abs(vals[~keep]).sum())
    cross = (a.dropped_l1 * (b.l1() + b.dropped_l1)
             + b.dropped_l1 * a.l1())
    windowed_inputs = not (a.is_complete() and b.is_complete())
    window = None
    if span > n_max or windowed_inputs:
        window = keep_window if span > n_max else min(
            w for w in (a.window, b.window, keep_window) if w is not None)
    result = SparseSpectrum(
        n=ns[keep], c=vals[keep], tau_trunc=tau_trunc, window=window,
        dropped_l1=dropped_small + dropped_overflow + cross,
        tail_sup=max(tail_sup, a.tail_sup * (b.l1() + b.dropped_l1)
                     + b.tail_sup * a.l1()),
        conjugate_symmetric=a.conjugate_symmetric and b.conjugate_symmetric,
        meta={"kind": "product",
              "factors": [a.meta.get("kind", "?"), b.meta.get("kind", "?")],
              "windowed_product": windowed_inputs,
              "overflow_dropped_l1": dropped_overflow})
    return result


def _to_dense(s: SparseSpectrum) -> np.ndarray:
    span = s.span()
    dense = np.zeros(2 * span + 1, dtype=np.complex128)
    dense[s.n + span] = s.c
    return dense


# ---------------------------------------------------------------------------
# densities with a smooth compactly supported factor

@dataclass
class CompactDensity:
    """psi0(x) * G(x) with G given by a sparse periodic spectrum."""

    spectrum: SparseSpectrum
    psi0: SmoothBump = field(default_factory=build_psi0)
    provenance: dict = field(default_factory=dict)

    def density(self, x) -> np.ndarray:
        return self.psi0(x) * self.spectrum.reconstruct(x)

    def transform(self, xi) -> complex | np.ndarray:
        """mu_hat(xi) = sum_n G_hat(n) psi0_hat(xi - n) over stored frequencies."""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(len(xi_arr), dtype=np.complex128)
        for j, x in enumerate(xi_arr):
            out[j] = np.sum(self.spectrum.c * self.psi0.transform(x - self.spectrum.n))
        return out if np.ndim(xi) else complex(out[0])

    def transform_error_bound(self, xi: float = 0.0) -> float:
        """Certified bound on |true windowed-object transform - transform(xi)|.

        Dropped in-window coefficients can contribute up to their l1 at the psi0
        peak; unrepresented beyond-window coefficients are damped by the psi0
        envelope across the distance from xi to the window edge.
        """
        err = self.spectrum.dropped_l1  # max |psi0_hat| = 1
        if not self.spectrum.is_complete() and self.spectrum.tail_sup > 0.0:
            dist = max(self.spectrum.window - abs(xi), 1.0)
            err += 2.0 * self.spectrum.tail_sup * envelope_l1_tail(dist / 2.0, 0.5)
        return err

    def mass(self) -> float:
        return float(np.real(self.transform(0.0)))
