"""Exact small-instance oracles: enumeration, quadrature, direct inequalities.

Everything here is deliberately independent of the closed forms elsewhere in
the package.  Bayes errors come from explicit enumeration, integrals from
adaptive Simpson quadrature, so the fast paths have something honest to be
checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divergence import DiscretePmf, GaussianShiftPair, _lam

__all__ = [
    "MAX_ORACLE_OUTCOMES",
    "CapabilityError",
    "exact_bayes_error",
    "decoder_error",
    "min_distance_decode",
    "min_distance_decoder_error",
    "adaptive_simpson",
    "renyi_gaussian_quadrature",
    "HypercubeDensityFamily",
    "density_sq_integral",
    "hellinger_sq_distance",
    "SecondMomentCheck",
    "iid_second_moment_check",
]

# Enumeration cap: joint outcome count above this raises CapabilityError.
MAX_ORACLE_OUTCOMES = 10**6


class CapabilityError(ValueError):
    """Instance is too large for exact enumeration."""


def _conditional_matrix(conditionals) -> np.ndarray:
    pmfs = list(conditionals)
    if not pmfs:
        raise ValueError("need at least one conditional")
    size = pmfs[0].support_size
    if any(pm.support_size != size for pm in pmfs):
        raise ValueError("conditionals must share one alphabet")
    if size > MAX_ORACLE_OUTCOMES:
        raise CapabilityError(
            f"alphabet of size {size} exceeds enumeration cap {MAX_ORACLE_OUTCOMES}"
        )
    return np.stack([pm.probs for pm in pmfs])


def exact_bayes_error(conditionals) -> float:
    """Minimum average error probability of any decoder, uniform prior.

    Enumerates the alphabet: 1 - sum_y max_i p_i(y) / M.
    """
    mat = _conditional_matrix(conditionals)
    m_codewords = mat.shape[0]
    return float(1.0 - mat.max(axis=0).sum() / m_codewords)


def decoder_error(conditionals, decisions) -> float:
    """Exact average error of the decoder given by decisions[y] = index."""
    mat = _conditional_matrix(conditionals)
    m_codewords, size = mat.shape
    dec = np.asarray(decisions, dtype=np.int64).reshape(-1)
    if dec.shape != (size,):
        raise ValueError("decisions must assign one index per outcome")
    if np.any(dec < 0) or np.any(dec >= m_codewords):
        raise ValueError("decision index out of range")
    correct = mat[dec, np.arange(size)]
    return float(1.0 - correct.sum() / m_codewords)


def min_distance_decode(point, codewords, metric_fn) -> int:
    """Index of the codeword nearest to point; ties go to the lowest index."""
    best = 0
    best_d = metric_fn(point, codewords[0])
    for j in range(1, len(codewords)):
        d = metric_fn(point, codewords[j])
        if d < best_d:
            best, best_d = j, d
    return best


def min_distance_decoder_error(conditionals, estimates, codewords, metric_fn) -> float:
    """Exact error of estimate-then-round decoding.

    estimates[y] is the estimator output for outcome y; it is rounded to the
    nearest codeword under metric_fn.  Never beats exact_bayes_error.
    """
    decisions = [min_distance_decode(est, codewords, metric_fn) for est in estimates]
    return decoder_error(conditionals, decisions)


# === Quadrature ===


def adaptive_simpson(f, a, b, atol=1e-10, rtol=0.0, max_depth=48) -> float:
    """Adaptive Simpson integration of f over [a, b] with Richardson correction.

    Splits an interval until the two-panel estimate is within
    15 * max(atol, rtol * |estimate|) of the one-panel estimate; atol is
    halved per split so the per-leaf budgets sum to the requested total.
    """
    a = float(a)
    b = float(b)
    fa, fb = f(a), f(b)
    mid = 0.5 * (a + b)
    fm = f(mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, atol, rtol, max_depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, atol, rtol, depth):
    mid = 0.5 * (a + b)
    lm = 0.5 * (a + mid)
    rm = 0.5 * (mid + b)
    flm, frm = f(lm), f(rm)
    left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(err) <= 15.0 * max(atol, rtol * abs(left + right)):
        return left + right + err / 15.0
    return _simpson_step(
        f, a, mid, fa, flm, fm, left, 0.5 * atol, rtol, depth - 1
    ) + _simpson_step(f, mid, b, fm, frm, fb, right, 0.5 * atol, rtol, depth - 1)


def renyi_gaussian_quadrature(pair: GaussianShiftPair, order, rtol=1e-11) -> float:
    """Gaussian-pair Renyi divergence by direct quadrature, no closed form.

    Integrates p(y)^(1+lam) q(y)^(-lam) for p = N(mu, sigma_sq),
    q = N(0, sigma_sq), mu = sqrt(shift_sq), over the hull of the three
    relevant centers 0, mu and (1+lam) mu padded by 40 sigma.
    """
    lam = _lam(order)
    mu = math.sqrt(pair.shift_sq)
    sigma = math.sqrt(pair.sigma_sq)
    log_norm = -0.5 * math.log(2.0 * math.pi * pair.sigma_sq)

    def integrand(y):
        quad = (1.0 + lam) * (y - mu) ** 2 - lam * y * y
        return math.exp(log_norm - quad / (2.0 * pair.sigma_sq))

    centers = (0.0, mu, (1.0 + lam) * mu)
    lo = min(centers) - 40.0 * sigma
    hi = max(centers) + 40.0 * sigma
    total = adaptive_simpson(integrand, lo, hi, atol=0.0, rtol=rtol)
    return math.log(total) / lam


# === Piecewise-perturbed densities on [0, 1] ===

_BUMPS = {
    # tag: (g on [0, 1), integral of g^2, sup |g|)
    "sin": (lambda u: np.sin(2.0 * np.pi * u), 0.5, 1.0),
    "double_sin": (lambda u: np.sin(4.0 * np.pi * u), 0.5, 1.0),
}


@dataclass(frozen=True)
class HypercubeDensityFamily:
    """Densities f_tau = 1 + sum_j tau_j g_j on [0, 1], tau in {-1, +1}^m.

    g_j(x) = (c / m^2) g(m x - j) on [j/m, (j+1)/m) and zero elsewhere, with a
    mean-zero bump g.  The bump is chosen by tag; its squared integral a and
    sup norm are recorded so closed forms can be stated per instance.
    """

    m: int
    c: float
    g_spec: str = "sin"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise ValueError("c must be finite and non-negative")
        if self.g_spec not in _BUMPS:
            raise ValueError(f"unknown bump tag {self.g_spec!r}")
        if self.c * self.bump_sup / self.m**2 >= 1.0:
            raise ValueError("c sup|g| / m^2 must stay below 1 for positivity")

    @property
    def bump_sq_integral(self) -> float:
        """a = integral of g^2 over [0, 1]."""
        return _BUMPS[self.g_spec][1]

    @property
    def bump_sup(self) -> float:
        return _BUMPS[self.g_spec][2]

    @property
    def sq_integral_excess(self) -> float:
        """Closed form for integral(f_tau^2) - 1, the same for every tau."""
        return self.c**2 * self.bump_sq_integral / self.m**4

    def check_tau(self, tau) -> np.ndarray:
        arr = np.asarray(tau, dtype=np.int64).reshape(-1)
        if arr.shape != (self.m,) or np.any(np.abs(arr) != 1):
            raise ValueError("tau must be a vector of m entries in {-1, +1}")
        return arr

    def density_value(self, tau, x: float) -> float:
        """f_tau(x) for scalar x in [0, 1]; right endpoint folds to the last cell."""
        tau = self.check_tau(tau)
        g = _BUMPS[self.g_spec][0]
        j = min(int(x * self.m), self.m - 1)
        u = x * self.m - j
        return 1.0 + tau[j] * (self.c / self.m**2) * float(g(u))


def density_sq_integral(family: HypercubeDensityFamily, tau, atol=1e-12) -> float:
    """integral of f_tau^2 over [0, 1] by per-cell adaptive Simpson."""
    tau = family.check_tau(tau)
    m = family.m
    g = _BUMPS[family.g_spec][0]
    scale = family.c / m**2
    total = 0.0
    for j in range(m):
        sign = float(tau[j])

        def f_sq(x, j=j, sign=sign):
            u = x * m - j
            val = 1.0 + sign * scale * float(g(u))
            return val * val

        total += adaptive_simpson(f_sq, j / m, (j + 1) / m, atol=atol)
    return total


def hellinger_sq_distance(family: HypercubeDensityFamily, tau_a, tau_b, atol=1e-13) -> float:
    """integral of (sqrt(f_a) - sqrt(f_b))^2, cell by cell.

    Cells where the sign vectors agree contribute exactly zero and are
    skipped, which also keeps the result symmetric in its arguments.
    """
    ta = family.check_tau(tau_a)
    tb = family.check_tau(tau_b)
    m = family.m
    g = _BUMPS[family.g_spec][0]
    scale = family.c / m**2
    total = 0.0
    for j in range(m):
        if ta[j] == tb[j]:
            continue

        def gap_sq(x, j=j, sa=float(ta[j]), sb=float(tb[j])):
            u = x * m - j
            bump = scale * float(g(u))
            diff = math.sqrt(1.0 + sa * bump) - math.sqrt(1.0 + sb * bump)
            return diff * diff

        total += adaptive_simpson(gap_sq, j / m, (j + 1) / m, atol=atol)
    return total


@dataclass(frozen=True)
class SecondMomentCheck:
    """Outcome of the iid second-moment inequality check."""

    product_term: float
    exp_bound: float
    ok: bool


def iid_second_moment_check(family: HypercubeDensityFamily, n_samples: int) -> SecondMomentCheck:
    """Check (1 + x)^n <= exp(x n) at x = c^2 a / m^4.

    (1 + x)^n is the exact n-sample second moment of dP_tau/dQ under the
    uniform reference (identical for every tau), and exp(x n) is the bound the
    sample-size converse uses in place of it.
    """
    n = int(n_samples)
    if n < 1:
        raise ValueError("n_samples must be a positive integer")
    x = family.sq_integral_excess
    product_term = (1.0 + x) ** n
    exp_bound = math.exp(x * n)
    return SecondMomentCheck(product_term, exp_bound, product_term <= exp_bound)
