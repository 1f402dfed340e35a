"""Divergence measures on finite alphabets and simple parametric pairs.

Renyi-type quantities are parametrized by the order offset lam > 0, i.e. the
divergence of order 1 + lam.  That offset is the exponent appearing in the
change-of-measure steps behind the converse bounds in this package, so it is
passed around explicitly rather than the order itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PMF_SUM_TOL",
    "AbsoluteContinuityError",
    "DiscretePmf",
    "RenyiOrder",
    "GaussianShiftPair",
    "BernoulliPair",
    "renyi_discrete",
    "renyi_product_iid",
    "renyi_gaussian_shift",
    "renyi_bernoulli",
    "verdu_sason_renyi_upper",
    "hellinger_discrete",
    "kl_discrete",
    "hellinger_kl_coefficient",
    "e_gamma_divergence",
    "product_pmf",
    "iid_product_pmf",
    "mixture_pmf",
]

# Absolute slack allowed on sum(probs) == 1 at construction time.
PMF_SUM_TOL = 1e-12

# Width of the neighbourhood of t = 1 where the kappa coefficient switches to
# its Taylor form (the closed form is 0/0 at t = 1).
_KAPPA_TAYLOR_WINDOW = 1e-6


class AbsoluteContinuityError(ValueError):
    """First argument puts mass where the reference distribution has none."""


@dataclass(frozen=True, eq=False)
class DiscretePmf:
    """Probability mass function on a finite alphabet {0, ..., K-1}."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64).reshape(-1).copy()
        if arr.size == 0:
            raise ValueError("pmf needs at least one outcome")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise ValueError("pmf entries must be finite and non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > PMF_SUM_TOL:
            raise ValueError(
                f"pmf entries sum to {total!r}; must equal 1 within {PMF_SUM_TOL}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def support_size(self) -> int:
        return int(self.probs.size)

    def __len__(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class RenyiOrder:
    """Order 1 + lam of a Renyi divergence, stored through the offset lam."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0.0):
            raise ValueError("order offset lam must be finite and positive")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class GaussianShiftPair:
    """N(mu, sigma_sq I) versus N(0, sigma_sq I), described by shift_sq = |mu|^2."""

    shift_sq: float
    sigma_sq: float

    def __post_init__(self):
        if not (math.isfinite(self.shift_sq) and self.shift_sq >= 0.0):
            raise ValueError("shift_sq must be finite and non-negative")
        if not (math.isfinite(self.sigma_sq) and self.sigma_sq > 0.0):
            raise ValueError("sigma_sq must be finite and positive")


@dataclass(frozen=True)
class BernoulliPair:
    """Bernoulli(p) versus Bernoulli(q)."""

    p: float
    q: float

    def __post_init__(self):
        for name, value in (("p", self.p), ("q", self.q)):
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1]")


def _lam(order) -> float:
    """Order offset as a plain float; accepts RenyiOrder or a positive number."""
    lam = order.lam if isinstance(order, RenyiOrder) else float(order)
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError("order offset lam must be finite and positive")
    return lam


def _common_support(p: DiscretePmf, q: DiscretePmf):
    if p.support_size != q.support_size:
        raise ValueError("pmfs must share one alphabet")
    return p.probs, q.probs


def _check_domination(p_arr, q_arr):
    if np.any((p_arr > 0.0) & (q_arr == 0.0)):
        raise AbsoluteContinuityError("p puts mass on a zero of q")


def renyi_discrete(p: DiscretePmf, q: DiscretePmf, order) -> float:
    """Renyi divergence of order 1+lam: log(sum_i p_i^(1+lam) q_i^(-lam)) / lam.

    Outcomes with p_i = 0 contribute nothing regardless of q_i.  Mass of p on
    a zero of q raises AbsoluteContinuityError.  An overflowing sum yields
    math.inf rather than an exception.
    """
    lam = _lam(order)
    p_arr, q_arr = _common_support(p, q)
    _check_domination(p_arr, q_arr)
    sup = p_arr > 0.0
    ps = p_arr[sup]
    qs = q_arr[sup]
    with np.errstate(over="ignore"):
        total = float(np.sum(ps ** (1.0 + lam) * qs ** (-lam)))
    if math.isinf(total):
        return math.inf
    return math.log(total) / lam


def renyi_product_iid(p: DiscretePmf, q: DiscretePmf, order, n_factors: int) -> float:
    """Divergence between n-fold iid products; additivity gives n * D(p||q)."""
    n = int(n_factors)
    if n < 1:
        raise ValueError("n_factors must be a positive integer")
    return n * renyi_discrete(p, q, order)


def renyi_gaussian_shift(pair: GaussianShiftPair, order) -> float:
    """Closed form for a Gaussian location pair: (1+lam) shift_sq / (2 sigma_sq)."""
    lam = _lam(order)
    return (1.0 + lam) * pair.shift_sq / (2.0 * pair.sigma_sq)


def renyi_bernoulli(pair: BernoulliPair, order) -> float:
    """Renyi divergence between Bernoulli(p) and Bernoulli(q)."""
    lam = _lam(order)
    p, q = pair.p, pair.q
    if (p > 0.0 and q == 0.0) or (p < 1.0 and q == 1.0):
        raise AbsoluteContinuityError("Bernoulli(p) not dominated by Bernoulli(q)")
    total = 0.0
    if p > 0.0:
        total += p ** (1.0 + lam) * q ** (-lam)
    if p < 1.0:
        total += (1.0 - p) ** (1.0 + lam) * (1.0 - q) ** (-lam)
    if math.isinf(total):
        return math.inf
    return math.log(total) / lam


def verdu_sason_renyi_upper(pair: BernoulliPair, order) -> float:
    """Upper bound log(1 + 2 tv^2 / q_min) on the order-(1+lam) divergence.

    Valid for lam in (0, 1]; tv = |p - q| and q_min = min(q, 1 - q).
    """
    lam = _lam(order)
    if lam > 1.0:
        raise ValueError("upper bound only holds for lam in (0, 1]")
    tv = abs(pair.p - pair.q)
    q_min = min(pair.q, 1.0 - pair.q)
    if tv == 0.0:
        return 0.0
    if q_min == 0.0:
        return math.inf
    return math.log1p(2.0 * tv * tv / q_min)


def hellinger_discrete(p: DiscretePmf, q: DiscretePmf, order) -> float:
    """Hellinger divergence of order 1+lam: (sum_i p_i^(1+lam) q_i^(-lam) - 1) / lam.

    lam = 1 recovers the chi-square divergence.
    """
    lam = _lam(order)
    p_arr, q_arr = _common_support(p, q)
    _check_domination(p_arr, q_arr)
    sup = p_arr > 0.0
    ps = p_arr[sup]
    qs = q_arr[sup]
    with np.errstate(over="ignore"):
        total = float(np.sum(ps ** (1.0 + lam) * qs ** (-lam)))
    if math.isinf(total):
        return math.inf
    return (total - 1.0) / lam


def kl_discrete(p: DiscretePmf, q: DiscretePmf) -> float:
    """Kullback-Leibler divergence sum_i p_i log(p_i / q_i), 0 log 0 = 0."""
    p_arr, q_arr = _common_support(p, q)
    _check_domination(p_arr, q_arr)
    sup = p_arr > 0.0
    ps = p_arr[sup]
    qs = q_arr[sup]
    return float(np.sum(ps * np.log(ps / qs)))


def hellinger_kl_coefficient(order, ratio_sup: float) -> float:
    """Coefficient kappa(lam, t) relating Hellinger to KL divergence.

    kappa(lam, t) = (lam + t^(1+lam) - (1+lam) t) / (lam (t log t + 1 - t)),
    where t >= 1 bounds the likelihood ratio dP/dQ from above; then the
    order-(1+lam) Hellinger divergence is at most kappa(lam, t) * KL(P||Q).
    The closed form is 0/0 at t = 1, so values with |t - 1| < 1e-6 use the
    quadratic Taylor expansion around t = 1 instead.
    """
    lam = _lam(order)
    t = float(ratio_sup)
    if not math.isfinite(t) or t < 1.0:
        raise ValueError("ratio_sup must be finite and >= 1")
    s = t - 1.0
    if abs(s) < _KAPPA_TAYLOR_WINDOW:
        c2 = (lam - 1.0) * (lam - 2.0) / 12.0 + (lam - 1.0) / 9.0 - 1.0 / 18.0
        return (1.0 + lam) * (1.0 + lam * s / 3.0 + c2 * s * s)
    num = lam + t ** (1.0 + lam) - (1.0 + lam) * t
    den = lam * (t * math.log(t) + 1.0 - t)
    if math.isinf(num):
        return math.inf
    return num / den


def e_gamma_divergence(p: DiscretePmf, q: DiscretePmf, gamma: float) -> float:
    """E_gamma divergence sum_i max(p_i - gamma q_i, 0) for gamma > 0.

    Equals the best advantage P[T=1] - gamma Q[T=1] over all tests T, and is
    attained by the likelihood-ratio threshold test {p > gamma q}.
    """
    g = float(gamma)
    if not (math.isfinite(g) and g > 0.0):
        raise ValueError("gamma must be finite and positive")
    p_arr, q_arr = _common_support(p, q)
    return float(np.sum(np.maximum(p_arr - g * q_arr, 0.0)))


def product_pmf(p: DiscretePmf, q: DiscretePmf) -> DiscretePmf:
    """Product distribution on the pair alphabet, row-major outcome order."""
    return DiscretePmf(np.outer(p.probs, q.probs).ravel())


def iid_product_pmf(p: DiscretePmf, n_factors: int) -> DiscretePmf:
    """n-fold iid product of p with itself."""
    n = int(n_factors)
    if n < 1:
        raise ValueError("n_factors must be a positive integer")
    out = p
    for _ in range(n - 1):
        out = product_pmf(out, p)
    return out


def mixture_pmf(pmfs, weights=None) -> DiscretePmf:
    """Convex mixture of pmfs on a shared alphabet; uniform weights by default."""
    stack = np.stack([pm.probs for pm in pmfs])
    if weights is None:
        mixed = stack.mean(axis=0)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (stack.shape[0],) or np.any(w < 0.0):
            raise ValueError("weights must be non-negative, one per pmf")
        total = w.sum()
        if not math.isclose(total, 1.0, rel_tol=0.0, abs_tol=PMF_SUM_TOL):
            raise ValueError("weights must sum to 1")
        mixed = w @ stack
    return DiscretePmf(mixed)
