"""Lower bounds on M-ary identification error and the risks they imply.

The central bound turns per-codeword Renyi divergences to a reference
distribution into a floor on the average error probability of any decoder:

    eps >= 1 - (1+lam) / (lam M)^(lam/(1+lam)) * S^(1/(1+lam)),
    S = (1/M) sum_i exp(lam D_i),  D_i = Renyi_(1+lam)(P_i || Q),

valid for every lam > 0 and every reference Q dominating all conditionals.
Fano-type baselines live here too, so the two can be compared on equal
footing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergence import (
    AbsoluteContinuityError,
    DiscretePmf,
    GaussianShiftPair,
    _lam,
    hellinger_kl_coefficient,
    kl_discrete,
    mixture_pmf,
    renyi_discrete,
    renyi_gaussian_shift,
)

__all__ = [
    "Q_CHOICES",
    "ChannelFamily",
    "BoundReport",
    "LossSpec",
    "strong_converse_eps_from_log_terms",
    "strong_converse_eps_from_divergences",
    "strong_converse_bound",
    "optimize_lambda",
    "variational_bound",
    "optimal_q_discrete",
    "avg_kl_to_mixture",
    "fano_bound",
    "generalized_fano_log_m_bound",
    "generalized_fano_fixed_order_check",
    "risk_from_eps",
]

# Reference-distribution choices for discrete families ("explicit" is spelled
# by passing a DiscretePmf instead of a tag).
Q_CHOICES = ("uniform", "mixture", "qstar")

# exp() overflows past this; used to route extreme bounds to +-inf instead.
_EXP_OVERFLOW = 709.0

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class ChannelFamily:
    """M conditional distributions plus a reference-distribution choice.

    Conditionals are either all DiscretePmf on one alphabet or all
    GaussianShiftPair (each pair already names its centered reference, so
    q_choice is pinned to "centered" there).
    """

    conditionals: tuple
    q_choice: object = "mixture"

    def __post_init__(self):
        conds = tuple(self.conditionals)
        if not conds:
            raise ValueError("family needs at least one conditional")
        object.__setattr__(self, "conditionals", conds)
        if all(isinstance(c, DiscretePmf) for c in conds):
            kind = "discrete"
            size = conds[0].support_size
            if any(c.support_size != size for c in conds):
                raise ValueError("conditionals must share one alphabet")
            q = self.q_choice
            if isinstance(q, DiscretePmf):
                if q.support_size != size:
                    raise ValueError("explicit q must live on the family alphabet")
            elif q not in Q_CHOICES:
                raise ValueError(f"q_choice must be a DiscretePmf or one of {Q_CHOICES}")
        elif all(isinstance(c, GaussianShiftPair) for c in conds):
            kind = "gaussian"
            if self.q_choice != "centered":
                raise ValueError('gaussian families use q_choice="centered"')
        else:
            raise ValueError("conditionals must be all DiscretePmf or all GaussianShiftPair")
        object.__setattr__(self, "_kind", kind)

    @classmethod
    def gaussian(cls, pairs) -> "ChannelFamily":
        return cls(tuple(pairs), q_choice="centered")

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def m_codewords(self) -> int:
        return len(self.conditionals)

    def q_tag(self) -> str:
        return "explicit" if isinstance(self.q_choice, DiscretePmf) else str(self.q_choice)

    def reference_pmf(self, order=None) -> DiscretePmf:
        """The reference distribution Q actually used, resolved per q_choice."""
        if self.kind != "discrete":
            raise ValueError("reference_pmf applies to discrete families")
        if isinstance(self.q_choice, DiscretePmf):
            return self.q_choice
        if self.q_choice == "uniform":
            size = self.conditionals[0].support_size
            return DiscretePmf(np.full(size, 1.0 / size))
        if self.q_choice == "mixture":
            return mixture_pmf(self.conditionals)
        if order is None:
            raise ValueError("q_choice 'qstar' needs the divergence order")
        return optimal_q_discrete(self.conditionals, order)[0]

    def divergences(self, order) -> np.ndarray:
        """Per-codeword divergences to the reference; inf marks a domination failure."""
        lam = _lam(order)
        if self.kind == "gaussian":
            return np.array(
                [renyi_gaussian_shift(pair, lam) for pair in self.conditionals]
            )
        ref = self.reference_pmf(lam)
        out = np.empty(self.m_codewords)
        for i, cond in enumerate(self.conditionals):
            try:
                out[i] = renyi_discrete(cond, ref, lam)
            except AbsoluteContinuityError:
                out[i] = math.inf
        return out


@dataclass(frozen=True, eq=False)
class BoundReport:
    """One computed lower bound, with its raw (unclamped) value kept around."""

    method: str
    eps_lower: float
    eps_raw: float
    lambda_star: float | None = None
    gamma_star: float | None = None
    risk_lower: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.eps_lower <= 1.0:
            raise ValueError("eps_lower must be clamped to [0, 1]")

    def to_json_dict(self) -> dict:
        params = dict(self.params)
        if self.gamma_star is not None:
            params["gamma_star"] = self.gamma_star
        return {
            "method": self.method,
            "eps_lower": self.eps_lower,
            "eps_raw": self.eps_raw,
            "risk_lower": self.risk_lower,
            "lambda_star": self.lambda_star,
            "params": params,
        }


@dataclass(frozen=True)
class LossSpec:
    """Loss shape w plus the packing scale it is evaluated at.

    w_kind "identity" is w(u) = u, "power" is w(u) = u^p, "indicator" is
    w(u) = 1{u >= c}.  The risk floor uses w at u = A * psi_n, half the
    minimum packing distance.
    """

    w_kind: str
    A: float = 1.0
    psi_n: float = 1.0
    p: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.w_kind not in ("identity", "power", "indicator"):
            raise ValueError("w_kind must be identity, power or indicator")
        if self.A < 0.0 or self.psi_n < 0.0:
            raise ValueError("A and psi_n must be non-negative")
        if self.w_kind == "power" and (self.p is None or self.p <= 0.0):
            raise ValueError("power loss needs exponent p > 0")
        if self.w_kind == "indicator" and (self.c is None or self.c <= 0.0):
            raise ValueError("indicator loss needs threshold c > 0")

    def evaluate_w(self, u: float) -> float:
        if u < 0.0:
            raise ValueError("w is defined on u >= 0")
        if self.w_kind == "identity":
            return u
        if self.w_kind == "power":
            return u**self.p
        return 1.0 if u >= self.c else 0.0


def _clamp_eps(raw: float) -> float:
    if math.isnan(raw):
        raise ValueError("bound evaluated to NaN")
    return min(1.0, max(0.0, raw))


def _log_mean_exp(values) -> float:
    """log((1/n) sum_i exp(v_i)), tolerating +inf entries."""
    arr = np.asarray(values, dtype=np.float64)
    top = float(arr.max())
    if math.isinf(top):
        return top
    return top + math.log(float(np.mean(np.exp(arr - top))))


def strong_converse_eps_from_log_terms(log_m: float, log_mean_term: float, lam) -> float:
    """Raw eps floor from log M and log S, S the mean of exp(lam D_i).

    Kept in log space so astronomically large M or S degrade to -inf instead
    of overflowing.
    """
    lam = _lam(lam)
    if math.isinf(log_mean_term):
        return -math.inf
    log_factor = (
        math.log1p(lam)
        - lam / (1.0 + lam) * (math.log(lam) + log_m)
        + log_mean_term / (1.0 + lam)
    )
    if log_factor >= _EXP_OVERFLOW:
        return -math.inf
    return 1.0 - math.exp(log_factor)


def strong_converse_eps_from_divergences(m_codewords: float, divergences, lam) -> float:
    """Raw eps floor for a (possibly fractional) codeword count and divergence list."""
    lam = _lam(lam)
    if m_codewords < 1.0:
        raise ValueError("m_codewords must be at least 1")
    divs = np.asarray(divergences, dtype=np.float64)
    log_mean = _log_mean_exp(lam * divs)
    return strong_converse_eps_from_log_terms(math.log(m_codewords), log_mean, lam)


def _optimal_gamma(log_m: float, log_mean_term: float, lam: float) -> float:
    """Maximizer gamma* = (lam S M)^(1/(1+lam)) of the variational form."""
    log_g = (math.log(lam) + log_mean_term + log_m) / (1.0 + lam)
    if log_g >= _EXP_OVERFLOW:
        return math.inf
    return math.exp(log_g)


def strong_converse_bound(family: ChannelFamily, order) -> BoundReport:
    """Error floor for the family at one order offset lam.

    Domination failures (some conditional not dominated by Q) degrade to the
    vacuous report eps_lower = 0 with a diagnostic flag rather than raising.
    """
    lam = _lam(order)
    m = family.m_codewords
    divs = family.divergences(lam)
    dominated = bool(np.all(np.isfinite(divs)))
    log_mean = _log_mean_exp(lam * divs)
    raw = strong_converse_eps_from_log_terms(math.log(m), log_mean, lam)
    gamma_star = _optimal_gamma(math.log(m), log_mean, lam) if dominated else None
    params = {
        "m_codewords": m,
        "q_choice": family.q_tag(),
        "lam": lam,
        "divergences": [float(d) for d in divs],
    }
    if not dominated:
        params["domination_violation"] = True
    if m == 1:
        params["degenerate_single_codeword"] = True
    return BoundReport(
        method="strong_converse",
        eps_lower=_clamp_eps(raw),
        eps_raw=raw,
        lambda_star=lam,
        gamma_star=gamma_star,
        params=params,
    )


def _golden_max(g, lo: float, hi: float, iters: int = 60):
    """Golden-section maximization of g on [lo, hi]; returns (x, g(x))."""
    span = hi - lo
    c = hi - _INVPHI * span
    d = lo + _INVPHI * span
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            hi, d, gd = d, c, gc
            c = hi - _INVPHI * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + _INVPHI * (hi - lo)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def optimize_lambda(
    family: ChannelFamily,
    lam_lo: float = 1e-6,
    lam_hi: float = 10.0,
    prescan: int = 64,
    iters: int = 60,
) -> BoundReport:
    """Best strong-converse bound over lam in [lam_lo, lam_hi].

    The raw bound need not be unimodal in lam, so a geometric pre-scan picks
    the basin first and golden section on log lam refines inside it; both
    interval endpoints stay in the candidate set.
    """
    if not (0.0 < lam_lo < lam_hi):
        raise ValueError("need 0 < lam_lo < lam_hi")

    def raw_at(log_lam: float) -> float:
        lam = math.exp(log_lam)
        divs = family.divergences(lam)
        log_mean = _log_mean_exp(lam * divs)
        return strong_converse_eps_from_log_terms(
            math.log(family.m_codewords), log_mean, lam
        )

    lo, hi = math.log(lam_lo), math.log(lam_hi)
    grid = np.linspace(lo, hi, prescan)
    values = [raw_at(x) for x in grid]
    best_idx = int(np.argmax(values))
    bracket_lo = grid[max(best_idx - 1, 0)]
    bracket_hi = grid[min(best_idx + 1, prescan - 1)]
    x_gold, v_gold = _golden_max(raw_at, bracket_lo, bracket_hi, iters)

    candidates = [(grid[0], values[0]), (grid[-1], values[-1]),
                  (grid[best_idx], values[best_idx]), (x_gold, v_gold)]
    x_best, _ = max(candidates, key=lambda t: t[1])
    lam_best = math.exp(x_best)

    report = strong_converse_bound(family, lam_best)
    params = dict(report.params)
    params["lambda_range"] = [lam_lo, lam_hi]
    params["lambda_at_boundary"] = bool(
        x_best <= lo + 1e-12 or x_best >= hi - 1e-12
    )
    return BoundReport(
        method=report.method,
        eps_lower=report.eps_lower,
        eps_raw=report.eps_raw,
        lambda_star=lam_best,
        gamma_star=report.gamma_star,
        params=params,
    )


def variational_bound(family: ChannelFamily, order, gamma: float) -> float:
    """Raw eps floor at one threshold gamma: 1 - gamma/M - S gamma^(-lam).

    Its supremum over gamma > 0 is exactly the strong-converse bound; any
    single gamma gives a valid (weaker) floor.
    """
    lam = _lam(order)
    g = float(gamma)
    if not (math.isfinite(g) and g > 0.0):
        raise ValueError("gamma must be finite and positive")
    divs = family.divergences(lam)
    log_mean = _log_mean_exp(lam * divs)
    log_term = log_mean - lam * math.log(g)
    if log_term >= _EXP_OVERFLOW or math.isinf(log_term):
        return -math.inf
    return 1.0 - g / family.m_codewords - math.exp(log_term)


def optimal_q_discrete(conditionals, order):
    """Reference pmf minimizing the strong-converse prefactor, with its normalizer.

    q*(y) is proportional to (mean_i p_i(y)^(1+lam))^(1/(1+lam)); returns
    (q_star, C) where C is the normalizing constant.
    """
    lam = _lam(order)
    pmfs = list(conditionals)
    if not pmfs:
        raise ValueError("need at least one conditional")
    mat = np.stack([pm.probs for pm in pmfs])
    weights = np.mean(mat ** (1.0 + lam), axis=0) ** (1.0 / (1.0 + lam))
    norm = float(weights.sum())
    if norm <= 0.0:
        raise ValueError("conditionals have empty joint support")
    return DiscretePmf(weights / norm), norm


def avg_kl_to_mixture(conditionals) -> float:
    """Mean KL divergence of each conditional to their uniform mixture.

    Equals the mutual information between a uniform codeword index and the
    observation.
    """
    pmfs = list(conditionals)
    mix = mixture_pmf(pmfs)
    return float(np.mean([kl_discrete(pm, mix) for pm in pmfs]))


def fano_bound(m_codewords: int, avg_kl: float) -> BoundReport:
    """Classic Fano floor eps >= 1 - (log 2 + avg_kl) / log M."""
    m = int(m_codewords)
    if m < 2:
        raise ValueError("Fano bound needs at least two codewords")
    if not (math.isfinite(avg_kl) and avg_kl >= 0.0):
        raise ValueError("avg_kl must be finite and non-negative")
    raw = 1.0 - (math.log(2.0) + avg_kl) / math.log(m)
    return BoundReport(
        method="fano",
        eps_lower=_clamp_eps(raw),
        eps_raw=raw,
        params={"m_codewords": m, "avg_kl": avg_kl},
    )


def generalized_fano_log_m_bound(order, ratio_sup: float, mutual_info: float, eps: float) -> float:
    """Upper bound on log M from mutual information and an error level.

    log M <= (1 + 1/lam) log((1+lam)/(1-eps)) - log lam
             + (1/lam) log(1 + lam kappa(lam, t) I)

    with t an upper bound on the joint likelihood ratio (t = M works for the
    mixture reference) and I the mutual information.
    """
    lam = _lam(order)
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    if mutual_info < 0.0:
        raise ValueError("mutual_info must be non-negative")
    kappa = hellinger_kl_coefficient(lam, ratio_sup)
    return (
        (1.0 + 1.0 / lam) * math.log((1.0 + lam) / (1.0 - eps))
        - math.log(lam)
        + math.log1p(lam * kappa * mutual_info) / lam
    )


def generalized_fano_fixed_order_check(order, m_codewords: int, mutual_info: float, eps: float):
    """Fixed-order variant: log M <= 1 + I / (lam^lam (1-eps)^(1+lam) / (1+lam)^(1+lam) - M^-lam).

    Needs M >= 3; returns the right-hand side, or None when the denominator
    is non-positive and the variant is vacuous.
    """
    lam = _lam(order)
    m = int(m_codewords)
    if m < 3:
        raise ValueError("fixed-order variant needs M >= 3")
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    den = lam**lam * (1.0 - eps) ** (1.0 + lam) / (1.0 + lam) ** (1.0 + lam) - m ** (-lam)
    if den <= 0.0:
        return None
    return 1.0 + mutual_info / den


def risk_from_eps(loss: LossSpec, eps_lower: float, packing=None) -> float:
    """Risk floor w(A psi_n) * eps_lower implied by an error floor.

    When a packing is supplied, its minimum distance must equal 2 A psi_n
    (the separation that makes estimation at least as hard as testing).
    """
    if not 0.0 <= eps_lower <= 1.0:
        raise ValueError("eps_lower must lie in [0, 1]")
    if packing is not None:
        want = 2.0 * loss.A * loss.psi_n
        have = float(packing.d_min)
        if not math.isclose(have, want, rel_tol=1e-9, abs_tol=0.0):
            raise ValueError(
                f"packing minimum distance {have!r} != 2 A psi_n = {want!r}"
            )
    return loss.evaluate_w(loss.A * loss.psi_n) * eps_lower
