"""Exponent relations and analytic envelopes for the fractional operator norms."""

import math
from dataclasses import dataclass

from .errors import DomainError
from .norms import PsiFunction
from .special import ball_volume

__all__ = [
    "SobolevPair",
    "WeightedBracket",
    "sobolev_q",
    "sobolev_p",
    "stein_constant",
    "v2",
    "k_upper",
    "k_lower_shape",
    "weighted_bracket",
    "transported_psi",
]

FLAT_STEIN = 2.0


def _check(alpha, d):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")


@dataclass(frozen=True)
class SobolevPair:
    """Exponents with ``1/q = 1/p - alpha/d``."""

    p: float
    q: float
    alpha: float
    d: int = 1

    def __post_init__(self):
        if not math.isclose(1.0 / self.q, 1.0 / self.p - self.alpha / self.d,
                            rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError(f"({self.p}, {self.q}) is not a Sobolev pair for alpha={self.alpha}")

    @classmethod
    def from_p(cls, p, alpha, d=1):
        return cls(p, sobolev_q(p, alpha, d), alpha, d)


@dataclass(frozen=True)
class WeightedBracket:
    """Exponent data of the weighted potential; ``q_minus`` is ``None`` when ``alpha + gamma <= 1``."""

    alpha: float
    beta: float
    gamma: float
    kappa: float
    p_minus: float
    p_plus: float
    q_minus: float | None
    q_plus: float

    @property
    def nonempty(self):
        return self.p_minus < self.p_plus

    def q_of(self, p):
        """Target exponent with ``1/q = 1/p + alpha + beta + gamma - 2``."""
        inv = 1.0 / p - self.kappa
        return math.inf if inv <= 0 else 1.0 / inv

    def envelope(self, p):
        """Blow-up shape ``(p - p_minus)**(-kappa)``."""
        if not p > self.p_minus:
            return math.inf
        return (p - self.p_minus) ** (-self.kappa)


def sobolev_q(p, alpha, d=1):
    """Target exponent ``q = 1/(1/p - alpha/d)`` for ``1 < p < d/alpha``."""
    _check(alpha, d)
    if not 1.0 < p < d / alpha:
        raise DomainError(f"p={p} outside (1, {d / alpha:g})")
    return 1.0 / (1.0 / p - alpha / d)


def sobolev_p(q, alpha, d=1):
    """Inverse of :func:`sobolev_q`."""
    _check(alpha, d)
    if not q > d / (d - alpha):
        raise DomainError(f"q={q} outside ({d / (d - alpha):g}, inf)")
    return 1.0 / (1.0 / q + alpha / d)


def stein_constant(d, mode="classical", flat_value=FLAT_STEIN):
    """Maximal-function constant: ``2 * 5**d`` (classical) or a dimension-free value (flat)."""
    if int(d) != d or d < 1:
        raise DomainError(f"dimension must be a positive integer, got {d}")
    if mode == "classical":
        return 2.0 * 5.0**d
    if mode == "flat":
        return float(flat_value)
    raise DomainError(f"unknown mode {mode!r}")


def v2(alpha, d, p, S):
    """``Omega**(-1-alpha/d) p**(1-2 alpha p/d) d**(1+(1-alpha p)/d) S**(1-alpha p)`` on ``[1, 1/alpha]``."""
    _check(alpha, d)
    if not 1.0 <= p <= 1.0 / alpha:
        raise DomainError(f"p={p} outside [1, {1.0 / alpha:g}]")
    if not S > 0:
        raise DomainError("S must be positive")
    e = 1.0 - alpha * p
    log_v = (-(1.0 + alpha / d) * math.log(ball_volume(d))
             + (1.0 - 2.0 * alpha * p / d) * math.log(p)
             + (1.0 + e / d) * math.log(d)
             + e * math.log(S))
    return math.exp(log_v)


def k_upper(alpha, d, p, S):
    """Upper envelope ``V2 / alpha / [(p-1)(1-alpha p)]**(1-alpha/d)``; ``inf`` at the endpoints."""
    _check(alpha, d)
    top = min(d / alpha, 1.0 / alpha)
    if p == 1.0 or p == top:
        return math.inf
    if not 1.0 < p < top:
        raise DomainError(f"p={p} outside (1, {top:g})")
    base = (p - 1.0) * (1.0 - alpha * p)
    return v2(alpha, d, p, S) / alpha * base ** (-(1.0 - alpha / d))


def k_lower_shape(alpha, p):
    """Lower-bound shape ``[(p-1)(1-alpha p)]**(-(1-alpha))`` (level normalised to 1)."""
    _check(alpha, 1)
    if p == 1.0 or p == 1.0 / alpha:
        return math.inf
    if not 1.0 < p < 1.0 / alpha:
        raise DomainError(f"p={p} outside (1, {1.0 / alpha:g})")
    return ((p - 1.0) * (1.0 - alpha * p)) ** (-(1.0 - alpha))


def weighted_bracket(alpha, beta, gamma, strict=True):
    """Exponent bracket of the weighted potential.

    The interval ``(p_minus, p_plus]`` may be empty; check
    :attr:`WeightedBracket.nonempty`.
    """
    for name, v in (("alpha", alpha), ("beta", beta), ("gamma", gamma)):
        lo_ok = v > 0.0 if strict or name == "alpha" else v >= 0.0
        if not (lo_ok and v < 1.0):
            raise DomainError(f"{name} must lie in (0, 1), got {v}")
    if not alpha + beta + gamma < 2.0:
        raise DomainError("need alpha + beta + gamma < 2")
    if not beta**2 + gamma**2 > 0.0:
        raise DomainError("beta and gamma cannot both vanish")
    kappa = 2.0 - alpha - beta - gamma
    q_minus = 1.0 / (alpha + gamma - 1.0) if alpha + gamma > 1.0 else None
    return WeightedBracket(alpha, beta, gamma, kappa, 1.0 / (1.0 - beta),
                           1.0 / (2.0 - alpha - beta), q_minus, 1.0 / gamma)


def transported_psi(psi: PsiFunction, alpha, d=1, S=None):
    """``q -> K(p(q)) psi(p(q))`` on the image of the support under ``p -> q``, with ``K = k_upper``."""
    _check(alpha, d)
    if S is None:
        S = stein_constant(d)
    s1, s2 = psi.support
    top = min(d / alpha, 1.0 / alpha)
    if not (1.0 <= s1 and s2 <= top):
        raise DomainError(f"support {psi.support} not inside (1, {top:g})")
    q1 = sobolev_q(s1, alpha, d) if s1 > 1.0 else d / (d - alpha)
    q2 = sobolev_q(s2, alpha, d) if s2 < d / alpha else math.inf

    def rule(q):
        p = sobolev_p(q, alpha, d)
        return k_upper(alpha, d, p, S) * psi(p)

    return PsiFunction(rule, (q1, q2), f"transported[{psi.name}]")
