"""Empirical checks of the operator-norm estimates.

Sup-ratios are estimated from extremal families: the witnesses ``f0`` and
``h_delta`` have outputs whose norms are computed in logarithmic
coordinates, which stay accurate all the way to the ends of the admissible
``p`` range.  Every check returns a :class:`BracketReport`.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from . import constants
from .errors import DivergenceError, DomainError, EmptyResultError, InsufficientDataError
from .funcspace import (
    CatalogEntry,
    TensorFunction,
    VerySimpleFunction,
    log_kernel_integral,
    make_very_simple,
)
from .norms import (
    PsiFunction,
    besov_norm,
    fundamental_function,
    gls_norm,
    lp_norm,
    mixed_norm,
    restricted,
)
from .operators import (
    marchaud_function,
    riesz_function,
    rl_integral_function,
    weighted_function,
)
from .quadrature import DEFAULT_SPEC, integrate, integrate_log
from .special import beta as beta_fn
from .special import gamma

__all__ = [
    "RatioSample",
    "BracketReport",
    "KERNELS",
    "potential_function",
    "potential_ratio",
    "empirical_k_lower",
    "verify_indicator_bracket",
    "verify_gls_indicator",
    "verify_vs_bound",
    "verify_vs_gls",
    "besov_ratio",
    "verify_gls_sobolev",
    "verify_prop51",
    "verify_factorization",
    "blowup_slope",
    "weighted_ratio",
    "verify_weighted_bracket",
    "BRACKET_SLACK",
]

BRACKET_SLACK = 1e-4
GLS_SLACK = 1e-6
# beyond this the integrand (1 - e^-w)**(alpha-1) equals 1 to double precision
_W_FAR = 40.0
_JACOBI_NODES = 40
_LEGENDRE_NODES = 20


@dataclass(frozen=True)
class RatioSample:
    """Output-to-input norm ratio at one exponent pair."""

    p: float
    q: float
    ratio: float
    witness: str


@dataclass(frozen=True)
class BracketReport:
    """A computed quantity with its analytic envelope."""

    quantity: float
    lower: float
    upper: float
    passed: bool
    context: dict = field(default_factory=dict)

    def row(self):
        out = dict(self.context)
        out.update(quantity=self.quantity, lower=self.lower, upper=self.upper,
                   passed=self.passed)
        return out


def _report(quantity, lower, upper, context, lo_slack=0.0, hi_slack=0.0):
    ok = lower * (1.0 - lo_slack) <= quantity <= upper * (1.0 + hi_slack)
    return BracketReport(float(quantity), float(lower), float(upper), bool(ok), context)


# Ratios use the unnormalised potentials (the Gamma(alpha) I^alpha form the
# upper envelope refers to).  KERNELS: "one_sided" integrates over (0, x),
# "two_sided" over the whole support with |x - y|.
KERNELS = ("one_sided", "two_sided")

# witness f0 = 1/x on (1, inf): with x = e^s,
# one-sided output e^{(alpha-1)s} A(s), two-sided adds B(1-alpha, alpha)
# (and a part on (0, 1)); A(s) = int_0^s (1 - e^-w)**(alpha-1) dw


def _a_integral(alpha, s, spec):
    return log_kernel_integral(alpha, s)


def _f0_output_norm(alpha, q, spec, kernel="one_sided"):
    shift = beta_fn(1.0 - alpha, alpha) if kernel == "two_sided" else 0.0
    eps = (1.0 - alpha) * q - 1.0

    def logf(s):
        with np.errstate(divide="ignore"):
            return q * np.log(_a_integral(alpha, s, spec) + shift) - eps * np.asarray(s)

    log_outer = integrate_log(logf, 0.0, spec=spec)
    if kernel == "one_sided":
        return math.exp(log_outer / q)
    inner = lp_norm(_potential_cached("f0", alpha, spec, kernel), q, spec,
                    interval=(0.0, 1.0))
    log_inner = q * math.log(inner) if inner > 0 else -math.inf
    return math.exp(np.logaddexp(log_outer, log_inner) / q)


# witness h_delta = x**-alpha |ln x|**delta on (0, 1/e): with x = e^-t,
# two-sided output R[h](e^-t) = int_0^{t-1} (t-w)^delta (1-e^-w)^(alpha-1) dw
#            + int_0^inf (t+w)^delta e^{-(1-alpha)w} (1-e^-w)^(alpha-1) dw


def _fixed_rule(alpha, top, panels):
    """Nodes and weights on ``[0, top]`` for integrands with ``w**(alpha-1)`` at 0.

    Gauss-Jacobi on ``[0, min(1, top)]``, Gauss-Legendre panels beyond.
    Returned weights include the ``w**(alpha-1)`` factor.
    """
    tj, wj = roots_jacobi(_JACOBI_NODES, 0.0, alpha - 1.0)
    first = min(1.0, top)
    nodes = [0.5 * first * (1.0 + tj)]
    weights = [(0.5 * first) ** alpha * wj]
    if top > 1.0:
        tl, wl = leggauss(_LEGENDRE_NODES)
        edges = np.linspace(1.0, top, panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 * np.diff(edges)
        x = (mid[:, None] + half[:, None] * tl[None, :]).ravel()
        nodes.append(x)
        weights.append((half[:, None] * wl[None, :]).ravel() * x ** (alpha - 1.0))
    return np.concatenate(nodes), np.concatenate(weights)


def _h_output_values(alpha, delta, t):
    """Two-sided ``R[h_delta](e^-t)`` for an array of ``t >= 1`` (fixed composite rules)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.shape)

    def kernel_ratio(w):
        # (1 - e^-w)**(alpha-1) / w**(alpha-1), smooth at 0
        with np.errstate(divide="ignore", invalid="ignore"):
            r = (-np.expm1(-w) / w) ** (alpha - 1.0)
        return np.where(w == 0.0, 1.0, r)

    w_tail = (_W_FAR + 5.0) / (1.0 - alpha)
    xb, wb = _fixed_rule(alpha, w_tail, 60)
    kb = kernel_ratio(xb) * np.exp(-(1.0 - alpha) * xb) * wb
    below = ((t[:, None] + xb[None, :]) ** delta) @ kb
    for i, ti in enumerate(t):
        top = min(_W_FAR, ti - 1.0)
        near = 0.0
        if top > 0:
            xn, wn = _fixed_rule(alpha, top, 40)
            near = np.dot((ti - xn) ** delta * kernel_ratio(xn), wn)
        if ti - 1.0 > _W_FAR:
            near += ((ti - _W_FAR) ** (delta + 1.0) - 1.0) / (delta + 1.0)
        out[i] = near + below[i]
    return out


def _h_output_norm(alpha, delta, q, spec):
    def logf(t):
        return q * np.log(_h_output_values(alpha, delta, t)) - np.asarray(t)

    log_inner = integrate_log(logf, 1.0, spec=spec)
    outer = lp_norm(_potential_cached(f"h_delta:{delta:g}", alpha, spec, "two_sided"), q,
                    spec, interval=(math.exp(-1.0), math.inf))
    log_outer = q * math.log(outer) if outer > 0 else -math.inf
    return math.exp(np.logaddexp(log_inner, log_outer) / q)


def potential_function(f, alpha, spec=DEFAULT_SPEC, kernel="one_sided"):
    """Unnormalised potential of ``f`` on ``(0, inf)``: ``Gamma(alpha) I^alpha`` or ``R``."""
    if kernel == "one_sided":
        return rl_integral_function(f, alpha, spec).scale(gamma(alpha))
    if kernel == "two_sided":
        return riesz_function(f, alpha, spec)
    raise DomainError(f"kernel must be one of {KERNELS}, got {kernel!r}")


_POTENTIAL_CACHE = {}


def _potential_cached(name, alpha, spec, kernel):
    from .funcspace import make_f0, make_h_delta

    key = (name, alpha, spec, kernel)
    if key not in _POTENTIAL_CACHE:
        if name == "f0":
            entry = make_f0()
        else:
            entry = make_h_delta(float(name.split(":")[1]), alpha)
        _POTENTIAL_CACHE[key] = potential_function(entry, alpha, spec, kernel)
    return _POTENTIAL_CACHE[key]


def _input_norm(entry, p, spec):
    if isinstance(entry, CatalogEntry) and entry.known_norm is not None:
        try:
            return entry.norm(p)
        except DivergenceError:
            return math.inf
    return lp_norm(entry, p, spec)


def potential_ratio(entry, alpha, p, spec=DEFAULT_SPEC, kernel="one_sided"):
    """``|P f|_q / |f|_p`` with ``q`` the Sobolev exponent; output norm over ``(0, inf)``.

    ``P`` is ``Gamma(alpha) I^alpha`` (``kernel="one_sided"``) or the Riesz
    potential (``"two_sided"``).  Returns ``nan`` when ``|f|_p`` is 0 or
    infinite.
    """
    if kernel not in KERNELS:
        raise DomainError(f"kernel must be one of {KERNELS}, got {kernel!r}")
    q = constants.sobolev_q(p, alpha, 1)
    denom = _input_norm(entry, p, spec)
    if math.isinf(denom) or denom == 0.0:
        return math.nan
    name = entry.name
    if name == "f0":
        num = _f0_output_norm(alpha, q, spec, kernel)
    elif kernel == "two_sided" and name.startswith("h_delta:") \
            and isinstance(entry, CatalogEntry) and entry.metadata.get("alpha") == alpha:
        num = _h_output_norm(alpha, entry.metadata["delta"], q, spec)
    else:
        num = lp_norm(potential_function(entry, alpha, spec, kernel), q, spec)
    return num / denom


def empirical_k_lower(alpha, p, family, spec=DEFAULT_SPEC, kernel="one_sided"):
    """Largest ``|P f|_q / |f|_p`` over ``family``: a lower bound on the operator norm."""
    if not 1.0 < p < 1.0 / alpha:
        raise DomainError(f"p={p} outside (1, {1.0 / alpha:g})")
    if not family:
        raise DomainError("empty witness family")
    best = None
    for entry in family:
        r = potential_ratio(entry, alpha, p, spec, kernel)
        if math.isnan(r) or math.isinf(r):
            continue
        if best is None or r > best.ratio:
            best = RatioSample(p, constants.sobolev_q(p, alpha, 1), r, entry.name)
    if best is None:
        raise EmptyResultError(f"every witness is divergent at p={p}")
    return best


def _indicator_bracket_envelope(alpha, p, width):
    return width ** (1.0 / p - alpha) * (1.0 - alpha * p) ** (-1.0 / p)


def verify_indicator_bracket(alpha, p, h1, h2, spec=DEFAULT_SPEC):
    """``|Gamma(1-alpha) D g|_p`` for the indicator of ``(h1, h2)`` against ``[L, 3L]``."""
    if not 1.0 <= p < 1.0 / alpha:
        raise DomainError(f"p={p} outside [1, {1.0 / alpha:g})")
    if not 0.0 < h1 < h2:
        raise DomainError(f"need 0 < h1 < h2, got ({h1}, {h2})")
    from .funcspace import indicator_derivative_function

    deriv = indicator_derivative_function(h1, h2, alpha).scale(gamma(1.0 - alpha))
    quantity = lp_norm(deriv, p, spec)
    low = _indicator_bracket_envelope(alpha, p, h2 - h1)
    ctx = {"check": "indicator-bracket", "alpha": alpha, "p": p, "h1": h1, "h2": h2}
    return _report(quantity, low, 3.0 * low, ctx, BRACKET_SLACK, BRACKET_SLACK)


def _psi_alpha(alpha):
    return PsiFunction(lambda p: (1.0 - alpha * p) ** (-1.0 / p), (1.0, 1.0 / alpha),
                       "psi_alpha")


def _check_zeta(zeta, alpha):
    if zeta.support[0] < 1.0 or zeta.support[1] > 1.0 / alpha:
        raise DomainError(f"zeta support {zeta.support} not inside (1, {1.0 / alpha:g})")


def verify_gls_indicator(alpha, h1, h2, zeta: PsiFunction, spec=DEFAULT_SPEC):
    """Grand Lebesgue bound ``||D g||_{G theta} <= 3 width**-alpha phi(G zeta, width)``."""
    from .funcspace import indicator_derivative_function

    _check_zeta(zeta, alpha)
    theta = _psi_alpha(alpha).times(zeta, "theta")
    deriv = indicator_derivative_function(h1, h2, alpha)
    width = h2 - h1
    left = gls_norm(deriv, theta, spec)
    right = 3.0 * width ** (-alpha) * fundamental_function(zeta, width)
    ctx = {"check": "gls-indicator", "alpha": alpha, "h1": h1, "h2": h2, "zeta": zeta.name}
    return _report(left, 0.0, right, ctx, 0.0, GLS_SLACK)


def _vs_entry(f):
    return make_very_simple(f) if isinstance(f, VerySimpleFunction) else f


def verify_vs_bound(f: VerySimpleFunction, alpha, p, spec=DEFAULT_SPEC):
    """``Gamma(1-alpha)|D f|_p <= 3 h**(1/p-alpha-1) (1-alpha p)**(-1/p) |f|_1``."""
    if not 1.0 <= p < 1.0 / alpha:
        raise DomainError(f"p={p} outside [1, {1.0 / alpha:g})")
    if f.step is None:
        raise DomainError("the bound needs the equal-step form")
    ctx = {"check": "vs-bound", "alpha": alpha, "p": p, "h": f.step, "n": len(f.coefficients)}
    l1 = f.l1_norm
    bound = 3.0 * f.step ** (1.0 / p - alpha - 1.0) * (1.0 - alpha * p) ** (-1.0 / p) * l1
    if l1 == 0.0:
        return _report(0.0, 0.0, 0.0, ctx)
    deriv = _vs_entry(f).derivative(alpha).scale(gamma(1.0 - alpha))
    return _report(lp_norm(deriv, p, spec), 0.0, bound, ctx, 0.0, BRACKET_SLACK)


def verify_vs_gls(f: VerySimpleFunction, alpha, zeta: PsiFunction, spec=DEFAULT_SPEC):
    """``||D f||_{G theta} <= 3 h**(-alpha-1) phi(G zeta, h) |f|_1`` for a very simple ``f``."""
    _check_zeta(zeta, alpha)
    if f.step is None:
        raise DomainError("the bound needs the equal-step form")
    theta = _psi_alpha(alpha).times(zeta, "theta")
    deriv = _vs_entry(f).derivative(alpha)
    left = gls_norm(deriv, theta, spec)
    right = 3.0 * f.step ** (-alpha - 1.0) * fundamental_function(zeta, f.step) * f.l1_norm
    ctx = {"check": "vs-gls", "alpha": alpha, "h": f.step, "zeta": zeta.name}
    return _report(left, 0.0, right, ctx, 0.0, GLS_SLACK)


def _derivative_function(entry, alpha, spec):
    if isinstance(entry, CatalogEntry) and entry.derivative is not None:
        try:
            return entry.derivative(alpha)
        except DomainError:
            pass
    return marchaud_function(entry, alpha, spec)


def _derivative_norm(entry, alpha, p, b, spec):
    # the derivative at x only sees (0, x), so a closed form stays valid on (0, b)
    fn = entry.function if isinstance(entry, CatalogEntry) else entry
    if isinstance(entry, CatalogEntry) and entry.derivative is not None:
        deriv = _derivative_function(entry, alpha, spec)
    else:
        deriv = marchaud_function(restricted(fn, 0.0, b), alpha, spec)
    return lp_norm(deriv, p, spec, interval=(0.0, b))


def besov_ratio(f, alpha, p, b=1.0, spec=DEFAULT_SPEC):
    """``|D f|_p / ||f||_B`` with both sides taken on ``(0, b)``.

    A vanishing derivative gives 0 without evaluating the Besov norm, which
    may then be infinite.
    """
    if not 1.0 <= p < 1.0 / alpha:
        raise DomainError(f"p={p} outside [1, {1.0 / alpha:g})")
    num = _derivative_norm(f, alpha, p, b, spec)
    if num == 0.0:
        return 0.0
    den = besov_norm(f, alpha, p, b, spec)
    if math.isinf(den):
        raise DivergenceError(f"Besov norm of {getattr(f, 'name', 'f')} is infinite at p={p}")
    return num / den


def verify_gls_sobolev(f, psi: PsiFunction, alpha, spec=DEFAULT_SPEC, S=None):
    """``||R f||_{G psi_K} <= ||f||_{G psi}`` with ``psi_K`` transported through ``k_upper``."""
    if S is None:
        S = constants.stein_constant(1)
    ctx = {"check": "gls-sobolev", "alpha": alpha, "psi": psi.name,
           "f": getattr(f, "name", "f"), "S": S}
    right = gls_norm(f, psi, spec)
    if right == 0.0:
        return _report(0.0, 0.0, 0.0, ctx)
    psi_k = constants.transported_psi(psi, alpha, 1, S)
    out = riesz_function(f, alpha, spec)
    left = gls_norm(out, psi_k, spec)
    return _report(left, 0.0, right, ctx, 0.0, GLS_SLACK)


def verify_prop51(f, alpha, beta, spec=DEFAULT_SPEC, b=1.0):
    """``||D f||_{G psi_beta} <= 1/Gamma(1-alpha)`` with the Besov natural ``psi_beta``."""
    from .norms import besov_natural_psi

    ctx = {"check": "prop51", "alpha": alpha, "beta": beta, "f": getattr(f, "name", "f")}
    bound = 1.0 / gamma(1.0 - alpha)
    deriv = _derivative_function(f, alpha, spec)
    grid = np.linspace(0.01, b, 50)
    fn = f.function if isinstance(f, CatalogEntry) else f
    # an annihilated f gives 0; the zero function has no positive psi and raises below
    if isinstance(f, CatalogEntry) and np.any(fn(grid)) and not np.any(deriv(grid)):
        return _report(0.0, 0.0, bound, ctx)
    psi = besov_natural_psi(f, alpha, beta, spec, b)
    window = restricted(deriv, 0.0, b)
    left = gls_norm(window, psi, spec)
    return _report(left, 0.0, bound, ctx, 0.0, 1e-3)


def _one_dim_ratio(entry, order, p, spec):
    q = constants.sobolev_q(p, order, 1)
    out = rl_integral_function(entry, order, spec)
    return lp_norm(out, q, spec) / _input_norm(entry, p, spec), out, q


def verify_factorization(g1, g2, alpha, beta, p1, p2, spec=DEFAULT_SPEC):
    """Mixed ratio of ``I^(alpha,beta)`` on ``g1 (x) g2`` against the product of 1-d ratios.

    The mixed norms are computed on the unseparated integrands (iterated
    quadrature); the 1-d ratios independently.
    """
    r1, out1, q1 = _one_dim_ratio(g1, alpha, p1, spec)
    r2, out2, q2 = _one_dim_ratio(g2, beta, p2, spec)
    f1 = g1.function if isinstance(g1, CatalogEntry) else g1
    f2 = g2.function if isinstance(g2, CatalogEntry) else g2
    num = mixed_norm(TensorFunction(out1, out2), q1, q2, spec, method="iterated")
    den = mixed_norm(TensorFunction(f1, f2), p1, p2, spec, method="iterated")
    mixed = num / den
    product = r1 * r2
    ctx = {"check": "factorization", "alpha": alpha, "beta": beta, "p1": p1, "p2": p2,
           "g1": f1.name, "g2": f2.name}
    tol = 1e-6
    return BracketReport(mixed, product * (1 - tol), product * (1 + tol),
                         abs(mixed - product) <= tol * abs(product), ctx)


def blowup_slope(samples, endpoint):
    """Least-squares slope of ``log ratio`` against ``log`` distance to the endpoint.

    ``endpoint`` is ``"left"`` (``p -> 1``) or ``"right"`` (``p -> 1/alpha``,
    distance ``1 - alpha p`` with ``alpha = 1/p - 1/q``).
    """
    if len(samples) < 5:
        raise InsufficientDataError(f"need at least 5 samples, got {len(samples)}")
    if endpoint not in ("left", "right"):
        raise DomainError(f"endpoint must be 'left' or 'right', got {endpoint!r}")
    dist = []
    for s in samples:
        if endpoint == "left":
            dist.append(s.p - 1.0)
        else:
            alpha = 1.0 / s.p - 1.0 / s.q
            dist.append(1.0 - alpha * s.p)
    x = np.log(np.array(dist))
    y = np.log(np.array([s.ratio for s in samples]))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def weighted_ratio(entry, alpha, beta, gamma_, p, spec=DEFAULT_SPEC):
    """``|W f|_q / |f|_p`` with ``1/q = 1/p + alpha + beta + gamma - 2``."""
    br = constants.weighted_bracket(alpha, beta, gamma_)
    q = br.q_of(p)
    if math.isinf(q):
        return math.inf
    denom = _input_norm(entry, p, spec)
    if denom == 0.0:
        return 0.0
    out = weighted_function(entry, alpha, beta, gamma_, spec)
    return lp_norm(out, q, spec) / denom


def verify_weighted_bracket(alpha, beta, gamma_, family, p_grid, spec=DEFAULT_SPEC):
    """Finite ratios on ``(p_minus, p_plus]`` and a blow-up slope near ``p_minus`` close to ``-kappa``."""
    br = constants.weighted_bracket(alpha, beta, gamma_)
    if not br.nonempty:
        raise DomainError(
            f"empty admissible interval: p_minus={br.p_minus:g} >= p_plus={br.p_plus:g}")
    reports = []
    best = []
    for p in sorted(p_grid):
        if not br.p_minus < p <= br.p_plus:
            raise DomainError(f"p={p} outside ({br.p_minus:g}, {br.p_plus:g}]")
        r = max(weighted_ratio(e, alpha, beta, gamma_, p, spec) for e in family)
        best.append(r)
        ctx = {"check": "weighted", "alpha": alpha, "beta": beta, "gamma": gamma_, "p": p,
               "q": br.q_of(p)}
        reports.append(_report(r, 0.0, math.inf, ctx))
    ok = [(p, r) for p, r in zip(sorted(p_grid), best) if 0 < r < math.inf]
    if len(ok) >= 2:
        x = np.log([p - br.p_minus for p, _ in ok])
        y = np.log([r for _, r in ok])
        slope = float(np.polyfit(x, y, 1)[0])
        target = -br.kappa
        ctx = {"check": "weighted-slope", "alpha": alpha, "beta": beta, "gamma": gamma_,
               "kappa": br.kappa}
        lo, hi = sorted((target * 1.2, target * 0.8))
        reports.append(_report(slope, lo, hi, ctx))
    return reports
