"""Fractional integrals, derivatives and potentials as pointwise evaluators.

Every operator takes a :class:`~fracnorm.funcspace.ScalarFunction` (or a
catalog entry) and a point ``x`` and returns a float.  The ``*_function``
helpers wrap an operator applied to a fixed input as a new
``ScalarFunction`` with singularity annotations, so the result can be fed
to the norm functionals.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DivergenceError, DomainError
from .funcspace import CatalogEntry, ScalarFunction, TensorFunction
from .quadrature import DEFAULT_SPEC, integrate_pieces
from .special import gamma

__all__ = [
    "FractionalParams",
    "rl_integral",
    "marchaud_derivative",
    "rl_derivative_fd",
    "indicator_derivative",
    "riesz_potential_1d",
    "weighted_potential",
    "mixed_integral_factorable",
    "mixed_derivative_factorable",
    "mixed_integral_iterated",
    "rl_integral_function",
    "marchaud_function",
    "riesz_function",
    "weighted_function",
]


@dataclass(frozen=True)
class FractionalParams:
    """Orders and geometry shared by the operators."""

    alpha: float
    beta: float = 0.0
    gamma: float = 0.0
    d: int = 1
    b: float = math.inf

    def __post_init__(self):
        _check_order(self.alpha)
        for name in ("beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise DomainError(f"{name} must lie in [0, 1), got {v}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d}")
        if not self.b > 0:
            raise DomainError("domain bound must be positive")

    @property
    def weighted_admissible(self):
        return (self.alpha + self.beta + self.gamma < 2.0
                and self.beta**2 + self.gamma**2 > 0.0)


def _check_order(alpha, name="alpha"):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {alpha}")


def _fn(f):
    return f.function if isinstance(f, CatalogEntry) else f


def _integrate_against(f, kernel, lo, hi, extra, spec, decay=None):
    """``int_lo^hi f(t) kernel(anchor, u) dt`` split at every non-smooth point.

    ``extra`` maps additional points to the power exponent the kernel
    contributes there.
    """
    lo = max(lo, f.domain[0])
    hi = min(hi, f.domain[1])
    if not hi > lo:
        return 0.0, 0.0
    pts = {lo, hi}
    pts.update(p for p in f.breakpoints() if lo < p < hi)
    pts.update(p for p in extra if lo < p < hi)
    nodes = sorted(pts)
    exps = []
    for p in nodes:
        e = f.exponent_at(p) + extra.get(p, 0.0)
        if e <= -1.0 and math.isfinite(p):
            raise DivergenceError(f"non-integrable power {e:g} at t={p:g}")
        exps.append(e)

    def integrand(a, u):
        return f.at(a, u) * kernel(a, u)

    return integrate_pieces(integrand, nodes, exps, spec, decay)


def rl_integral(f, alpha, x, spec=DEFAULT_SPEC):
    """Riemann-Liouville integral ``(1/Gamma(alpha)) int_0^x f(t)(x-t)**(alpha-1) dt``."""
    _check_order(alpha)
    f = _fn(f)
    x = float(x)
    if x <= 0:
        return 0.0

    def kernel(a, u):
        return ((x - a) - u) ** (alpha - 1.0)

    val, _ = _integrate_against(f, kernel, 0.0, x, {x: alpha - 1.0}, spec)
    return val / gamma(alpha)


def marchaud_derivative(f, alpha, x, spec=DEFAULT_SPEC, with_flag=False):
    """Marchaud derivative
    ``[x**-alpha f(x) + alpha int_0^x (f(x) - f(t))(x-t)**(-1-alpha) dt] / Gamma(1-alpha)``.

    At jumps and blow-ups of ``f``, or if the local integral fails to
    converge, the value is the convention 0 and the flag is raised.
    """
    _check_order(alpha)
    f = _fn(f)
    x = float(x)
    flagged = (0.0, True) if with_flag else 0.0
    if x <= 0:
        return (0.0, False) if with_flag else 0.0
    if x in f.jumps or any(p == x and e < 0 for p, e in f.singularities):
        return flagged
    fx = float(f.at(x, np.zeros(1))[0])
    lo = min(0.0, f.domain[0])
    pts = {lo, x}
    pts.update(p for p in f.breakpoints() if lo < p < x)
    nodes = sorted(pts)
    exps = [f.exponent_at(p) for p in nodes[:-1]] + [-alpha]
    for e in exps:
        if e <= -1.0:
            raise DivergenceError(f"non-integrable singularity for order {alpha}")

    def integrand(a, u):
        return (fx - f.at(a, u)) * ((x - a) - u) ** (-1.0 - alpha)

    try:
        val, _ = integrate_pieces(integrand, nodes, exps, spec)
    except ConvergenceError:
        return flagged
    out = (x ** (-alpha) * fx + alpha * val) / gamma(1.0 - alpha)
    return (out, False) if with_flag else out


def rl_derivative_fd(f, alpha, x, step=1e-3, spec=DEFAULT_SPEC):
    """Riemann-Liouville derivative by a central difference of ``I^(1-alpha) f``."""
    _check_order(alpha)
    if not 0 < step < x:
        raise DomainError(f"need 0 < step < x, got step={step}, x={x}")
    tight = spec.tightened(1e-3)
    up = rl_integral(f, 1.0 - alpha, x + step, tight)
    down = rl_integral(f, 1.0 - alpha, x - step, tight)
    return (up - down) / (2.0 * step)


def indicator_derivative(h1, h2, alpha, x, with_flag=False):
    """Closed-form order-``alpha`` derivative of ``I(h1 < x < h2)``; ``h2`` may be ``inf``.

    Vectorised in ``x``.  At ``x = h1`` or ``x = h2`` the value is the
    convention 0 with the flag set.
    """
    _check_order(alpha)
    if not 0.0 <= h1 < h2:
        raise DomainError(f"need 0 <= h1 < h2, got ({h1}, {h2})")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(xs.shape)
    g = gamma(1.0 - alpha)
    first = xs > h1
    out[first] = (xs[first] - h1) ** (-alpha)
    if math.isfinite(h2):
        second = xs > h2
        t = xs[second] - h1
        out[second] = t ** (-alpha) * -np.expm1(-alpha * np.log1p(-(h2 - h1) / t))
    out /= g
    flag = (xs == h1) | (xs == h2)
    out[flag] = 0.0
    if np.ndim(x) == 0:
        return (float(out[0]), bool(flag[0])) if with_flag else float(out[0])
    return (out, flag) if with_flag else out


def _riesz_decay(f, alpha):
    if f.decay is None:
        return alpha - 1.0
    if f.decay < -1.0:
        return alpha - 1.0
    return f.decay + alpha


def riesz_potential_1d(f, alpha, x, spec=DEFAULT_SPEC):
    """One-dimensional Riesz potential ``int f(y) |x - y|**(alpha - 1) dy`` over the support of ``f``."""
    _check_order(alpha)
    f = _fn(f)
    x = float(x)
    lo, hi = f.domain
    decay = None
    if math.isinf(hi):
        decay = (f.decay or 0.0) + alpha - 1.0
        if decay >= -1.0:
            raise DivergenceError("Riesz potential of a slowly decaying function diverges")

    def kernel(a, u):
        return np.abs((x - a) - u) ** (alpha - 1.0)

    val, _ = _integrate_against(f, kernel, lo, hi, {x: alpha - 1.0}, spec, decay)
    return val


def weighted_potential(f, alpha, beta, gamma_, x, spec=DEFAULT_SPEC):
    """Weighted potential ``x**-gamma / Gamma(alpha) int_0^x y**-beta f(y)(x-y)**(alpha-1) dy``."""
    FractionalParams(alpha, beta, gamma_)
    f = _fn(f)
    x = float(x)
    if x <= 0:
        return 0.0

    def kernel(a, u):
        return (a + u) ** (-beta) * ((x - a) - u) ** (alpha - 1.0)

    extra = {x: alpha - 1.0, 0.0: -beta}
    if f.domain[0] > 0:
        extra.pop(0.0)
    val, _ = _integrate_against(f, kernel, 0.0, x, extra, spec)
    return x ** (-gamma_) * val / gamma(alpha)


def mixed_integral_factorable(F: TensorFunction, alpha, beta, x, y, spec=DEFAULT_SPEC):
    """Tensor-product integral ``I^alpha[g1](x) I^beta[g2](y)``."""
    return rl_integral(F.g1, alpha, x, spec) * rl_integral(F.g2, beta, y, spec)


def mixed_derivative_factorable(F: TensorFunction, alpha, beta, x, y, spec=DEFAULT_SPEC,
                                with_flag=False):
    """Mixed derivative ``D^alpha[g1](x) D^beta[g2](y)`` of a factorable function."""
    d1, f1 = marchaud_derivative(F.g1, alpha, x, spec, with_flag=True)
    d2, f2 = marchaud_derivative(F.g2, beta, y, spec, with_flag=True)
    flag = f1 or f2
    val = 0.0 if flag else d1 * d2
    return (val, flag) if with_flag else val


def mixed_integral_iterated(F: TensorFunction, alpha, beta, x, y, spec=DEFAULT_SPEC):
    """The same mixed integral by iterated double quadrature over the unseparated integrand."""
    _check_order(alpha)
    _check_order(beta, "beta")
    g1, g2 = F.g1, F.g2
    if x <= 0 or y <= 0:
        return 0.0
    lo2, hi2 = max(0.0, g2.domain[0]), min(y, g2.domain[1])
    if not hi2 > lo2:
        return 0.0
    inner_nodes = sorted({lo2, hi2, *(p for p in g2.breakpoints() if lo2 < p < hi2)})
    inner_exps = [g2.exponent_at(p) + (beta - 1.0 if p == y else 0.0) for p in inner_nodes]

    def inner(a1, u1):
        out = np.empty(np.shape(u1))
        for i, ui in enumerate(np.atleast_1d(u1)):
            def h(a2, u2, ui=ui):
                return (g1.at(a1, np.full(np.shape(u2), ui)) * g2.at(a2, u2)
                        * ((y - a2) - u2) ** (beta - 1.0))
            out[i], _ = integrate_pieces(h, inner_nodes, inner_exps, spec)
        return out * ((x - a1) - np.asarray(u1)) ** (alpha - 1.0)

    lo1, hi1 = max(0.0, g1.domain[0]), min(x, g1.domain[1])
    if not hi1 > lo1:
        return 0.0
    outer_nodes = sorted({lo1, hi1, *(p for p in g1.breakpoints() if lo1 < p < hi1)})
    outer_exps = [g1.exponent_at(p) + (alpha - 1.0 if p == x else 0.0) for p in outer_nodes]
    val, _ = integrate_pieces(inner, outer_nodes, outer_exps, spec)
    return val / (gamma(alpha) * gamma(beta))


# operators applied to a fixed input, wrapped as functions


def _pointwise(op):
    # memoised: norm sweeps over p revisit the same abscissae
    memo = {}

    def rule(a, u):
        xs = a + np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty(xs.shape)
        for i, t in enumerate(xs.tolist()):
            v = memo.get(t)
            if v is None:
                v = memo[t] = op(t)
            out[i] = v
        return out
    return rule


def _nonsmooth(f):
    pts = set(f.jumps)
    pts.update(p for p in f.domain if math.isfinite(p) and p > 0)
    return pts


def rl_integral_function(f, alpha, spec=DEFAULT_SPEC):
    """``I^alpha[f]`` on ``(0, inf)`` as a function."""
    f = _fn(f)
    sing = tuple((p, e + alpha) for p, e in f.singularities if e + alpha < 0)
    jumps = tuple(sorted(_nonsmooth(f) | {p for p, _ in f.singularities if p > 0}))
    decay = _riesz_decay(f, alpha)
    return ScalarFunction(_pointwise(lambda t: rl_integral(f, alpha, t, spec)),
                          (0.0, math.inf), sing, jumps, decay, f"I{alpha:g}[{f.name}]")


def riesz_function(f, alpha, spec=DEFAULT_SPEC):
    """Riesz potential of ``f`` restricted to ``(0, inf)`` as a function."""
    f = _fn(f)
    sing = tuple((p, e + alpha) for p, e in f.singularities if e + alpha < 0)
    jumps = tuple(sorted(_nonsmooth(f) | {p for p, _ in f.singularities if p > 0}))
    return ScalarFunction(_pointwise(lambda t: riesz_potential_1d(f, alpha, t, spec)),
                          (0.0, math.inf), sing, jumps, _riesz_decay(f, alpha),
                          f"R{alpha:g}[{f.name}]")


def marchaud_function(f, alpha, spec=DEFAULT_SPEC):
    """``D^alpha[f]`` on ``(0, inf)`` as a function; jump points map to 0."""
    f = _fn(f)
    sing = {p: e - alpha for p, e in f.singularities}
    for p in _nonsmooth(f):
        sing[p] = min(sing.get(p, 0.0), -alpha)
    decay = -1.0 - alpha if f.decay is None else f.decay - alpha
    return ScalarFunction(_pointwise(lambda t: marchaud_derivative(f, alpha, t, spec)),
                          (0.0, math.inf), tuple(sorted(sing.items())), (), decay,
                          f"D{alpha:g}[{f.name}]")


def weighted_function(f, alpha, beta, gamma_, spec=DEFAULT_SPEC):
    """Weighted potential of ``f`` on ``(0, inf)`` as a function."""
    f = _fn(f)
    e0 = -gamma_ + alpha - beta + f.exponent_at(0.0) if f.domain[0] == 0 else -gamma_
    sing = {0.0: e0} if e0 < 0 else {}
    for p, e in f.singularities:
        if p > 0 and e + alpha < 0:
            sing[p] = e + alpha
    jumps = tuple(sorted(_nonsmooth(f)))
    decay = (-gamma_ + alpha - 1.0) if (f.decay is None or f.decay - beta < -1.0) \
        else -gamma_ + alpha - beta + f.decay
    return ScalarFunction(_pointwise(lambda t: weighted_potential(f, alpha, beta, gamma_, t, spec)),
                          (0.0, math.inf), tuple(sorted(sing.items())), jumps, decay,
                          f"W[{f.name}]")
