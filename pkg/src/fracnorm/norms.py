"""Norm functionals: Lebesgue, mixed, modulus of continuity, Besov and Grand Lebesgue.

Divergent norms are reported as ``math.inf`` rather than raised, so that
parameter sweeps can record them.
"""

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, DomainError
from .funcspace import CatalogEntry, ScalarFunction, TensorFunction
from .quadrature import DEFAULT_SPEC, integrate, integrate_pieces

__all__ = [
    "PsiFunction",
    "lp_norm",
    "mixed_norm",
    "modulus_of_continuity",
    "besov_norm",
    "gls_norm",
    "natural_psi",
    "fundamental_function",
    "besov_natural_psi",
    "sup_over_interval",
    "power_weighted",
    "restricted",
    "ENDPOINT_CLIP",
    "BESOV_T_MIN",
]

ENDPOINT_CLIP = 1e-4
BESOV_T_MIN = 1e-8
_SHIFTS = 32
# stand-in for an infinite upper end of a psi support
_P_CAP = 1e3
_CANCELLATION_SLACK = 1e3


@dataclass
class PsiFunction:
    """Generating function of a Grand Lebesgue space on the open support ``(s1, s2)``.

    Values are memoised; the cache is guarded by a lock so one instance
    can be shared between threads.
    """

    rule: Callable[[float], float]
    support: tuple[float, float]
    name: str = "psi"
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        s1, s2 = self.support
        if not (1.0 <= s1 < s2):
            raise DomainError(f"psi support must satisfy 1 <= s1 < s2, got {self.support}")

    def __call__(self, p):
        p = float(p)
        s1, s2 = self.support
        if not s1 < p < s2:
            raise DomainError(f"{self.name}: p={p} outside support {self.support}")
        with self._lock:
            if p in self._cache:
                return self._cache[p]
        val = float(self.rule(p))
        if not val > 0:
            raise DomainError(f"{self.name}({p}) = {val} is not positive")
        with self._lock:
            self._cache[p] = val
        return val

    def clipped_support(self, clip=ENDPOINT_CLIP):
        s1, s2 = self.support
        hi = min(s2, _P_CAP)
        return s1 + clip, hi - clip if math.isfinite(s2) else hi

    def scaled(self, c):
        return PsiFunction(lambda p: c * self(p), self.support, f"{c:g}*{self.name}")

    def times(self, other, name=None):
        """Pointwise product on the intersection of supports."""
        lo = max(self.support[0], other.support[0])
        hi = min(self.support[1], other.support[1])
        return PsiFunction(lambda p: self(p) * other(p), (lo, hi),
                           name or f"{self.name}*{other.name}")

    @classmethod
    def constant(cls, value, support):
        return cls(lambda p: float(value), support, f"const{value:g}")


def _fn(f):
    return f.function if isinstance(f, CatalogEntry) else f


def restricted(f, lo, hi):
    """``f`` multiplied by the indicator of ``(lo, hi)``."""
    f = _fn(f)
    a = max(f.domain[0], lo)
    b = min(f.domain[1], hi)
    if not b > a:
        raise DomainError(f"restriction of {f.name} to ({lo}, {hi}) is empty")
    if (a, b) == f.domain:
        return f
    jumps = set(p for p in f.jumps if a < p < b)
    jumps.update(p for p in (a, b) if math.isfinite(p))
    sing = tuple((p, e) for p, e in f.singularities if a <= p <= b)
    return ScalarFunction(f.rule, (a, b), sing, tuple(sorted(jumps)),
                          f.decay if math.isinf(b) else None, f.name)


def power_weighted(f, s):
    """The function ``x**s f(x)``."""
    f = _fn(f)
    rule = f.rule
    sing = dict(f.singularities)
    if f.domain[0] == 0.0:
        sing[0.0] = sing.get(0.0, 0.0) + s
    decay = None if f.decay is None else f.decay + s
    return ScalarFunction(lambda a, u: (a + u) ** s * rule(a, u), f.domain,
                          tuple(sorted(sing.items())), f.jumps, decay, f"x^{s:g}*{f.name}")


def _norm_nodes(f, interval):
    lo, hi = f.domain
    if interval is not None:
        lo, hi = max(lo, interval[0]), min(hi, interval[1])
    pts = {lo, hi}
    pts.update(p for p in f.breakpoints() if lo < p < hi)
    return sorted(pts)


def lp_norm(f, p, spec=DEFAULT_SPEC, interval=None):
    """``(int |f|**p)**(1/p)``, optionally over a sub-interval; ``inf`` if divergent."""
    f = _fn(f)
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"p must be at least 1, got {p}")
    nodes = _norm_nodes(f, interval)
    if len(nodes) < 2 or not nodes[-1] > nodes[0]:
        return 0.0
    exps = []
    for x in nodes:
        e = f.exponent_at(x) * p
        if e <= -1.0 and math.isfinite(x):
            return math.inf
        exps.append(e)
    decay = None
    if math.isinf(nodes[-1]):
        decay = f.decay * p
        if decay >= -1.0:
            if _is_zero(f):
                return 0.0
            return math.inf

    def power_integral(scale):
        def integrand(a, u):
            return np.abs(f.at(a, u) / scale) ** p
        return integrate_pieces(integrand, nodes, exps, spec, decay)[0]

    scale = 1.0
    # overflow here shows up as inf or nan and triggers the rescaled pass
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        try:
            val = power_integral(scale)
        except ConvergenceError:
            val = math.nan
    if not (math.isfinite(val) and (val == 0.0 or 1e6 * spec.abs_tol < val < 1e250)):
        # rescale so |f/scale|**p stays in floating-point range and well
        # above the absolute tolerance
        scale = _sample_scale(f, nodes)
        val = power_integral(scale)
    if not val > 0:
        return 0.0
    return scale * val ** (1.0 / p)


def _is_zero(f):
    xs = np.linspace(f.domain[0], f.domain[0] + 10.0, 41)[1:]
    return not np.any(f(xs))


def _sample_scale(f, nodes):
    # typical magnitude, keeps |f/scale|**p in floating-point range; samples
    # hug the regular breakpoints, where bounded functions tend to peak
    lo = nodes[0]
    hi = nodes[-1] if math.isfinite(nodes[-1]) else max(2.0 * abs(lo), lo + 10.0)
    xs = list(np.linspace(lo, hi, 67)[1:-1])
    for c in nodes:
        if math.isfinite(c) and f.exponent_at(c) >= 0:
            d = 1e-9 * max(1.0, abs(c))
            xs.extend(x for x in (c - d, c + d) if lo < x < hi)
    vals = np.abs(f(np.array(xs)))
    vals = vals[np.isfinite(vals)]
    if vals.size == 0 or not vals.max() > 0:
        return 1.0
    return float(vals.max())


def mixed_norm(F: TensorFunction, p1, p2, spec=DEFAULT_SPEC, method="product"):
    """Mixed norm ``(int (int |F|**p1 dx)**(p2/p1) dy)**(1/p2)`` of a factorable function.

    ``method="product"`` uses Fubini, ``"iterated"`` integrates the
    unseparated integrand, x inside and y outside.
    """
    if method == "product":
        n1 = lp_norm(F.g1, p1, spec)
        n2 = lp_norm(F.g2, p2, spec)
        if n1 == 0.0 or n2 == 0.0:
            return 0.0
        return n1 * n2
    if method != "iterated":
        raise DomainError(f"unknown mixed-norm method {method!r}")
    g1, g2 = F.g1, F.g2

    def inner(a, u):
        out = np.empty(np.shape(u))
        for i, ui in enumerate(np.atleast_1d(u)):
            yv = float(g2.at(a, np.array([ui]))[0])
            row = ScalarFunction(lambda a1, u1, yv=yv: g1.rule(a1, u1) * yv, g1.domain,
                                 g1.singularities, g1.jumps, g1.decay, "row")
            out[i] = lp_norm(row, p1, spec) ** p2 if yv != 0.0 else 0.0
        return out

    col = ScalarFunction(inner, g2.domain, g2.singularities, g2.jumps, g2.decay, "col")
    nodes = _norm_nodes(col, None)
    exps = [col.exponent_at(x) * p2 for x in nodes]
    decay = None if math.isfinite(nodes[-1]) else g2.decay * p2
    if decay is not None and decay >= -1.0:
        return math.inf
    val, _ = integrate_pieces(lambda a, u: col.at(a, u), nodes, exps, spec, decay)
    return val ** (1.0 / p2)


def _shifted_difference(f, h):
    """``f(x + h) - f(x)`` on its support, with annotations."""
    lo, hi = f.domain[0] - h, f.domain[1]
    sing = {}
    for c, e in f.singularities:
        for q in (c, c - h):
            sing[q] = min(e, sing.get(q, 0.0))
    jumps = set()
    for p in list(f.jumps) + [x for x in f.domain if math.isfinite(x)]:
        jumps.update((p, p - h))
    jumps = tuple(sorted(p for p in jumps if lo < p < hi))
    rule = f.at

    def diff(a, u):
        return rule(a + h, u) - rule(a, u)

    return ScalarFunction(diff, (lo, hi), tuple(sorted(sing.items())), jumps, f.decay,
                          f"shift{h:g}[{f.name}]")


def modulus_of_continuity(f, delta, p, spec=DEFAULT_SPEC):
    """``sup_{0 < h <= delta} |f(. + h) - f|_p`` over the shifts ``delta k / 32``."""
    f = _fn(f)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    best = 0.0
    for k in range(1, _SHIFTS + 1):
        h = delta * k / _SHIFTS
        diff = _shifted_difference(f, h)
        try:
            val = lp_norm(diff, p, spec)
        except ConvergenceError:
            # f(x + h) - f(x) keeps only ~eps/h relative digits for tiny h
            val = lp_norm(diff, p, spec.tightened(_CANCELLATION_SLACK))
        if math.isinf(val):
            return math.inf
        best = max(best, val)
    return best


def besov_norm(f, alpha, p, b=1.0, spec=DEFAULT_SPEC, t_min=BESOV_T_MIN, report=None):
    """Modified Besov norm ``|x**-alpha f|_p + alpha int_0^b t**(-1-alpha) omega(f, t)_p dt``.

    ``f`` is cut to ``(0, b)``.  Below ``t_min`` the modulus is extrapolated
    as a power of ``t`` with the exponent measured at ``t_min``; pass a dict
    as ``report`` to receive that exponent and the size of the extrapolated
    part.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not p >= 1.0:
        raise DomainError(f"p must be at least 1, got {p}")
    f = restricted(_fn(f), 0.0, b)
    first = lp_norm(power_weighted(f, -alpha), p, spec)
    if math.isinf(first):
        return math.inf
    b_eff = b if math.isfinite(b) else 1e6

    def omega(t):
        return modulus_of_continuity(f, t, p, spec)

    w0 = omega(t_min)
    w1 = omega(2.0 * t_min)
    if w0 == 0.0 and w1 == 0.0:
        local = math.inf
        head = 0.0
    else:
        if w0 == 0.0 or math.isinf(w0) or math.isinf(w1):
            return math.inf
        local = math.log(w1 / w0) / math.log(2.0)
        if local <= alpha:
            return math.inf
        head = w0 * t_min ** (-alpha) * alpha / (local - alpha)

    def integrand(s):
        t = np.exp(s)
        return np.array([alpha * ti ** (-alpha) * omega(ti) for ti in t])

    body, _ = integrate(integrand, math.log(t_min), math.log(b_eff), spec=spec.tightened(100.0))
    tail = 0.0
    if math.isinf(b):
        tail = omega(b_eff) * b_eff ** (-alpha)
    if report is not None:
        report.update(local_exponent=local, extrapolated=head, body=body, first=first)
    return first + head + body + tail


def sup_over_interval(fun, lo, hi, scan=17, dense=256):
    """Approximate ``max fun`` on ``[lo, hi]`` (log-spaced scan, then refinement).

    A unimodal scan is refined with a bounded Brent search; otherwise a
    dense log-spaced grid is used.  Returns ``(value, argmax)``.
    """
    grid = np.geomspace(lo, hi, scan)
    vals = np.array([fun(x) for x in grid])
    if np.any(np.isinf(vals)):
        j = int(np.argmax(np.isinf(vals)))
        return math.inf, float(grid[j])
    j = int(np.argmax(vals))
    rising = np.all(np.diff(vals[:j + 1]) >= -1e-12 * np.abs(vals[:j]).max(initial=0.0))
    falling = np.all(np.diff(vals[j:]) <= 1e-12 * np.abs(vals[j:]).max(initial=0.0))
    best, arg = float(vals[j]), float(grid[j])
    if rising and falling:
        if 0 < j < scan - 1:
            res = minimize_scalar(lambda x: -fun(x), bounds=(grid[j - 1], grid[j + 1]),
                                  method="bounded", options={"xatol": 1e-7 * grid[j]})
            if -res.fun > best:
                best, arg = float(-res.fun), float(res.x)
        return best, arg
    fine = np.geomspace(lo, hi, dense)
    fvals = np.array([fun(x) for x in fine])
    k = int(np.argmax(fvals))
    if fvals[k] > best:
        best, arg = float(fvals[k]), float(fine[k])
    return best, arg


def _norm_of(f, spec):
    if isinstance(f, CatalogEntry) and f.known_norm is not None:
        entry = f

        def closed(p):
            lo, hi = entry.norm_range
            if lo < p < hi or (p == lo and not entry.metadata.get("open_left", True)):
                return entry.known_norm(p)
            return math.inf
        return closed
    fn = _fn(f)
    return lambda p: lp_norm(fn, p, spec)


def gls_norm(f, psi: PsiFunction, spec=DEFAULT_SPEC):
    """Grand Lebesgue norm ``sup_q |f|_q / psi(q)`` over the clipped support."""
    norm = _norm_of(f, spec)
    lo, hi = psi.clipped_support()
    val, _ = sup_over_interval(lambda q: norm(q) / psi(q), lo, hi)
    return val


def natural_psi(f, s1, s2, spec=DEFAULT_SPEC):
    """``psi(p) = |f|_p`` on ``(s1, s2)``, evaluated lazily."""
    norm = _norm_of(f, spec)
    psi = PsiFunction(norm, (s1, s2), f"natural[{getattr(f, 'name', 'f')}]")
    _probe(psi)
    return psi


def _probe(psi):
    lo, hi = psi.clipped_support()
    for p in (lo, math.sqrt(lo * hi), hi):
        v = psi(p)
        if math.isinf(v):
            raise DomainError(f"{psi.name} is infinite at p={p} inside its support")


def fundamental_function(psi: PsiFunction, delta):
    """``sup_p delta**(1/p) / psi(p)``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    lo, hi = psi.clipped_support()
    val, _ = sup_over_interval(lambda p: delta ** (1.0 / p) / psi(p), lo, hi)
    return val


def besov_natural_psi(f, alpha, beta, spec=DEFAULT_SPEC, b=1.0):
    """``psi(p) = ||f||_B(alpha, p)`` on ``(1, beta)``."""
    if not 1.0 < beta <= 1.0 / alpha:
        raise DomainError(f"need 1 < beta <= 1/alpha, got beta={beta}")
    fn = _fn(f)
    psi = PsiFunction(lambda p: besov_norm(fn, alpha, p, b, spec), (1.0, beta),
                      f"besov[{fn.name}]")
    _probe(psi)
    return psi
