"""Function objects and the catalog of test functions with closed-form norms.

A :class:`ScalarFunction` is stored through an offset rule
``rule(anchor, u) = f(anchor + u)``.  Quadrature near a singular point ``c``
calls ``rule(c, u)`` with tiny ``u``, so the rule can form ``x - c`` as
``(anchor - c) + u`` without cancellation.  Plain evaluation is
``rule(0, x)``.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import digamma, factorial, gammaincc, poch

from .errors import DivergenceError, DomainError, SingularPointError
from .quadrature import integrate
from .special import gamma

__all__ = [
    "ScalarFunction",
    "VerySimpleFunction",
    "TensorFunction",
    "CatalogEntry",
    "make_indicator",
    "make_f0",
    "make_h_delta",
    "make_power_alpha",
    "make_constant",
    "make_zero",
    "make_witness_sum",
    "vs_lp_norm",
    "evaluate",
    "parse_function_spec",
]

Rule = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarFunction:
    """Real function on ``domain``, extended by zero outside it.

    ``singularities`` holds ``(point, exponent)`` pairs: near ``point`` the
    function behaves like ``|x - point|**exponent``.  ``jumps`` lists
    discontinuities.  ``decay`` is the power-law exponent at infinity and is
    required when the domain is unbounded.
    """

    rule: Rule
    domain: tuple[float, float]
    singularities: tuple[tuple[float, float], ...] = ()
    jumps: tuple[float, ...] = ()
    decay: float | None = None
    name: str = "f"

    def __post_init__(self):
        a, b = self.domain
        if not a < b:
            raise DomainError(f"empty domain {self.domain}")
        if math.isinf(b) and self.decay is None:
            raise DomainError(f"{self.name}: unbounded domain needs a decay exponent")

    @classmethod
    def from_callable(cls, f, domain, **kw):
        """Wrap a plain vectorised ``f(x)``; loses the offset precision."""
        return cls(rule=lambda c, u: f(c + np.asarray(u, dtype=float)), domain=domain, **kw)

    def at(self, anchor, u):
        """Zero-extended values at ``anchor + u``."""
        u = np.asarray(u, dtype=float)
        a, b = self.domain
        inside = (u > a - anchor) & (u < b - anchor)
        out = np.zeros(u.shape)
        if inside.any():
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                out[inside] = self.rule(float(anchor), u[inside])
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.at(0.0, x.ravel()).reshape(x.shape)
        return out if out.ndim else float(out)

    def evaluate(self, x):
        """Value at a single point; raises at an annotated blow-up."""
        x = float(x)
        for point, e in self.singularities:
            if x == point and e < 0:
                raise SingularPointError(f"{self.name} blows up at x={x}")
        return float(self.at(0.0, np.array([x]))[0])

    def breakpoints(self):
        """Sorted finite points where the integrand is not smooth."""
        pts = {self.domain[0]}
        if math.isfinite(self.domain[1]):
            pts.add(self.domain[1])
        pts.update(p for p, _ in self.singularities)
        pts.update(self.jumps)
        return sorted(p for p in pts if math.isfinite(p))

    def exponent_at(self, point):
        for p, e in self.singularities:
            if p == point:
                return e
        return 0.0

    def scale(self, c):
        c = float(c)
        rule = self.rule
        return ScalarFunction(lambda a, u: c * rule(a, u), self.domain, self.singularities,
                              self.jumps, self.decay, f"{c:g}*{self.name}")

    def add(self, other):
        """Pointwise sum (each term zero-extended)."""
        lo = min(self.domain[0], other.domain[0])
        hi = max(self.domain[1], other.domain[1])
        decays = [f.decay for f in (self, other) if math.isinf(f.domain[1])]
        decay = max(decays) if decays else None
        sing = {}
        for p, e in self.singularities + other.singularities:
            sing[p] = min(e, sing.get(p, 0.0))
        # inner domain edges become jumps of the sum
        jumps = set(self.jumps) | set(other.jumps)
        for f in (self, other):
            jumps.update(p for p in f.domain if math.isfinite(p) and lo < p < hi)
        return ScalarFunction(
            lambda a, u: self.at(a, u) + other.at(a, u),
            (lo, hi), tuple(sorted(sing.items())), tuple(sorted(jumps)), decay,
            f"{self.name}+{other.name}")

    def check_finite(self, samples=257):
        """Sample off the annotated set; raise if any value is not finite."""
        a, b = self.domain
        hi = b if math.isfinite(b) else a + 100.0
        xs = np.linspace(a, hi, samples + 2)[1:-1]
        bad = set(self.breakpoints())
        xs = np.array([x for x in xs if x not in bad])
        vals = self(xs)
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"{self.name} is not finite at {xs[~np.isfinite(vals)][:3]}")
        return True


@dataclass(frozen=True)
class VerySimpleFunction:
    """Zero-order spline ``sum c_k I(x in A_k)`` on disjoint segments.

    In the equal-step form every segment has width ``step``.  Segments of
    unequal width are accepted (``step=None``) but the exact norm formula
    is then unavailable.
    """

    coefficients: tuple[float, ...]
    segments: tuple[tuple[float, float], ...]
    step: float | None = None

    def __post_init__(self):
        if len(self.coefficients) != len(self.segments):
            raise DomainError("one coefficient per segment is required")
        segs = sorted(self.segments)
        for lo, hi in segs:
            if not (0.0 <= lo < hi):
                raise DomainError(f"bad segment ({lo}, {hi})")
        for (_, h1), (l2, _) in zip(segs, segs[1:]):
            if l2 < h1:
                raise DomainError("segments must be pairwise disjoint")
        if self.step is not None:
            if not 0.0 < self.step:
                raise DomainError("step must be positive")
            for lo, hi in segs:
                if not math.isclose(hi - lo, self.step, rel_tol=1e-12, abs_tol=1e-15):
                    raise DomainError(f"segment ({lo}, {hi}) does not have width {self.step}")

    @classmethod
    def equal_step(cls, starts, coefficients, step):
        segs = tuple((float(s), float(s) + step) for s in starts)
        return cls(tuple(float(c) for c in coefficients), segs, float(step))

    @classmethod
    def from_file(cls, path):
        """Read ``h`` on the first line, then ``h1 c`` pairs, one per line."""
        lines = [ln.split("#")[0].strip() for ln in Path(path).read_text().splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise DomainError(f"{path}: empty very-simple-function file")
        step = float(lines[0])
        starts, coefs = [], []
        for ln in lines[1:]:
            parts = ln.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"{path}: expected 'h1 c', got {ln!r}")
            starts.append(float(parts[0]))
            coefs.append(float(parts[1]))
        return cls.equal_step(starts, coefs, step)

    @property
    def l1_norm(self):
        return sum(abs(c) * (hi - lo) for c, (lo, hi) in zip(self.coefficients, self.segments))

    def as_function(self):
        coefs = np.array(self.coefficients, dtype=float)
        segs = np.array(self.segments, dtype=float).reshape(-1, 2)

        def rule(a, u):
            out = np.zeros(np.shape(u))
            for c, (lo, hi) in zip(coefs, segs):
                off_lo, off_hi = lo - a, hi - a
                out += c * ((u > off_lo) & (u < off_hi))
            return out

        jumps = tuple(sorted({p for s in self.segments for p in s}))
        lo = min(s[0] for s in self.segments) if self.segments else 0.0
        hi = max(s[1] for s in self.segments) if self.segments else 1.0
        return ScalarFunction(rule, (lo, hi), (), jumps, None, "vs")


@dataclass(frozen=True)
class TensorFunction:
    """Factorable function ``H(x, y) = g1(x) g2(y)``."""

    g1: ScalarFunction
    g2: ScalarFunction

    def __call__(self, x, y):
        return np.multiply.outer(np.asarray(self.g1(x)), np.asarray(self.g2(y)))


@dataclass(frozen=True)
class CatalogEntry:
    """A named test function with whatever closed forms are known.

    ``norm_range`` is the open interval of ``p`` on which ``known_norm`` is
    finite.  ``derivative(alpha)`` returns the exact order-``alpha``
    derivative as a :class:`ScalarFunction`.
    """

    name: str
    function: ScalarFunction
    known_norm: Callable[[float], float] | None = None
    norm_range: tuple[float, float] = (1.0, math.inf)
    derivative: Callable[[float], ScalarFunction] | None = None
    metadata: dict = field(default_factory=dict)

    def norm(self, p):
        if self.known_norm is None:
            raise DomainError(f"no closed-form norm for {self.name}")
        lo, hi = self.norm_range
        if not lo <= p < hi or (p == lo and self.metadata.get("open_left", True)):
            raise DivergenceError(f"|{self.name}|_p is infinite at p={p}")
        return self.known_norm(p)

    def scaled(self, c):
        c = float(c)
        norm = self.known_norm
        deriv = self.derivative
        return CatalogEntry(
            f"{c:g}*{self.name}", self.function.scale(c),
            (lambda p: abs(c) * norm(p)) if norm else None, self.norm_range,
            (lambda a: deriv(a).scale(c)) if deriv else None, dict(self.metadata))


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def indicator_derivative_function(h1, h2, alpha):
    """Exact order-``alpha`` derivative of ``I(h1 < x < h2)`` as a function."""
    _check_alpha(alpha)
    g = gamma(1.0 - alpha)
    if math.isinf(h2):
        def rule(a, u):
            return ((a - h1) + u) ** (-alpha) / g
        return ScalarFunction(rule, (h1, math.inf), ((h1, -alpha),), (), -alpha,
                              f"D{alpha:g}[g_{h1:g}]")
    width = h2 - h1

    def rule(a, u):
        s1 = (a - h1) + u
        s2 = (a - h2) + u
        out = s1 ** (-alpha)
        far = s2 > 0
        if np.any(far):
            # (s1^-a - s2^-a) without cancellation for large x
            t = s1[far]
            out[far] = t ** (-alpha) * -np.expm1(-alpha * np.log1p(-width / t))
            # close to h2 the plain difference is accurate and keeps s2 exact
            near = far.copy()
            near[far] = s2[far] < width
            out[near] = s1[near] ** (-alpha) - s2[near] ** (-alpha)
        return out / g

    return ScalarFunction(rule, (h1, math.inf), ((h1, -alpha), (h2, -alpha)), (h2,),
                          -1.0 - alpha, f"D{alpha:g}[g_{h1:g},{h2:g}]")


def make_indicator(h1, h2):
    """Indicator of ``(h1, h2)``; ``h2 = inf`` gives ``I(x > h1)``."""
    h1 = float(h1)
    h2 = float(h2)
    if not 0.0 <= h1 < h2:
        raise DomainError(f"indicator needs 0 <= h1 < h2, got ({h1}, {h2})")
    name = f"indicator:{h1:g},{h2:g}"
    jumps = (h1,) if h1 > 0 else ()
    if math.isinf(h2):
        fn = ScalarFunction(lambda a, u: np.ones(np.shape(u)), (h1, h2), (), jumps, 0.0, name)
        return CatalogEntry(name, fn, None, (math.inf, math.inf),
                            lambda alpha: indicator_derivative_function(h1, h2, alpha),
                            {"h1": h1, "h2": h2, "width": math.inf})
    width = h2 - h1
    fn = ScalarFunction(lambda a, u: np.ones(np.shape(u)), (h1, h2), (), jumps + (h2,), None, name)
    return CatalogEntry(name, fn, lambda p: width ** (1.0 / p), (1.0, math.inf),
                        lambda alpha: indicator_derivative_function(h1, h2, alpha),
                        {"h1": h1, "h2": h2, "width": width, "open_left": False})


def log_kernel_integral(order, s):
    """``int_0^s (1 - e^-w)**(order-1) dw`` for an array of ``s >= 0``.

    Series ``s + psi(1) - psi(order) - sum (1-order)_k e^{-ks}/(k k!)`` for
    ``s >= 1``, quadrature below.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(s.shape)
    k = np.arange(1, 90)
    coef = poch(1.0 - order, k) / (k * factorial(k))
    const = digamma(1.0) - digamma(order)
    far = s >= 1.0
    if far.any():
        sf = s[far]
        out[far] = sf + const - np.exp(-np.outer(sf, k)) @ coef
    for i in np.nonzero(~far)[0]:
        out[i] = integrate(lambda w: (-np.expm1(-w)) ** (order - 1.0), 0.0, s[i],
                           (order - 1.0, 0.0))[0] if s[i] > 0 else 0.0
    return out


def f0_derivative_function(alpha):
    """Exact order-``alpha`` derivative of ``f0``.

    ``Gamma(1-alpha) D f0(x) = (x-1)**-alpha / x - alpha x**(-alpha-1) J(ln x)``
    with ``J = log_kernel_integral(1 - alpha, .)``.
    """
    _check_alpha(alpha)
    g = gamma(1.0 - alpha)

    def rule(a, u):
        d = (a - 1.0) + u
        x = a + u
        out = np.zeros(np.shape(u))
        on = d > 0
        xo, do = x[on], d[on]
        out[on] = (do ** (-alpha) / xo
                   - alpha * xo ** (-alpha - 1.0)
                   * log_kernel_integral(1.0 - alpha, np.log1p(do))) / g
        return out

    return ScalarFunction(rule, (1.0, math.inf), ((1.0, -alpha),), (), -1.0 - alpha,
                          f"D{alpha:g}[f0]")


def make_f0():
    """``x**-1`` on ``(1, inf)``; ``|f0|_p = (p - 1)**(-1/p)`` for ``p > 1``."""
    fn = ScalarFunction(lambda a, u: 1.0 / (a + u), (1.0, math.inf), (), (1.0,), -1.0, "f0")
    return CatalogEntry("f0", fn, lambda p: (p - 1.0) ** (-1.0 / p), (1.0, math.inf),
                        f0_derivative_function)


def h_delta_norm(delta, alpha, p):
    """Exact ``|h_delta|_p``: ``eta**(-1-delta p) Gamma(delta p + 1, eta)``, ``eta = 1 - alpha p``."""
    eta = 1.0 - alpha * p
    if eta <= 0:
        return math.inf
    s = delta * p + 1.0
    # upper incomplete gamma = gammaincc * Gamma
    log_val = -s * math.log(eta) + math.log(gammaincc(s, eta)) + math.lgamma(s)
    return math.exp(log_val / p)


def h_delta_norm_asymptotic(delta, alpha, p):
    """Leading behaviour of ``|h_delta|_p`` as ``alpha p -> 1``."""
    eta = 1.0 - alpha * p
    return (math.gamma(delta * p + 1.0) ** (1.0 / p)) * eta ** (-delta - 1.0 / p)


def make_h_delta(delta, alpha):
    """``x**-alpha |ln x|**delta`` on ``(0, 1/e)``."""
    delta = float(delta)
    _check_alpha(alpha)
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    edge = math.exp(-1.0)

    def rule(a, u):
        x = a + u
        return x ** (-alpha) * np.abs(np.log(x)) ** delta

    fn = ScalarFunction(rule, (0.0, edge), ((0.0, -alpha),), (edge,), None,
                        f"h_delta:{delta:g}")
    return CatalogEntry(
        fn.name, fn, lambda p: h_delta_norm(delta, alpha, p), (1.0, 1.0 / alpha), None,
        {"delta": delta, "alpha": alpha, "open_left": False,
         "asymptotic_norm": lambda p: h_delta_norm_asymptotic(delta, alpha, p),
         "riesz_asymptotic": lambda p: math.exp(-1.0) / alpha
         * (1.0 - alpha * p) ** (-delta - 1.0)})


def make_witness_sum(delta, alpha):
    """Disjointly supported sum ``f0 + h_delta``, finite norm for ``1 < p < 1/alpha``."""
    f0 = make_f0()
    hd = make_h_delta(delta, alpha)
    fn = f0.function.add(hd.function)

    def norm(p):
        return (f0.norm(p) ** p + hd.norm(p) ** p) ** (1.0 / p)

    return CatalogEntry(f"f0+h_delta:{delta:g}", fn, norm, (1.0, 1.0 / alpha), None,
                        {"delta": delta, "alpha": alpha})


def make_power_alpha(alpha, b=math.inf):
    """``x**(alpha - 1)`` on ``(0, b)``; its order-``alpha`` derivative vanishes."""
    alpha = float(alpha)
    _check_alpha(alpha)

    def rule(a, u):
        return (a + u) ** (alpha - 1.0)

    name = f"power_alpha:{alpha:g}"
    fn = ScalarFunction(rule, (0.0, b), ((0.0, alpha - 1.0),),
                        (b,) if math.isfinite(b) else (), alpha - 1.0 if math.isinf(b) else None,
                        name)
    if math.isinf(b):
        norm, rng = None, (math.inf, math.inf)
    else:
        def norm(p):
            e = (alpha - 1.0) * p + 1.0
            return (b ** e / e) ** (1.0 / p)
        rng = (1.0, 1.0 / (1.0 - alpha))

    def derivative(order):
        if order != alpha:
            raise DomainError("closed form known only for the matching order")
        return make_zero((0.0, b) if math.isfinite(b) else (0.0, 1.0)).function

    return CatalogEntry(name, fn, norm, rng, derivative,
                        {"alpha": alpha, "b": b, "open_left": False})


def make_constant(c, b=math.inf):
    """Constant ``c`` on ``(0, b)``."""
    c = float(c)
    name = f"const:{c:g}"
    if math.isinf(b):
        fn = ScalarFunction(lambda a, u: np.full(np.shape(u), c), (0.0, b), (), (),
                            0.0, name)
        norm, rng = ((lambda p: 0.0), (1.0, math.inf)) if c == 0 else (None, (math.inf, math.inf))
    else:
        fn = ScalarFunction(lambda a, u: np.full(np.shape(u), c), (0.0, b), (), (b,), None, name)
        norm, rng = (lambda p: abs(c) * b ** (1.0 / p)), (1.0, math.inf)

    def derivative(alpha):
        g = gamma(1.0 - alpha)
        if math.isinf(b):
            def rule(a, u):
                return c * (a + u) ** (-alpha) / g
            return ScalarFunction(rule, (0.0, b), ((0.0, -alpha),), (), -alpha, f"D[{name}]")
        return indicator_derivative_function(0.0, b, alpha).scale(c)

    return CatalogEntry(name, fn, norm, rng, derivative,
                        {"c": c, "b": b, "open_left": False})


def make_zero(domain=(0.0, 1.0)):
    fn = ScalarFunction(lambda a, u: np.zeros(np.shape(u)), domain, (), (), None
                        if math.isfinite(domain[1]) else 0.0, "zero")
    return CatalogEntry("zero", fn, lambda p: 0.0, (1.0, math.inf),
                        lambda alpha: fn, {"open_left": False})


def make_very_simple(vs: VerySimpleFunction):
    """Catalog entry for a very simple function with its exact derivative."""
    fn = vs.as_function()

    def derivative(alpha):
        parts = [indicator_derivative_function(lo, hi, alpha).scale(c)
                 for c, (lo, hi) in zip(vs.coefficients, vs.segments)]
        total = parts[0]
        for part in parts[1:]:
            total = total.add(part)
        return total

    norm = (lambda p: vs_lp_norm(vs, p)) if vs.step is not None else None
    return CatalogEntry("vs", fn, norm, (1.0, math.inf), derivative,
                        {"open_left": False, "l1": vs.l1_norm})


def vs_lp_norm(f: VerySimpleFunction, p):
    """Exact ``|f|_p = h**(1/p) (sum |c_k|**p)**(1/p)`` for the equal-step form."""
    if p < 1:
        raise DomainError(f"p must be at least 1, got {p}")
    if f.step is None:
        raise DomainError("exact norm needs the equal-step form")
    c = np.abs(np.asarray(f.coefficients, dtype=float))
    if math.isinf(p):
        return float(c.max(initial=0.0))
    return float(f.step ** (1.0 / p) * np.sum(c**p) ** (1.0 / p))


def evaluate(f, x):
    """Point value of a function or catalog entry, zero outside the domain."""
    if isinstance(f, CatalogEntry):
        f = f.function
    return f.evaluate(x)


def parse_function_spec(text, alpha=None):
    """Build a catalog entry from ``f0``, ``indicator:h1,h2``, ``h_delta:D``,
    ``power_alpha:a``, ``const:c[,b]``, ``zero`` or ``vs:path``."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "f0":
            return make_f0()
        if kind == "zero":
            return make_zero()
        if kind == "indicator":
            h1, h2 = (float(v) for v in arg.split(","))
            return make_indicator(h1, h2)
        if kind == "h_delta":
            if alpha is None:
                raise DomainError("h_delta needs alpha")
            return make_h_delta(float(arg), alpha)
        if kind == "power_alpha":
            return make_power_alpha(float(arg))
        if kind == "const":
            vals = [float(v) for v in arg.split(",")]
            return make_constant(*vals)
        if kind == "vs":
            return make_very_simple(VerySimpleFunction.from_file(arg))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot parse function spec {text!r}: {exc}") from None
    raise DomainError(f"unknown function spec {text!r}")
