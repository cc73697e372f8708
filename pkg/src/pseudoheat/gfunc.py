"""Exact term algebra for iterated (1/sinh s) d/ds derivatives of a radial Gaussian.

The base function is G(s) = sqrt(a/pi) * exp(-a s^2 + E) with a > 0.  Its
n-th iterated derivative under the operator (1/sinh s) d/ds -- equivalently
the n-th derivative in l = cosh s -- is represented exactly as a finite sum
of terms

    c(a) * s^p * cosh(s)^q / sinh(s)^r        (q in {0, 1} after rewriting
                                               cosh^2 = 1 + sinh^2)

where each coefficient c(a) is a polynomial in the rate a with exact
rational coefficients.  Two independent evaluation routes are provided:
direct term summation (with precision escalation where the 1/sinh^r terms
cancel catastrophically) and a power series in l - 1, which is regular at
s = 0 and remains accurate out to s of order 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

__all__ = [
    "S_MIN",
    "GTerm",
    "GExpression",
    "g_base",
    "apply_operator",
    "sigma_derivative",
    "add_expressions",
    "evaluate",
    "evaluate_near_origin",
    "evaluate_auto",
    "dump",
    "derivative_terms",
]

S_MIN = 1e-3
SERIES_SWITCH = 0.2  # below this, evaluate_auto prefers the l-series route
SERIES_ORDER_CAP = 30

_EPS = 2.220446049250313e-16

Poly = tuple[Fraction, ...]  # coefficients of a polynomial in the rate a

_ZERO = ()
_ONE: Poly = (Fraction(1),)


def _poly_trim(c: list[Fraction]) -> Poly:
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _poly_add(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, v in enumerate(q):
        out[i] += v
    return _poly_trim(out)


def _poly_scale(p: Poly, c: int | Fraction) -> Poly:
    if c == 0:
        return _ZERO
    return tuple(v * c for v in p)


def _poly_mul_a(p: Poly) -> Poly:
    """Multiply by the symbol a."""
    if not p:
        return _ZERO
    return (Fraction(0),) + p


def _poly_eval(p: Poly, a: float) -> float:
    acc = 0.0
    for v in reversed(p):
        acc = acc * a + float(v)
    return acc


def _poly_eval_mp(p: Poly, a: "mpmath.mpf") -> "mpmath.mpf":
    acc = mpmath.mpf(0)
    for v in reversed(p):
        acc = acc * a + mpmath.mpf(v.numerator) / v.denominator
    return acc


def _poly_str(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for k in range(len(p) - 1, -1, -1):
        v = p[k]
        if v == 0:
            continue
        if k == 0:
            mono = str(v)
        else:
            head = "a" if k == 1 else f"a^{k}"
            if v == 1:
                mono = head
            elif v == -1:
                mono = f"-{head}"
            else:
                mono = f"{v}*{head}"
        parts.append(mono)
    out = parts[0]
    for mono in parts[1:]:
        out += f" - {mono[1:]}" if mono.startswith("-") else f" + {mono}"
    return out


@dataclass(frozen=True)
class GTerm:
    """One canonical term c(a) * s^p * cosh^q(s) / sinh^r(s)."""

    coeff: Poly
    p: int
    q: int
    r: int

    def __post_init__(self):
        if self.q not in (0, 1):
            raise ValueError("cosh power must be canonicalized to 0 or 1")
        if self.p < 0 or self.r < 0:
            raise ValueError("powers must be nonnegative")
        if not self.coeff:
            raise ValueError("zero terms are dropped on merge")


@dataclass(frozen=True)
class GExpression:
    """Canonical term set for the n-th derivative at rate a, shift E.

    The common prefactor sqrt(a/pi) * exp(-a s^2 + E) is kept symbolic as
    the pair (a, E); terms multiply it.
    """

    n: int
    terms: tuple[GTerm, ...]
    a: float
    E: float


def _merge(parts: dict[tuple[int, int, int], Poly]) -> tuple[GTerm, ...]:
    out = []
    for key in sorted(parts):
        poly = parts[key]
        if poly:
            out.append(GTerm(poly, *key))
    return tuple(out)


def _accumulate(parts: dict, p: int, q: int, r: int, poly: Poly) -> None:
    """Add poly * s^p cosh^q sinh^-r, rewriting cosh^2 = 1 + sinh^2 first."""
    while q >= 2:
        # cosh^q = cosh^(q-2) + cosh^(q-2) sinh^2
        _accumulate(parts, p, q - 2, r - 2, poly)
        q -= 2
    key = (p, q, r)
    parts[key] = _poly_add(parts.get(key, _ZERO), poly)


def g_base(a: float, E: float) -> GExpression:
    """G^(0): the bare radial Gaussian sqrt(a/pi) exp(-a s^2 + E)."""
    if not a > 0.0:
        raise ValueError("rate a must be positive (diffusive branch)")
    return GExpression(0, (GTerm(_ONE, 0, 0, 0),), float(a), float(E))


def _apply_rules(terms: tuple[GTerm, ...], with_inverse_sinh: bool) -> tuple[GTerm, ...]:
    """d/ds of sum(terms) * exp(-a s^2), then optionally times 1/sinh s.

    Product rule on c s^p cosh^q sinh^-r exp(-a s^2) gives four pieces
    (powers of s, cosh, sinh and the chain-rule -2 a s factor); the extra
    1/sinh shifts every r by one.
    """
    shift = 1 if with_inverse_sinh else 0
    parts: dict[tuple[int, int, int], Poly] = {}
    for t in terms:
        if t.p:
            _accumulate(parts, t.p - 1, t.q, t.r + shift, _poly_scale(t.coeff, t.p))
        if t.q:
            _accumulate(parts, t.p, t.q - 1, t.r - 1 + shift, _poly_scale(t.coeff, t.q))
        if t.r:
            _accumulate(parts, t.p, t.q + 1, t.r + 1 + shift, _poly_scale(t.coeff, -t.r))
        _accumulate(parts, t.p + 1, t.q, t.r + shift, _poly_mul_a(_poly_scale(t.coeff, -2)))
    return _merge(parts)


def apply_operator(g: GExpression) -> GExpression:
    """One application of (1/sinh s) d/ds, exactly."""
    return GExpression(g.n + 1, _apply_rules(g.terms, True), g.a, g.E)


def sigma_derivative(g: GExpression) -> GExpression:
    """Plain d/ds of the expression (no 1/sinh factor), exactly.

    The returned expression keeps the source order label n; it equals
    sinh(s) times the order n+1 expression.
    """
    return GExpression(g.n, _apply_rules(g.terms, False), g.a, g.E)


def add_expressions(g1: GExpression, g2: GExpression) -> GExpression:
    """Termwise sum of two expressions sharing (n, a, E)."""
    if (g1.n, g1.a, g1.E) != (g2.n, g2.a, g2.E):
        raise ValueError("can only add expressions with matching order and prefactor")
    parts: dict[tuple[int, int, int], Poly] = {}
    for t in g1.terms + g2.terms:
        _accumulate(parts, t.p, t.q, t.r, t.coeff)
    return GExpression(g1.n, _merge(parts), g1.a, g1.E)


@lru_cache(maxsize=None)
def derivative_terms(n: int) -> tuple[GTerm, ...]:
    """Canonical term set of G^(n), independent of the numeric (a, E)."""
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n == 0:
        return (GTerm(_ONE, 0, 0, 0),)
    return _apply_rules(derivative_terms(n - 1), True)


def expression(n: int, a: float, E: float) -> GExpression:
    """G^(n) at rate a and shift E, using the cached term sets."""
    if not a > 0.0:
        raise ValueError("rate a must be positive (diffusive branch)")
    return GExpression(n, derivative_terms(n), float(a), float(E))


# --- evaluation: term route -------------------------------------------------

def _neumaier_sum(values) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _cancellation_exponent(terms: tuple[GTerm, ...]) -> int:
    """Largest r - p over terms: the s->0 blowup order of individual terms."""
    worst = 0
    for t in terms:
        worst = max(worst, t.r - t.p)
    return worst


def evaluate(g: GExpression, s: float, s_min: float = S_MIN) -> float:
    """Sum the canonical terms times the prefactor at s >= s_min.

    Individual terms blow up like s^-(r-p) while their sum stays finite, so
    for small s the summation is done in extended precision (the
    coefficients are exact rationals); compensated summation is used on the
    binary64 path.
    """
    if s < s_min:
        raise ValueError(f"s={s:g} below s_min={s_min:g}; use evaluate_near_origin")
    return _evaluate_terms(g, s)


def _evaluate_terms(g: GExpression, s: float) -> float:
    blowup = _cancellation_exponent(g.terms)
    # lost digits ~ blowup * log10(1/s); escalate when more than ~3
    if s < 1.0 and blowup * math.log10(1.0 / s) > 3.0:
        return _evaluate_terms_mp(g, s, blowup)
    # work with log magnitudes so sinh^r and the Gaussian prefactor cannot
    # overflow separately; their combined exponent is always moderate
    if s > 20.0:
        log_ch = s - math.log(2.0) + math.log1p(math.exp(-2.0 * s))
        log_sh = s - math.log(2.0) + math.log1p(-math.exp(-2.0 * s))
    else:
        log_ch = math.log(math.cosh(s))
        log_sh = math.log(math.sinh(s))
    base = 0.5 * math.log(g.a / math.pi) - g.a * s * s + g.E
    log_s = math.log(s)
    vals = []
    for t in g.terms:
        c = _poly_eval(t.coeff, g.a)
        if c == 0.0:
            continue
        expo = base + t.p * log_s + t.q * log_ch - t.r * log_sh
        vals.append(math.copysign(math.exp(expo), c) * abs(c))
    return _neumaier_sum(vals)


def _evaluate_terms_mp(g: GExpression, s: float, blowup: int) -> float:
    digits = 25 + int(math.ceil(blowup * math.log10(1.0 / s)))
    with mpmath.workdps(digits):
        sm = mpmath.mpf(s)
        am = mpmath.mpf(g.a)
        ch = mpmath.cosh(sm)
        sh = mpmath.sinh(sm)
        total = mpmath.mpf(0)
        for t in g.terms:
            total += _poly_eval_mp(t.coeff, am) * sm**t.p * ch**t.q / sh**t.r
        pref = mpmath.sqrt(am / mpmath.pi) * mpmath.exp(-am * sm * sm + g.E)
        return float(pref * total)


# --- evaluation: l-series route ----------------------------------------------

def _ps_mul(p: list[Fraction], q: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * (order + 1)
    for i, pi in enumerate(p):
        if pi == 0 or i > order:
            continue
        for j, qj in enumerate(q):
            if i + j > order:
                break
            if qj:
                out[i + j] += pi * qj
    return out


@lru_cache(maxsize=None)
def _arccosh_sq_series(order: int) -> tuple[Fraction, ...]:
    """Coefficients of v(w) = (arccosh(1+w))^2 as a power series in w.

    Obtained by inverting w(v) = cosh(sqrt(v)) - 1 = sum_{j>=1} v^j/(2j)!,
    which has exact rational coefficients.
    """
    b = [Fraction(0)] * (order + 1)
    fact = 1
    for j in range(1, order + 1):
        fact *= (2 * j) * (2 * j - 1)
        b[j] = Fraction(1, fact)
    c = [Fraction(0)] * (order + 1)
    c[1] = Fraction(2)  # 1 / b[1]
    for m in range(2, order + 1):
        # coefficient of w^m in sum_j b_j * v(w)^j with the current partial v
        v = c[:m] + [Fraction(0)]
        power = v[:]
        total = Fraction(0)
        for j in range(2, m + 1):
            power = _ps_mul(power, v, m)
            if b[j]:
                total += b[j] * power[m]
        c[m] = -total / b[1]
    return tuple(c)


@lru_cache(maxsize=4096)
def _h_series(a: float, order: int = SERIES_ORDER_CAP) -> tuple[float, ...]:
    """Taylor coefficients of exp(-a v(w)) around w = l - 1 = 0."""
    v = _arccosh_sq_series(order)
    gcoef = [-a * float(vk) for vk in v]
    h = [0.0] * (order + 1)
    h[0] = 1.0
    for m in range(1, order + 1):
        acc = 0.0
        for k in range(1, m + 1):
            if gcoef[k]:
                acc += k * gcoef[k] * h[m - k]
        h[m] = acc / m
    return tuple(h)


def _series_value(n: int, a: float, E: float, s: float) -> float:
    """d^n/dl^n of the base function via the w = l - 1 power series."""
    w0 = 2.0 * math.sinh(0.5 * s) ** 2  # cosh(s) - 1, cancellation-free
    h = _h_series(a)
    order = len(h) - 1
    # sum_{j>=n} h_j * j!/(j-n)! * w0^(j-n), evaluated by Horner from the top
    acc = 0.0
    for j in range(order, n - 1, -1):
        falling = 1.0
        for i in range(n):
            falling *= j - i
        acc = acc * w0 + h[j] * falling
    return math.sqrt(a / math.pi) * math.exp(E) * acc


def evaluate_near_origin(g: GExpression, s: float, s_min: float = S_MIN) -> float:
    """Analytic value of G^(n) on [0, s_min] via the series in l - 1."""
    if s < 0.0 or s > s_min:
        raise ValueError(f"s={s:g} outside [0, {s_min:g}]")
    return _series_value(g.n, g.a, g.E, s)


def series_ok(a: float, s: float) -> bool:
    """Whether the l-series route is trustworthy at this (a, s).

    The series alternates with effective argument ~ 2 a (cosh s - 1); for
    large argument it cancels like the termwise sum of exp(-x), so it is
    restricted to a * s^2 <= 3 on top of the geometric radius.
    """
    return s < SERIES_SWITCH and a * s * s <= 3.0


def evaluate_auto(g: GExpression, s: float) -> float:
    """Evaluate through whichever route is accurate at this (a, s).

    The series in l - 1 has no small-s cancellation and is used near the
    origin while its alternation stays mild; the term route (with its
    precision escalation) covers everything else.
    """
    if series_ok(g.a, s):
        return _series_value(g.n, g.a, g.E, s)
    return _evaluate_terms(g, s)


def dump(g: GExpression) -> str:
    """Deterministic plain-text rendering of the term set."""
    lines = []
    for t in g.terms:
        bits = [f"({_poly_str(t.coeff)})"]
        if t.p:
            bits.append(f"s^{t.p}" if t.p > 1 else "s")
        if t.q:
            bits.append("cosh(s)")
        head = " * ".join(bits)
        if t.r:
            head += f" / sinh^{t.r}(s)" if t.r > 1 else " / sinh(s)"
        lines.append(head)
    return "\n".join(lines) if lines else "0"
