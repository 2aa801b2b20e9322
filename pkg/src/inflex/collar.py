"""One-sided collar polynomials.

A collar polynomial matches a derivative jet (a_0, ..., a_{n-1}) at the
inner edge ``a`` of a thin interval and vanishes to order n at the outer
edge ``b``, using the factored form

    h(x) = (x - b)^n * sum_i c_i (x - a)^i.

Differentiating the factored form at x = a yields a lower-triangular
linear system for the c_i which is solved by forward substitution in
exact rational arithmetic; a float copy of the coefficients backs the
fast evaluation path.  Lower collars reuse the upper-collar machinery
through the mirror map x -> 2a - x.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import exactpoly as xp
from .config import M_DOUBLING_SCHEDULE
from .errors import InvalidInputError

INCREASING = "increasing"
DECREASING = "decreasing"


class SignClass(enum.Enum):
    POSITIVE_DEFINITE = "positive_definite"
    NEGATIVE_DEFINITE = "negative_definite"
    INDEFINITE = "indefinite"
    IDENTICALLY_ZERO = "identically_zero"

    @property
    def definite(self):
        return self in (SignClass.POSITIVE_DEFINITE, SignClass.NEGATIVE_DEFINITE)


@dataclass(frozen=True)
class BoundaryJet:
    """Derivative data (a_0 ... a_{n-1}) prescribed at a collar's inner edge."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise InvalidInputError("a jet needs order n >= 2")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInputError("jet values must be finite")

    @property
    def order_n(self):
        return len(self.values)

    @property
    def is_zero(self):
        return all(v == 0.0 for v in self.values)


@dataclass(frozen=True)
class Collar:
    """Interval [a, a+w] (increasing) or [a-w, a] (decreasing)."""

    inner_edge: float
    width: float
    orientation: str = INCREASING

    def __post_init__(self):
        if not (math.isfinite(self.inner_edge) and math.isfinite(self.width)):
            raise InvalidInputError("collar edges must be finite")
        if self.width <= 0:
            raise InvalidInputError("collar width must be positive")
        if self.orientation not in (INCREASING, DECREASING):
            raise InvalidInputError(f"unknown orientation {self.orientation!r}")

    @property
    def outer_edge(self):
        if self.orientation == INCREASING:
            return self.inner_edge + self.width
        return self.inner_edge - self.width

    @property
    def interval(self):
        lo, hi = sorted((self.inner_edge, self.outer_edge))
        return lo, hi


def _falling(n, j):
    """n * (n-1) * ... * (n-j+1)."""
    out = 1
    for i in range(j):
        out *= n - i
    return out


def _system_matrix(n, w):
    """Exact lower-triangular matrix M with M[i][j] = d/dx^i coefficient of c_j.

    Derived from the product rule applied to (x-b)^n * (x-a)^j at x = a,
    where b - a = w:  a_i = sum_j C(i,j) j! * ff(n, i-j) * (-w)^(n-i+j) c_j.
    """
    w = xp.as_fraction(w)
    M = []
    for i in range(n):
        row = []
        for j in range(i + 1):
            row.append(
                math.comb(i, j)
                * math.factorial(j)
                * _falling(n, i - j)
                * (-w) ** (n - i + j)
            )
        M.append(row)
    return M


def solve_jet_coefficients(jet, collar):
    """Exact coefficients c_i of the factored collar polynomial.

    The solve runs in rational arithmetic (floats are taken as the exact
    rationals they are), so the jet-matching residual of the returned
    polynomial is identically zero in the exact evaluation path.
    """
    if not isinstance(jet, BoundaryJet):
        jet = BoundaryJet(tuple(jet))
    n = jet.order_n
    # mirror a decreasing collar onto the canonical increasing frame
    sigma = 1 if collar.orientation == INCREASING else -1
    data = [Fraction(sigma ** i) * xp.as_fraction(v) for i, v in enumerate(jet.values)]
    M = _system_matrix(n, collar.width)
    coeffs = []
    for i in range(n):
        acc = data[i]
        for j in range(i):
            acc -= M[i][j] * coeffs[j]
        coeffs.append(acc / M[i][i])
    return tuple(coeffs)


@dataclass(frozen=True)
class CollarPolynomial:
    """h(x) = (x-b)^n * sum_i c_i (x-a)^i on a collar, degree 2n-1."""

    collar: Collar
    order_n: int
    inner_coeffs: tuple  # exact Fractions, canonical (increasing) frame
    jet: BoundaryJet

    @property
    def _sigma(self):
        return 1 if self.collar.orientation == INCREASING else -1

    @property
    def _float_coeffs(self):
        return tuple(float(c) for c in self.inner_coeffs)

    def eval(self, x, deriv=0, exact=False):
        """Value of h^(deriv)(x) by product-rule expansion of the factored form."""
        if deriv < 0:
            raise InvalidInputError("derivative order must be >= 0")
        if not math.isfinite(x):
            raise InvalidInputError("evaluation point must be finite")
        n = self.order_n
        if deriv > 2 * n - 1:
            return Fraction(0) if exact else 0.0
        sigma = self._sigma
        a = self.collar.inner_edge
        if exact:
            s = xp.as_fraction(sigma) * (xp.as_fraction(x) - xp.as_fraction(a))
            w = xp.as_fraction(self.collar.width)
            val = _eval_canonical_exact(self.inner_coeffs, n, w, s, deriv)
            return val if sigma == 1 or deriv % 2 == 0 else -val
        s = sigma * (x - a)
        val = _eval_canonical(self._float_coeffs, n, self.collar.width, s, deriv)
        return val if sigma == 1 or deriv % 2 == 0 else -val

    def nth_derivative_coeffs(self):
        """Exact coefficients of h^(n) in the canonical variable s = +/-(x-a)."""
        return _nth_derivative_canonical(self.inner_coeffs, self.order_n,
                                         xp.as_fraction(self.collar.width))

    def boundary_residuals(self):
        """Exact jet-matching and outer-vanishing residuals, relative.

        Evaluated at the exact rational edges (the float a + w rounds off
        the true outer edge, which sits w^-n worth of conditioning away).
        """
        n = self.order_n
        w = xp.as_fraction(self.collar.width)
        scale = 1.0 + max(abs(v) for v in self.jet.values)
        inner = outer = 0.0
        for i in range(n):
            vi = _eval_canonical_exact(self.inner_coeffs, n, w, Fraction(0), i)
            sigma = self._sigma
            if sigma < 0 and i % 2:
                vi = -vi
            inner = max(inner, abs(float(vi) - self.jet.values[i])
                        / (1.0 + abs(self.jet.values[i])))
            vo = _eval_canonical_exact(self.inner_coeffs, n, w, w, i)
            outer = max(outer, abs(float(vo)) / scale)
        return inner, outer

    def sign_class(self):
        return check_sign_definite(self)

    def nth_derivative_l1(self):
        return nth_derivative_l1(self)

    def sup_norm(self):
        return sup_norm(self)


def collar_polynomial(jet, collar):
    if not isinstance(jet, BoundaryJet):
        jet = BoundaryJet(tuple(jet))
    coeffs = solve_jet_coefficients(jet, collar)
    return CollarPolynomial(collar=collar, order_n=jet.order_n,
                            inner_coeffs=coeffs, jet=jet)


def _eval_canonical(c, n, w, s, deriv):
    """h^(deriv) at s in the increasing frame, floats.

    Product rule over h = u*q with u = (s-w)^n and q = sum c_i s^i; no
    expansion into the monomial basis.
    """
    total = 0.0
    for j in range(max(0, deriv - (len(c) - 1)), min(deriv, n) + 1):
        # u^(j)(s) = ff(n,j) (s-w)^(n-j)
        u = _falling(n, j) * (s - w) ** (n - j)
        l = deriv - j
        q = 0.0
        for i in range(len(c) - 1, l - 1, -1):
            q = q * s + c[i] * _falling(i, l)
        total += math.comb(deriv, j) * u * q
    return total


def _eval_canonical_exact(c, n, w, s, deriv):
    total = Fraction(0)
    for j in range(max(0, deriv - (len(c) - 1)), min(deriv, n) + 1):
        u = _falling(n, j) * (s - w) ** (n - j)
        l = deriv - j
        q = Fraction(0)
        for i in range(len(c) - 1, l - 1, -1):
            q = q * s + c[i] * _falling(i, l)
        total += math.comb(deriv, j) * u * q
    return total


def _canonical_poly(c, n, w):
    """Exact monomial coefficients of h in s (canonical frame)."""
    u = [Fraction(0)] * (n + 1)
    for j in range(n + 1):
        u[j] = math.comb(n, j) * (-w) ** (n - j)
    return xp.mul(u, list(c))


def _nth_derivative_canonical(c, n, w):
    p = _canonical_poly(c, n, w)
    for _ in range(n):
        p = xp.deriv(p)
    return p


def check_sign_definite(poly):
    """Exact sign classification of h^(n) on the open collar.

    Root counting is a Sturm sequence over the exact rational
    coefficients; the class is definite iff h^(n) has no root in the
    open collar and does not vanish at the inner edge.
    """
    if all(ci == 0 for ci in poly.inner_coeffs):
        return SignClass.IDENTICALLY_ZERO
    n = poly.order_n
    w = xp.as_fraction(poly.collar.width)
    p = poly.nth_derivative_coeffs()
    if not p:
        return SignClass.IDENTICALLY_ZERO
    at_inner = xp.evaluate(p, 0)
    if at_inner == 0:
        return SignClass.INDEFINITE
    if xp.count_roots_open(p, 0, w) > 0:
        return SignClass.INDEFINITE
    # sign of h^(n) at the true inner edge; mirror flips odd derivatives
    sigma = poly._sigma
    inner_sign = at_inner if (sigma == 1 or n % 2 == 0) else -at_inner
    return SignClass.POSITIVE_DEFINITE if inner_sign > 0 else SignClass.NEGATIVE_DEFINITE


def nth_derivative_l1(poly):
    """Integral of |h^(n)| over the collar.

    The collar is split at the isolated sign changes of h^(n); each
    sign-constant piece then integrates exactly through the rational
    antiderivative (a Gauss-Legendre rule of matching order would be
    exact on the piece as well, but carries float cancellation for thin
    collars, see the sign-definite FTC identity).
    """
    p = poly.nth_derivative_coeffs()
    if not p:
        return 0.0
    w = xp.as_fraction(poly.collar.width)
    cuts = [Fraction(0)]
    cuts.extend(xp.real_roots(p, 0, w))
    cuts.append(w)
    P = xp.antiderivative(p)
    total = Fraction(0)
    for lo, hi in zip(cuts, cuts[1:]):
        total += abs(xp.evaluate(P, hi) - xp.evaluate(P, lo))
    return float(total)


def sup_norm(poly):
    """max |h| on the closed collar: endpoints plus critical points of h'."""
    c = poly.inner_coeffs
    n = poly.order_n
    w = xp.as_fraction(poly.collar.width)
    h = _canonical_poly(c, n, w)
    best = max(abs(xp.evaluate(h, 0)), abs(xp.evaluate(h, w)))
    for r in xp.real_roots(xp.deriv(h), 0, w):
        v = abs(xp.evaluate(h, r))
        if v > best:
            best = v
    return float(best)


@dataclass(frozen=True)
class AdmissibleScan:
    found: bool
    m: float | None
    last_sign_class: SignClass
    tested: tuple


def min_admissible_m(n, jet, collar_exponent, schedule=M_DOUBLING_SCHEDULE):
    """Smallest schedule m whose collar [m, m+1/m^d] gives a definite h^(n).

    The schedule is the doubling ladder 2, 4, ..., 2^20; jets whose sign
    pattern admits no definite extension (e.g. n=2 with a_0>0, a_1>0)
    exhaust the schedule and report not-found with the last class seen.
    """
    if not isinstance(jet, BoundaryJet):
        jet = BoundaryJet(tuple(jet))
    if jet.order_n != n:
        raise InvalidInputError(f"jet has order {jet.order_n}, expected {n}")
    if collar_exponent not in (1, 2, 3):
        raise InvalidInputError("collar exponent d must be 1, 2 or 3")
    last = SignClass.INDEFINITE
    tested = []
    for m in schedule:
        collar = Collar(inner_edge=float(m), width=float(m) ** (-collar_exponent))
        poly = collar_polynomial(jet, collar)
        last = check_sign_definite(poly)
        tested.append((float(m), last.value))
        if last.definite or last is SignClass.IDENTICALLY_ZERO:
            return AdmissibleScan(True, float(m), last, tuple(tested))
    return AdmissibleScan(False, None, last, tuple(tested))


@lru_cache(maxsize=4096)
def _float_system(n, w, sigma):
    """Float copy of the triangular system for the fast extension path."""
    M = _system_matrix(n, Fraction(w))
    return tuple(tuple(float(x) for x in row) for row in M)


def solve_float(jet_values, w, n, sigma):
    """Float forward substitution; used in extension evaluation loops."""
    M = _float_system(n, w, sigma)
    out = []
    for i in range(n):
        acc = jet_values[i] if sigma == 1 or i % 2 == 0 else -jet_values[i]
        row = M[i]
        for j in range(i):
            acc -= row[j] * out[j]
        out.append(acc / row[i])
    return out
