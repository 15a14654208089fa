"""Exact arithmetic of Q and quadratic fields: class groups via binary
quadratic forms, fundamental units via continued fractions, prime splitting,
S-unit lattices with their Galois action, and (S, T)-ray class modules.

Everything feeding an exact check is computed in rational arithmetic; only
logarithms and real embeddings produce balls.  Absolute values are
normalized so the product formula holds exactly: complex places squared,
finite places |x|_w = (Nw)^(-ord_w x).
"""

import itertools
from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint, sqrt_mod

from . import hnf
from .ball import Ball, ball_log, ball_log_int, ball_sqrt
from .finite import GF, GroupStructure
from .grpring import AbelianGroup, InputError
from .sublat import CapacityError

MAX_ABS_DISC = 10 ** 6


class DatumError(ValueError):
    """A scenario datum violates one of the standing hypotheses."""


def kronecker(a, n):
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    result = sign
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def squarefree_part(n):
    """The squarefree kernel s of n = s * t^2 (keeps the sign)."""
    if n == 0:
        return 0
    s = 1 if n > 0 else -1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            s *= p
    return s


def fundamental_discriminant(d):
    """Fundamental discriminant of Q(sqrt(d))."""
    m = squarefree_part(d)
    if m == 1:
        raise InputError(f"{d} is a square; not a quadratic field")
    return m if m % 4 == 1 else 4 * m


def is_fundamental_discriminant(D):
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return D == squarefree_part(D)
    if D % 4 == 0:
        m = D // 4
        return m == squarefree_part(m) and m % 4 in (2, 3)
    return False


class QuadField:
    """Q(sqrt(m)) for squarefree m, with fundamental discriminant D."""

    _cache = {}

    def __new__(cls, D):
        D = int(D)
        inst = cls._cache.get(D)
        if inst is not None:
            return inst
        if not is_fundamental_discriminant(D):
            raise InputError(f"{D} is not a fundamental discriminant")
        if abs(D) > MAX_ABS_DISC:
            raise CapacityError(f"|D| = {abs(D)} exceeds the desk bound")
        inst = super().__new__(cls)
        inst.D = D
        inst.m = D if D % 4 == 1 else D // 4
        inst.is_real = D > 0
        cls._cache[D] = inst
        return inst

    def element(self, a, b=0):
        return QuadElt(self, Fraction(a), Fraction(b))

    def omega(self):
        """Standard integral generator: (1+sqrt m)/2 for m = 1 (4), else sqrt m."""
        if self.m % 4 == 1:
            return QuadElt(self, Fraction(1, 2), Fraction(1, 2))
        return QuadElt(self, Fraction(0), Fraction(1))

    def sqrt_m(self):
        return QuadElt(self, Fraction(0), Fraction(1))

    def sqrt_disc(self):
        """sqrt(D) as an element (= sqrt m or 2 sqrt m)."""
        k = 1 if self.D % 4 == 1 else 2
        return QuadElt(self, Fraction(0), Fraction(k))

    def torsion_generator(self):
        """(generator of roots of unity, order)."""
        if self.D == -4:
            return QuadElt(self, Fraction(0), Fraction(1)), 4
        if self.D == -3:
            return QuadElt(self, Fraction(1, 2), Fraction(1, 2)), 6
        return QuadElt(self, Fraction(-1), Fraction(0)), 2

    def torsion_units(self):
        zeta, w = self.torsion_generator()
        out = [self.element(1)]
        for _ in range(w - 1):
            out.append(out[-1] * zeta)
        return out

    def splitting(self, q):
        """'split' | 'inert' | 'ramified' at the rational prime q."""
        return {1: "split", -1: "inert", 0: "ramified"}[kronecker(self.D, q)]

    def frobenius_sign(self, q):
        """chi_D(q) in {1, -1, 0}."""
        return kronecker(self.D, q)

    def ramified_primes(self):
        return sorted(factorint(abs(self.D)))

    def degree(self):
        return 2

    def __repr__(self):
        return f"QuadField({self.D})"


class QuadElt:
    """a + b*sqrt(m) with rational a, b."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other):
        if isinstance(other, QuadElt):
            if other.field is not self.field:
                raise InputError("mixed quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElt(self.field, Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return QuadElt(self.field, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return QuadElt(self.field, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QuadElt(self.field, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        m = self.field.m
        return QuadElt(self.field,
                       self.a * o.a + m * self.b * o.b,
                       self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conj(self):
        return QuadElt(self.field, self.a, -self.b)

    def norm(self):
        return self.a * self.a - self.field.m * self.b * self.b

    def trace(self):
        return 2 * self.a

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero element")
        return QuadElt(self.field, self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElt(self.field, Fraction(1), Fraction(0))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((id(self.field), self.a, self.b))

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def is_integral(self):
        return self.trace().denominator == 1 and self.norm().denominator == 1

    def is_rational(self):
        return self.b == 0

    def omega_coords(self):
        """(u, v) with self = u + v*omega."""
        w = self.field.omega()
        v = self.b / w.b
        u = self.a - v * w.a
        return u, v

    def embedding_ball(self, conjugate=False):
        if not self.field.is_real:
            raise InputError("complex field: use norm-based absolute values")
        s = ball_sqrt(Ball(self.field.m))
        b = -self.b if conjugate else self.b
        return Ball(self.a) + Ball(b) * s

    def compare_zero(self, conjugate=False):
        """Exact sign of the real embedding."""
        a, b = self.a, (-self.b if conjugate else self.b)
        m = self.field.m
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        lhs, rhs = a * a, m * b * b
        if a > 0:
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def abs_greater_one(self):
        """Exact |self| > 1 at the distinguished real embedding."""
        s = self.compare_zero()
        if s == 0:
            return False
        x = self if s > 0 else -self
        return (x - 1).compare_zero() > 0

    def __repr__(self):
        return f"QuadElt({self.a} + {self.b}*sqrt({self.field.m}))"


# -- fundamental units ------------------------------------------------------

_UNIT_CACHE = {}


def fundamental_unit(D):
    """Fundamental unit (> 1) of the real quadratic field of discriminant D,
    by the continued-fraction expansion of the standard integral generator.
    """
    if D in _UNIT_CACHE:
        return _UNIT_CACHE[D]
    field = QuadField(D)
    if not field.is_real:
        raise InputError("fundamental units require D > 0")
    m = field.m
    P, Q = (1, 2) if m % 4 == 1 else (0, 1)
    sq = isqrt(m)
    a = (P + sq) // Q
    p_prev, p_cur = 1, a
    q_prev, q_cur = 0, 1
    w_conj = field.omega().conj()
    for _ in range(200000):
        cand = QuadElt(field, Fraction(p_cur), 0) - w_conj * q_cur
        if abs(cand.norm()) == 1:
            if cand.compare_zero() < 0:
                cand = -cand
            if not cand.abs_greater_one():
                cand = cand.inverse()
                if cand.compare_zero() < 0:
                    cand = -cand
            assert abs(cand.norm()) == 1 and cand.is_integral()
            _UNIT_CACHE[D] = cand
            return cand
        P = a * Q - P
        Q = (m - P * P) // Q
        a = (P + sq) // Q
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    raise CapacityError(f"continued fraction cap exceeded for D={D}")


def unit_norm(D):
    return int(fundamental_unit(D).norm())


def fundamental_unit_log(D):
    """Certified enclosure of log(fundamental unit)."""
    return ball_log(fundamental_unit(D).embedding_ball())


# -- binary quadratic forms (D < 0) ----------------------------------------

def principal_form(D):
    k = abs(D) % 2
    return (1, k, (k * k - D) // 4)


def _is_reduced_neg(a, b, c):
    return (abs(b) <= a <= c) and (b >= 0 or (abs(b) != a and a != c))


def reduce_form_neg(form, with_transform=False):
    """Reduce a positive definite form; optionally track M with Q o M reduced.

    Convention: (Q o M)(x, y) = Q(p x + q y, r x + s y) for M = [[p,q],[r,s]].
    """
    a, b, c = form
    assert a > 0 and b * b - 4 * a * c < 0
    M = [[1, 0], [0, 1]]
    while not _is_reduced_neg(a, b, c):
        if c < a or (c == a and b < 0):
            # swap: (x, y) -> (-y, x)
            a, b, c = c, -b, a
            M = hnf.mat_mul(M, [[0, 1], [-1, 0]])
            continue
        # translate: b -> b + 2 a k into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            b2 = b + 2 * a * k
            c2 = c + k * (b + a * k)
            b, c = b2, c2
            M = hnf.mat_mul(M, [[1, k], [0, 1]])
            continue
        if b == -a:
            b = a
            M = hnf.mat_mul(M, [[1, 1], [0, 1]])
            continue
        break
    return ((a, b, c), M) if with_transform else (a, b, c)


def apply_transform(form, M):
    a, b, c = form
    p, q, r, s = M[0][0], M[0][1], M[1][0], M[1][1]
    A = a * p * p + b * p * r + c * r * r
    B = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s
    C = a * q * q + b * q * s + c * s * s
    return (A, B, C)


def reduced_forms(D):
    """All reduced primitive positive definite forms of discriminant D < 0."""
    assert D < 0
    out = []
    for b in range(abs(D) % 2, isqrt(abs(D) // 3) + 1, 2):
        if (b * b - D) % 4:
            continue
        ac = (b * b - D) // 4
        a = max(b, 1)
        while a * a <= ac:
            if ac % a == 0:
                c = ac // a
                if gcd(gcd(a, b), c) == 1:
                    if _is_reduced_neg(a, b, c):
                        out.append((a, b, c))
                    if b and _is_reduced_neg(a, -b, c):
                        out.append((a, -b, c))
            a += 1
    return sorted(set(out))


def _solve_linmod(a, b, m):
    """(u, v): the solutions of a x = b (mod m) are x = u + v k."""
    x, _, g = hnf.xgcd(a, m)
    if b % g != 0:
        raise ArithmeticError("no solution")
    u = (b // g) * x % m
    return u, m // g


def compose_abc(f1, f2, D):
    """Gaussian composition of forms of discriminant D, unreduced."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    g = (b1 + b2) // 2
    h = (b2 - b1) // 2
    w = gcd(gcd(a1, a2), g)
    s = a1 // w
    t = a2 // w
    u = g // w
    mu, nu = _solve_linmod(t * u, h * u + s * c1, s * t)
    lam = _solve_linmod(t * nu, h - t * mu, s)[0]
    k = mu + nu * lam
    l = (k * t - h) // s
    mcoef = (t * u * k - h * u - c1 * s) // (s * t)
    A = s * t
    B = w * u - (k * t + l * s)
    C = k * l - w * mcoef
    assert B * B - 4 * A * C == D, "composition broke the discriminant"
    return (A, B, C)


def compose_forms(f1, f2, D):
    return reduce_form_neg(compose_abc(f1, f2, D))


class ImaginaryClassGroup:
    """Form class group for D < 0 with composition and discrete logs."""

    _cache = {}

    def __new__(cls, D):
        inst = cls._cache.get(D)
        if inst is not None:
            return inst
        inst = super().__new__(cls)
        assert D < 0
        inst.D = D
        inst.forms = reduced_forms(D)
        inst.h = len(inst.forms)
        inst.structure = GroupStructure(
            principal_form(D), lambda f1, f2: compose_forms(f1, f2, D),
            inst.forms)
        assert inst.structure.order == inst.h
        cls._cache[D] = inst
        return inst

    def class_of(self, form):
        return self.structure.dlog(reduce_form_neg(form))


# -- indefinite forms (D > 0): cycles, narrow classes ----------------------

def _is_reduced_indef(form, sq, D):
    # reduced: 0 < b < sqrt(D) and |sqrt(D) - 2|a|| < b, equivalently
    # 4a(a - c) < 0 or (a - c)^2 < D  (using b^2 - 4ac = D)
    a, b, c = form
    if b <= 0 or b > sq:
        return False
    return 4 * a * (a - c) < 0 or (a - c) * (a - c) < D


def rho_step(form, D, sq):
    """One cycle step (c, b', c'); returns (form', t) with transform
    [[0, -1], [1, t]]."""
    a, b, c = form
    ac = abs(c)
    if ac > sq:
        lo, hi = -ac, ac            # b' in (-|c|, |c|]
    else:
        lo, hi = sq - 2 * ac, sq    # b' in (sq - 2|c|, sq]
    # b' = -b + 2 c t
    t = (hi + b) // (2 * c) if c > 0 else -((hi + b) // (2 * (-c)))
    bp = -b + 2 * c * t
    step = 1 if c > 0 else -1
    while bp > hi:
        t -= step
        bp = -b + 2 * c * t
    while bp <= lo:
        t += step
        bp = -b + 2 * c * t
    cp = (bp * bp - D) // (4 * c)
    return (c, bp, cp), t


def reduce_indefinite(form, D, with_transform=False):
    sq = isqrt(D)
    M = [[1, 0], [0, 1]]
    guard = 0
    while not _is_reduced_indef(form, sq, D):
        form, t = rho_step(form, D, sq)
        M = hnf.mat_mul(M, [[0, -1], [1, t]])
        guard += 1
        if guard > 100000:
            raise CapacityError("indefinite reduction cap exceeded")
    return (form, M) if with_transform else form


def form_cycle(form, D, with_transform=False):
    """The rho-cycle of a reduced indefinite form."""
    sq = isqrt(D)
    out = []
    cur = form
    M = [[1, 0], [0, 1]]
    guard = 0
    while True:
        out.append((cur, M) if with_transform else cur)
        cur, t = rho_step(cur, D, sq)
        M = hnf.mat_mul(M, [[0, -1], [1, t]])
        guard += 1
        if guard > 200000:
            raise CapacityError("cycle walk cap exceeded")
        if cur == form:
            return out


def _all_reduced_indefinite(D):
    sq = isqrt(D)
    forms = set()
    for b in range(1, sq + 1):
        if (D - b * b) % 4:
            continue
        prod = (D - b * b) // 4
        if prod <= 0:
            continue
        a = 1
        while a * a <= prod:
            if prod % a == 0:
                for aa in {a, prod // a}:
                    for A in (aa, -aa):
                        C = -(prod // aa) if A > 0 else prod // aa
                        f = (A, b, C)
                        if gcd(gcd(abs(A), b), abs(C)) == 1 \
                                and _is_reduced_indef(f, sq, D):
                            forms.add(f)
            a += 1
    return forms


class RealClassGroup:
    """Wide ideal class group for D > 0 via cycles of indefinite forms."""

    _cache = {}

    def __new__(cls, D):
        inst = cls._cache.get(D)
        if inst is not None:
            return inst
        inst = super().__new__(cls)
        assert D > 0
        inst.D = D
        forms = _all_reduced_indefinite(D)
        cycles = {}
        for f in sorted(forms):
            if f in cycles:
                continue
            cyc = form_cycle(f, D)
            rep = min(cyc)
            for g in cyc:
                cycles[g] = rep
        inst._cycle_rep = cycles
        inst.h_plus = len(set(cycles.values()))
        # wide classes: quotient by the class of the principal-with-norm -1
        # cycle; equivalently identify f ~ -f composed when N(eps) = +1
        inst.eps_norm = unit_norm(D)
        reps = sorted(set(cycles.values()))
        if inst.eps_norm == -1:
            inst.h = inst.h_plus
            wide = {r: r for r in reps}
        else:
            # identify each cycle with its twist by the form of norm -1
            # direction: compose with (-1, b0, c0)-type form of disc D
            twist = _norm_minus_one_form(D)
            wide = {}
            for r in reps:
                t = inst._cycle_rep[reduce_indefinite(
                    compose_abc(r, twist, D), D)]
                wide[r] = min(r, t)
            inst.h = len(set(wide.values()))
        inst._wide_rep = wide
        op = lambda f1, f2: wide[
            inst._cycle_rep[reduce_indefinite(compose_abc(f1, f2, D), D)]]
        ident = wide[inst._cycle_rep[reduce_indefinite(principal_form(D), D)]]
        inst.structure = GroupStructure(ident, op,
                                        sorted(set(wide.values())))
        assert inst.structure.order == inst.h, (inst.h, inst.structure.order)
        cls._cache[D] = inst
        return inst

    def class_of(self, form):
        red = reduce_indefinite(form, self.D)
        return self.structure.dlog(self._wide_rep[self._cycle_rep[red]])


def _norm_minus_one_form(D):
    """A form representing -1 (the twist identifying narrow and wide)."""
    # (-1, b, c) has discriminant b^2 + 4c = D
    b = D % 2
    return (-1, b, (D - b * b) // 4)


def class_number(D):
    """Wide class number of the quadratic field of discriminant D."""
    if D < 0:
        return len(reduced_forms(D))
    return RealClassGroup(D).h


def narrow_class_number(D):
    assert D > 0
    return RealClassGroup(D).h_plus


def class_group_structure(D):
    return ImaginaryClassGroup(D) if D < 0 else RealClassGroup(D)


# -- quadratic ideals --------------------------------------------------------

class QuadIdeal:
    """Fractional ideal scale * (a Z + ((b + sqrt D)/2) Z), normalized."""

    __slots__ = ("field", "a", "b", "scale")

    def __init__(self, field, a, b, scale=Fraction(1)):
        assert a > 0
        b %= 2 * a
        if b > a:
            b -= 2 * a
        if (b * b - field.D) % (4 * a) != 0:
            raise InputError(f"({a}, {b}) is not an ideal of disc {field.D}")
        self.field = field
        self.a = a
        self.b = b
        self.scale = Fraction(scale)

    @staticmethod
    def unit_ideal(field):
        return QuadIdeal(field, 1, field.D % 2)

    @staticmethod
    def prime_over(field, q):
        """Distinguished prime over a split/ramified q (InputError if inert).

        Split q: the root b is the smallest valid positive representative;
        the conjugate ideal is the other place.
        """
        D = field.D
        kind = field.splitting(q)
        if kind == "inert":
            raise InputError(f"{q} is inert in {field}")
        for b in range(0, 2 * q):
            if (b * b - D) % (4 * q) == 0:
                return QuadIdeal(field, q, b)
        raise AssertionError(f"no ideal form over {q} for D={D}")

    def norm(self):
        return self.a * self.scale * self.scale

    def conj(self):
        return QuadIdeal(self.field, self.a, -self.b, self.scale)

    def as_form(self):
        return (self.a, self.b, (self.b * self.b - self.field.D)
                // (4 * self.a))

    def multiply(self, other):
        assert other.field is self.field
        a1, b1 = self.a, self.b
        a2, b2 = other.a, other.b
        w = gcd(gcd(a1, a2), (b1 + b2) // 2)
        A, B, _ = compose_abc(self.as_form(), other.as_form(), self.field.D)
        return QuadIdeal(self.field, A, B, self.scale * other.scale * w)

    def generators(self):
        """The two Z-generators as field elements (including the scale)."""
        f = self.field
        half = Fraction(1, 2)
        g2 = (f.element(self.b) + f.sqrt_disc()) * half
        s = f.element(self.scale)
        return f.element(self.a) * s, g2 * s

    def principal_generator(self):
        """gamma with (gamma) = self, or None when the class is nontrivial.

        Found by reducing the associated form with a tracked transform; the
        result has |N(gamma)| = N(ideal).
        """
        f = self.field
        form = self.as_form()
        if f.D < 0:
            red, M = reduce_form_neg(form, with_transform=True)
            if red != principal_form(f.D):
                return None
            return self._element_from_xy(M[0][0], M[1][0])
        red, M = reduce_indefinite(form, f.D, with_transform=True)
        for g, M2 in form_cycle(red, f.D, with_transform=True):
            if abs(g[0]) == 1:
                Mt = hnf.mat_mul(M, M2)
                return self._element_from_xy(Mt[0][0], Mt[1][0])
        return None

    def _element_from_xy(self, x, y):
        f = self.field
        half = Fraction(1, 2)
        gamma = f.element(self.a) * x + (f.element(self.b)
                                         + f.sqrt_disc()) * half * y
        gamma = gamma * f.element(self.scale)
        assert abs(gamma.norm()) == self.norm(), "generator norm mismatch"
        return gamma

    def contains(self, x):
        g1, g2 = self.generators()
        sol = hnf.rational_solve([[g1.a, g1.b], [g2.a, g2.b]], [x.a, x.b])
        return sol is not None and all(s.denominator == 1 for s in sol)

    def __eq__(self, other):
        return (isinstance(other, QuadIdeal) and other.field is self.field
                and (self.a, self.b, self.scale)
                == (other.a, other.b, other.scale))

    def __hash__(self):
        return hash((id(self.field), self.a, self.b, self.scale))

    def __repr__(self):
        return f"QuadIdeal({self.scale} * ({self.a}, ({self.b}+sqrt{self.field.D})/2))"


def ideal_power(ideal, k):
    out = QuadIdeal.unit_ideal(ideal.field)
    base = ideal
    if k < 0:
        # inverse via conjugate / norm
        base = ideal.conj()
        base = QuadIdeal(base.field, base.a, base.b,
                         base.scale / (ideal.a * ideal.scale * ideal.scale))
        k = -k
    while k:
        if k & 1:
            out = out.multiply(base)
        base = base.multiply(base)
        k >>= 1
    return out


# -- places and valuations ---------------------------------------------------

class Place:
    """A place of Q or a quadratic field.

    kind: 'real' (with conjugate flag), 'complex', or 'finite'.
    Finite places carry q, e, f, and for split primes the associated prime
    ideal and a Hensel-liftable root of m mod q identifying the embedding.
    """

    __slots__ = ("field", "kind", "q", "e", "f", "conjugate", "ideal",
                 "root_mod_q", "label")

    def __init__(self, field, kind, q=None, e=1, f=1, conjugate=False,
                 ideal=None, root_mod_q=None, label=""):
        self.field = field
        self.kind = kind
        self.q = q
        self.e = e
        self.f = f
        self.conjugate = conjugate
        self.ideal = ideal
        self.root_mod_q = root_mod_q
        self.label = label

    def nw(self):
        assert self.kind == "finite"
        return self.q ** self.f

    def __repr__(self):
        return f"Place({self.label})"


def places_over(field, v):
    """The places of `field` over the rational place v ('inf' or a prime).

    Returns the distinguished place first.
    """
    if field == "Q":
        if v == "inf":
            return [Place("Q", "real", label="inf")]
        return [Place("Q", "finite", q=v, e=1, f=1, label=f"{v}")]
    if v == "inf":
        if field.is_real:
            return [Place(field, "real", conjugate=False, label="inf+"),
                    Place(field, "real", conjugate=True, label="inf-")]
        return [Place(field, "complex", label="inf")]
    kind = field.splitting(v)
    if kind == "inert":
        ideal = QuadIdeal(field, 1, field.D % 2, scale=v)  # (v) itself
        return [Place(field, "finite", q=v, e=1, f=2, ideal=ideal,
                      label=f"{v}")]
    if kind == "ramified":
        ideal = QuadIdeal.prime_over(field, v)
        return [Place(field, "finite", q=v, e=2, f=1, ideal=ideal,
                      label=f"{v}")]
    ideal = QuadIdeal.prime_over(field, v)
    r1 = _root_for_ideal(field, ideal)
    r2 = (-r1) % (4 if v == 2 else v)
    return [Place(field, "finite", q=v, e=1, f=1, ideal=ideal,
                  root_mod_q=r1, label=f"{v}+"),
            Place(field, "finite", q=v, e=1, f=1, ideal=ideal.conj(),
                  root_mod_q=r2, label=f"{v}-")]


def _root_for_ideal(field, ideal):
    """Root class r of m with sqrt(m) = r at the place of `ideal`.

    The ideal (q, (b + sqrt D)/2) vanishes exactly at the embedding with
    sqrt(D) = -b; for odd q the root is -b/k mod q (sqrt D = k sqrt m), and
    for split q = 2 the two 2-adic roots are separated by their class mod 4.
    """
    q = ideal.a
    k = 1 if field.D % 4 == 1 else 2
    if q == 2:
        # split 2 requires D = m = 1 mod 8; sqrt(D) = -b mod 4 marks the place
        return (-ideal.b) % 4
    kinv = pow(k, -1, q)
    return (-ideal.b * kinv) % q


def _lift_sqrt(m, q, r, precision):
    """(R, q^precision) with R^2 = m mod q^precision and R in the embedding
    class r: r is a root mod q for odd q, a residue mod 4 for q = 2."""
    if q != 2:
        R = r % q
        assert (R * R - m) % q == 0
        qk = q
        while qk < q ** precision:
            qk = qk * qk
            R = (R + m * pow(R, -1, qk)) * pow(2, -1, qk) % qk
        return R % (q ** precision), q ** precision
    # q = 2: m = 1 mod 8; each doubling has a unique lift, and the increments
    # (multiples of 4) preserve the class mod 4 that identifies the place
    assert m % 8 == 1 and r % 2 == 1
    R = r % 4
    mod = 8
    target = 2 ** max(precision, 3)
    while mod < target:
        if (R * R - m) % (2 * mod) != 0:
            R += mod // 2
        mod *= 2
    return R % target, target


def ord_at_place(x, place):
    """Normalized valuation ord_w(x) for x in the place's field."""
    assert place.kind == "finite"
    q = place.q
    if place.field == "Q":
        return _vq_fraction(Fraction(x), q)
    f = place.field
    n = x.norm()
    if n == 0:
        raise InputError("valuation of zero")
    if place.f == 2:  # inert
        t = _vq_fraction(n, q)
        assert t % 2 == 0
        return t // 2
    if place.e == 2:  # ramified
        return _vq_fraction(n, q)
    # split: Hensel root evaluation on an integral rescaling
    den = x.a.denominator * x.b.denominator
    y = x * den
    t = _vq_fraction(y.norm(), q)
    R, mod = _lift_sqrt(f.m, q, place.root_mod_q, t + 3)
    A, B = int(y.a), int(y.b)
    val = _vq_int((A + B * R) % mod, q, cap=t + 2)
    assert val <= t, "split valuation exceeded the norm valuation"
    return val - _vq_int(den, q, cap=10 ** 9)


def _vq_fraction(x, q):
    x = Fraction(x)
    if x == 0:
        raise InputError("valuation of zero")
    return _vq_int(x.numerator, q, cap=10 ** 9) - _vq_int(x.denominator, q,
                                                          cap=10 ** 9)


def _vq_int(n, q, cap):
    n = abs(n)
    if n == 0:
        return cap
    v = 0
    while n % q == 0 and v < cap:
        n //= q
        v += 1
    return v


def log_abs_at_place(x, place):
    """Certified log|x|_w under the product-formula normalization."""
    if place.kind == "real":
        if place.field == "Q":
            v = Fraction(x)
            if v == 0:
                raise InputError("log of zero")
            return ball_log(abs(Ball(v)))
        e = x.embedding_ball(conjugate=place.conjugate)
        return ball_log(abs(e))
    if place.kind == "complex":
        # |x|_w = |x|_C^2 = N(x) for imaginary quadratic
        n = x.norm()
        return ball_log(Ball(n))
    o = ord_at_place(x, place)
    if o == 0:
        return Ball(0)
    return ball_log_int(place.nw()) * (-o)


# -- residue systems at T ----------------------------------------------------

class ResidueSystem:
    """The product of residue fields k(w)^x over the places w above T.

    Provides exact reduction of integral elements (or rationals with
    T-coprime denominators), the Galois action on residue tuples, and the
    multiplicative group structure.
    """

    def __init__(self, field, T):
        self.field = field
        self.T = sorted(T)
        self.components = []  # (place, GF, omega_image or None)
        for q in self.T:
            if field == "Q":
                self.components.append((places_over("Q", q)[0], GF(q), None))
                continue
            kind = field.splitting(q)
            if kind == "ramified":
                raise DatumError(f"T contains the ramified prime {q}")
            for w in places_over(field, q):
                gf = GF(q, w.f)
                self.components.append((w, gf, _omega_image(field, w, gf)))
        self.size = 1
        for _, gf, _img in self.components:
            self.size *= gf.q - 1
        # group structure of the product of k(w)^x
        gens = []
        for i, (_, gf, _img) in enumerate(self.components):
            g = gf.multiplicative_generator()
            gens.append(tuple(g if j == i else self.components[j][1].one()
                              for j in range(len(self.components))))
        ident = tuple(gf.one() for _, gf, _ in self.components)

        def op(t1, t2):
            return tuple(self.components[j][1].mul(a, b)
                         for j, (a, b) in enumerate(zip(t1, t2)))

        self.op = op
        self.structure = GroupStructure(ident, op, gens)
        assert self.structure.order == self.size

    def reduce(self, x):
        """Residue tuple of x (unit at every T-place)."""
        out = []
        for w, gf, img in self.components:
            out.append(self._reduce_at(x, w, gf, img))
        return tuple(out)

    def _reduce_at(self, x, w, gf, img):
        if self.field == "Q":
            v = Fraction(x)
            num = v.numerator % w.q
            den = v.denominator % w.q
            if den == 0 or num == 0:
                raise DatumError(f"{x} is not a unit at {w.q}")
            r = num * pow(den, -1, w.q) % w.q
            return gf.element(r)
        u, v = x.omega_coords()
        qq = w.q
        du, dv = u.denominator, v.denominator
        if du % qq == 0 or dv % qq == 0:
            raise DatumError(f"element has a pole at {qq}")
        uu = gf.element(u.numerator * pow(du, -1, qq) % qq)
        vv = gf.element(v.numerator * pow(dv, -1, qq) % qq)
        out = gf.add(uu, gf.mul(vv, img))
        if out == gf.zero():
            raise DatumError(f"element is not a unit at the place {w}")
        return out

    def galois_act(self, tup):
        """Action of the nontrivial automorphism on a residue tuple."""
        assert self.field != "Q"
        out = list(tup)
        i = 0
        comps = self.components
        while i < len(comps):
            w, gf, _ = comps[i]
            if w.f == 2:
                out[i] = gf.frobenius(tup[i])
                i += 1
            else:
                # split pair occupies consecutive slots: swap
                out[i], out[i + 1] = tup[i + 1], tup[i]
                i += 2
        return tuple(out)

    def dlog(self, tup):
        return list(self.structure.dlog(tup))


def _omega_image(field, w, gf):
    """Image of the integral generator omega in the residue field at w."""
    q = w.q
    m = field.m
    if w.f == 2:
        # inert: root of the minimal polynomial of omega in GF(q^2)
        if m % 4 == 1:
            # x^2 - x + (1 - m)/4
            c0 = ((1 - m) // 4) % q
            for cand in gf.all_elements():
                if gf.add(gf.mul(cand, cand),
                          gf.add(gf.neg(cand), gf.element(c0))) == gf.zero():
                    return cand
            raise AssertionError("no root of the omega polynomial")
        r = gf.sqrt(gf.element(m % q))
        assert r is not None
        return r
    # split place: omega maps into GF(q) via the place's root of m
    if q == 2:
        R, _ = _lift_sqrt(m, 2, w.root_mod_q, 4)
        # omega = (1 + sqrt m)/2: image = ((1 + R)/2) mod 2
        return gf.element(((1 + R) // 2) % 2)
    r = w.root_mod_q
    if m % 4 == 1:
        return gf.element((1 + r) * pow(2, -1, q) % q)
    return gf.element(r % q)


# -- S-unit lattices ---------------------------------------------------------

class SUnitLattice:
    """Exact S-unit lattice of Q or a quadratic field, modulo torsion.

    gens: multiplicative basis (exact field elements); places: every place
    of the field above S, distinguished place first per rational place;
    sigma_matrix: action of the nontrivial automorphism in basis coordinates
    (identity for Q); t_sublattice: coordinates of the T-congruence subgroup;
    torsion_order, torsion_gen: the roots of unity (killed in the lattice).
    The construction is exactly saturated: saturation_index == 1.
    """

    __slots__ = ("field", "S", "T", "places", "gens", "sigma_matrix",
                 "torsion_gen", "torsion_order", "t_sublattice",
                 "residues", "saturation_index", "place_action")

    def __init__(self, **kw):
        for k in self.__slots__:
            setattr(self, k, kw[k])

    @property
    def rank(self):
        return len(self.gens)

    def finite_places(self):
        return [w for w in self.places if w.kind == "finite"]

    def valuation_vector(self, x):
        return [ord_at_place(x, w) for w in self.finite_places()]

    def express(self, x):
        """(coords, torsion_power) with x = torsion^j * prod gens^coords."""
        fin = self.finite_places()
        val = self.valuation_vector(x)
        vmat = [[ord_at_place(g, w) for w in fin] for g in self.gens]
        sol = hnf.solve_in_rowspan(vmat, val)
        if sol is None:
            raise InputError(f"{x} is not an S-unit on this lattice")
        u = x
        for g, c in zip(self.gens, sol):
            u = u * (g ** (-c)) if self.field != "Q" else u * Fraction(g) ** (-c)
        # u is now a unit (all finite valuations zero)
        if self.field == "Q":
            assert u in (Fraction(1), Fraction(-1)), u
            j = 0 if u == 1 else 1
            return sol, j
        field = self.field
        if field.is_real:
            # peel off fundamental-unit factors exactly
            eps_index = self._eps_index()
            eps = self.gens[eps_index]
            k = 0
            guard = 0
            while not u.is_rational() or abs(u.a) != 1:
                if u.abs_greater_one():
                    u = u / eps
                    k += 1
                else:
                    u = u * eps
                    k -= 1
                guard += 1
                if guard > 10000:
                    raise CapacityError("unit expression loop cap")
            sol[eps_index] += k
        # now u is torsion
        tor = self.field.torsion_units()
        assert u in tor, (u, "unit part is not torsion")
        j = tor.index(u)
        return sol, j

    def _eps_index(self):
        for i, g in enumerate(self.gens):
            if all(v == 0 for v in self.valuation_vector(g)):
                return i
        raise AssertionError("no unit among the generators")

    def sigma_of_gen(self, i):
        """Exact image of the i-th generator under the automorphism."""
        assert self.field != "Q"
        return self.gens[i].conj()

    def log_matrix(self, check_rows=True):
        """Rows: generators; columns: places; entries -log|g|_w (balls)."""
        out = []
        for g in self.gens:
            row = [-log_abs_at_place(g, w) for w in self.places]
            if check_rows:
                tot = row[0]
                for e in row[1:]:
                    tot = tot + e
                assert tot.contains_zero(), "product formula violated"
            out.append(row)
        return out

    def t_lattice_hnf(self):
        return self.t_sublattice.canonical()

    def t_index(self):
        full = hnf.IntLattice(self.rank,
                              hnf.identity_matrix(self.rank))
        return self.t_sublattice.index_in(full)


def s_unit_lattice(field, S, T, enforce_h3=True):
    """Construct the (S, T)-unit lattice with exact generators.

    Raises DatumError when (S, T) violates the standing shape: S must
    contain 'inf' and the ramified primes, be disjoint from T, and T must
    make the unit group torsion free (skipped with enforce_h3=False for
    internal constructions that only need the lattice modulo torsion).
    """
    S = _normalize_places(S)
    T = sorted(set(int(q) for q in T))
    if "inf" not in S:
        raise DatumError("S must contain the infinite place")
    if set(S) & set(T):
        raise DatumError("S and T must be disjoint")
    finite_S = [v for v in S if v != "inf"]
    if field != "Q":
        missing = [q for q in field.ramified_primes() if q not in finite_S]
        if missing:
            raise DatumError(f"S omits ramified primes {missing}")
    if enforce_h3:
        _check_torsion_killed(field, T)
    residues = ResidueSystem(field, T) if T else None

    if field == "Q":
        places = [places_over("Q", v)[0] for v in S]
        gens = [Fraction(q) for q in finite_S]
        lat = _t_sublattice_q(gens, residues)
        return SUnitLattice(field="Q", S=S, T=T, places=places, gens=gens,
                            sigma_matrix=hnf.identity_matrix(len(gens)),
                            torsion_gen=Fraction(-1), torsion_order=2,
                            t_sublattice=lat, residues=residues,
                            saturation_index=1,
                            place_action=list(range(len(places))))

    places = []
    place_action = []
    for v in S:
        ws = places_over(field, v)
        base = len(places)
        places.extend(ws)
        if len(ws) == 2:
            place_action.extend([base + 1, base])
        else:
            place_action.append(base)
    fin = [w for w in places if w.kind == "finite"]

    # class-relation lattice over the finite S-places (inert places carry
    # the principal ideal (q), so their class is trivial automatically)
    cg = class_group_structure(field.D)
    k_cl = len(cg.structure.leaders)
    dlogs = [list(cg.class_of(w.ideal.as_form())) for w in fin]
    stacked = dlogs + list(cg.structure.relation_rows)
    ker = hnf.kernel(stacked, ambient_dim=k_cl)
    lam_rows = [row[:len(fin)] for row in ker]
    lam = hnf.IntLattice(len(fin), lam_rows)
    basis_rows = lam.canonical()
    gens = []
    for row in basis_rows:
        gens.append(_generator_for_valuations(field, fin, row))
    if field.is_real:
        gens.append(fundamental_unit(field.D))
    rank_expected = len(places) - 1
    assert len(gens) == rank_expected, (len(gens), rank_expected)
    lat = _t_sublattice(field, gens, residues)
    sl = SUnitLattice(field=field, S=S, T=T, places=places, gens=gens,
                      sigma_matrix=None, torsion_gen=field.torsion_generator()[0],
                      torsion_order=field.torsion_generator()[1],
                      t_sublattice=lat, residues=residues,
                      saturation_index=1, place_action=place_action)
    # exact Galois action on coordinates
    mat = []
    for i in range(len(gens)):
        coords, _tor = sl.express(sl.sigma_of_gen(i))
        mat.append(coords)
    sl.sigma_matrix = mat
    return sl


def _normalize_places(S):
    out = []
    for v in S:
        if v in ("inf", "oo", "infinity"):
            out.append("inf")
        else:
            out.append(int(v))
    # keep 'inf' first, primes sorted after
    fin = sorted(q for q in out if q != "inf")
    return (["inf"] if "inf" in out else []) + fin


def _inert_dlog(cg):
    return [0] * len(cg.structure.leaders)


def _check_torsion_killed(field, T):
    if field == "Q":
        # -1 = 1 (mod q) exactly when q = 2
        if not any(q != 2 for q in T):
            raise DatumError("(H3) fails: -1 = 1 at every place above "
                             f"T={sorted(T)}")
        return
    torsion = [z for z in field.torsion_units() if z != field.element(1)]
    if not T:
        raise DatumError("T empty: torsion units survive")
    for zeta in torsion:
        killed = False
        for q in T:
            if field.splitting(q) == "ramified":
                raise DatumError(f"T contains the ramified prime {q}")
            for w in places_over(field, q):
                if ord_at_place(zeta - field.element(1), w) == 0:
                    killed = True
                    break
            if killed:
                break
        if not killed:
            raise DatumError(
                f"(H3) fails: {zeta!r} = 1 at every place above T={T}")


def _generator_for_valuations(field, fin_places, row):
    """Exact element with ord_w = row[w] at the finite S-places (unit sign).

    The signed prime-power product is principal by construction; negative
    exponents go through the conjugate ideal divided by the rational prime.
    """
    ideal = QuadIdeal.unit_ideal(field)
    denom = Fraction(1)
    for w, e in zip(fin_places, row):
        if e == 0:
            continue
        p = w.ideal
        if e > 0:
            ideal = ideal.multiply(ideal_power(p, e))
        else:
            # p^-1 = conj(p)/N(p)
            ideal = ideal.multiply(ideal_power(p.conj(), -e))
            denom *= Fraction(p.a * p.scale * p.scale) ** (-e)
    gamma = ideal.principal_generator()
    assert gamma is not None, "class-relation product is not principal"
    gamma = gamma / field.element(denom)
    # verify valuations exactly
    for w, e in zip(fin_places, row):
        assert ord_at_place(gamma, w) == e, "generator valuation mismatch"
    return gamma


def _t_sublattice_q(gens, residues):
    n = len(gens)
    if residues is None:
        return hnf.IntLattice(n, hnf.identity_matrix(n))
    dl = [residues.dlog(residues.reduce(g)) for g in gens]
    tor = residues.dlog(residues.reduce(Fraction(-1)))
    k = len(residues.structure.leaders)
    stacked = dl + [tor] + list(residues.structure.relation_rows)
    ker = hnf.kernel(stacked)
    rows = [r[:n] for r in ker]
    return hnf.IntLattice(n, rows)


def _t_sublattice(field, gens, residues):
    n = len(gens)
    if residues is None:
        return hnf.IntLattice(n, hnf.identity_matrix(n))
    dl = [residues.dlog(residues.reduce(g)) for g in gens]
    tor = residues.dlog(residues.reduce(field.torsion_generator()[0]))
    stacked = dl + [tor] + list(residues.structure.relation_rows)
    ker = hnf.kernel(stacked)
    rows = [r[:n] for r in ker]
    return hnf.IntLattice(n, rows)


# -- (S, T)-ray class modules ------------------------------------------------

class RayClassData:
    """Cl_{K,S,T} as a finite module with Galois action, plus bookkeeping."""

    __slots__ = ("field", "S", "T", "module", "h_s", "rt_quotient_order")

    def __init__(self, field, S, T, module, h_s, rt_quotient_order):
        self.field = field
        self.S = S
        self.T = T
        self.module = module
        self.h_s = h_s
        self.rt_quotient_order = rt_quotient_order

    def order(self):
        return self.module.order()

    def p_rank(self, p):
        return sum(1 for d in self.module.orders if d % p == 0)

    def __repr__(self):
        return (f"RayClassData(|Cl|={self.order()}, "
                f"orders={self.module.orders})")


def ray_class(field, S, T):
    """Compute Cl_{K,S,T} as a FiniteGModule over Gal(K/Q) (or over the
    trivial group for K = Q), assembled from the class group, the residue
    system at T, and S-prime killing.  The extension-order identity
    |Cl_{K,S,T}| = |Cl_{K,S}| * |R_T / im(units)| is asserted.
    """
    from .zideal import FiniteGModule
    S = _normalize_places(S)
    T = sorted(set(int(q) for q in T))
    if set(S) & set(T):
        raise DatumError("S and T must be disjoint")
    residues = ResidueSystem(field, T) if T else None
    s_len = len(residues.structure.leaders) if residues else 0

    if field == "Q":
        group = AbelianGroup(())
        rel_rows = []
        if residues:
            rel_rows += [list(r) for r in residues.structure.relation_rows]
            rel_rows.append(residues.dlog(residues.reduce(Fraction(-1))))
            for q in S:
                if q != "inf":
                    rel_rows.append(residues.dlog(residues.reduce(Fraction(q))))
        module = _module_from_relations(group, s_len, rel_rows, [])
        h_s = 1
        q_ord = module.order()
        return RayClassData("Q", S, T, module, h_s, q_ord)

    if "inf" not in S:
        raise DatumError("S must contain the infinite place")
    finite_S = [v for v in S if v != "inf"]
    missing = [q for q in field.ramified_primes() if q not in finite_S]
    if missing:
        raise DatumError(f"S omits ramified primes {missing}")

    group = AbelianGroup((2,))
    cg = class_group_structure(field.D)
    # choose prime-ideal generators of the class group away from S, T, disc
    from sympy import primerange
    chosen = []          # (ideal, dlog row)
    span = GroupStructure(cg.structure.identity, cg.structure.op, [])
    for ell in primerange(2, 5000):
        if span.order == cg.structure.order:
            break
        if ell in finite_S or ell in T or field.D % ell == 0:
            continue
        if field.splitting(ell) != "split":
            continue
        p = QuadIdeal.prime_over(field, ell)
        cls = cg.class_of(p.as_form())
        if span.contains(cg.structure.from_exponents(cls)):
            continue
        chosen.append((p, list(cls)))
        span = GroupStructure(cg.structure.identity, cg.structure.op,
                              [cg.structure.from_exponents(c)
                               for _, c in chosen])
    assert span.order == cg.structure.order, "class group generators missing"
    r = len(chosen)
    ngens = r + s_len

    def rt_dlog(x):
        if residues is None:
            return []
        return residues.dlog(residues.reduce(x))

    def express_in_chosen(target_dlog):
        stacked = [c for _, c in chosen] + list(cg.structure.relation_rows)
        sol = hnf.solve_in_rowspan(stacked, list(target_dlog))
        assert sol is not None, "chosen primes do not generate"
        return sol[:r]

    rel_rows = []
    # class relations among the chosen primes
    lam = hnf.IntLattice(r)
    stacked = [c for _, c in chosen] + list(cg.structure.relation_rows)
    for row in hnf.kernel(stacked, ambient_dim=len(cg.structure.leaders)):
        lam.add_vector(row[:r])
    for v in lam.canonical():
        gamma = _signed_prime_product_generator(field, chosen, v)
        rel_rows.append(list(v) + rt_dlog(gamma))
    # residue-system structure and unit-image relations
    if residues:
        for rr in residues.structure.relation_rows:
            rel_rows.append([0] * r + list(rr))
        sl = s_unit_lattice(field, S, T)
        for u in list(sl.gens) + [field.torsion_generator()[0]]:
            rel_rows.append([0] * r + rt_dlog(u))
    else:
        sl = None
    # kill the classes of the S-primes
    for v_s in finite_S:
        for w in places_over(field, v_s):
            p_w = w.ideal
            if p_w.as_form()[0] == 1 and p_w.scale != 1:
                # inert (q): principal with generator q
                rel_rows.append([0] * r + rt_dlog(field.element(w.q)))
                continue
            v = express_in_chosen(cg.class_of(p_w.as_form()))
            gamma = _signed_prime_product_generator(
                field, chosen, [-c for c in v], extra_ideal=p_w)
            rel_rows.append(list(v) + rt_dlog(gamma))

    # Galois action on the generators
    action_rows = []
    for p, _c in chosen:
        pc = p.conj()
        v = express_in_chosen(cg.class_of(pc.as_form()))
        gamma = _signed_prime_product_generator(
            field, chosen, [-c for c in v], extra_ideal=pc)
        action_rows.append(list(v) + rt_dlog(gamma))
    if residues:
        for t_leader in residues.structure.leaders:
            sig = residues.galois_act(t_leader)
            action_rows.append([0] * r + residues.dlog(sig))

    module = _module_from_relations(group, ngens, rel_rows, [action_rows])
    # order consistency: |Cl_{S,T}| = |Cl_S| * |R_T / im units|
    h_s = _s_class_number(field, cg, finite_S)
    if residues:
        img_rows = [rt_dlog(u) for u in (list(sl.gens)
                                         + [field.torsion_generator()[0]])]
        img_rows += [list(rr) for rr in residues.structure.relation_rows]
        diag, _, _ = hnf.diagonalize_relations(img_rows, ncols=s_len)
        q_ord = 1
        for d in diag:
            assert d != 0
            q_ord *= d
    else:
        q_ord = 1
    assert module.order() == h_s * q_ord, \
        (module.order(), h_s, q_ord, "ray class order mismatch")
    return RayClassData(field, S, T, module, h_s, q_ord)


def _signed_prime_product_generator(field, chosen, v, extra_ideal=None):
    """Exact generator of extra_ideal * prod chosen_i^{v_i} (a principal
    fractional ideal); negative exponents via conjugates over rational norms.
    """
    acc = extra_ideal if extra_ideal is not None \
        else QuadIdeal.unit_ideal(field)
    denom = Fraction(1)
    for (p, _), e in zip(chosen, v):
        if e == 0:
            continue
        if e > 0:
            acc = acc.multiply(ideal_power(p, e))
        else:
            acc = acc.multiply(ideal_power(p.conj(), -e))
            denom *= Fraction(p.a) ** (-e)
    gamma = acc.principal_generator()
    assert gamma is not None, "signed product is not principal"
    return gamma / field.element(denom)


def _s_class_number(field, cg, finite_S):
    gens = []
    for q in finite_S:
        for w in places_over(field, q):
            if not (w.ideal.as_form()[0] == 1 and w.ideal.scale != 1):
                gens.append(cg.structure.from_exponents(
                    cg.class_of(w.ideal.as_form())))
    span = GroupStructure(cg.structure.identity, cg.structure.op, gens)
    return cg.structure.order // span.order


def _module_from_relations(group, ngens, rel_rows, action_rows_list):
    """FiniteGModule from integer relation rows and generator action rows."""
    from .zideal import FiniteGModule
    rel_rows = [list(r) + [0] * (ngens - len(r)) for r in rel_rows]
    diag, V, Vinv = hnf.diagonalize_relations(rel_rows, ncols=ngens)
    assert all(d != 0 for d in diag), "module is not finite"
    keep = [i for i, d in enumerate(diag) if d != 1]
    orders = [diag[i] for i in keep]
    mats = []
    for action_rows in action_rows_list:
        A = [list(r) + [0] * (ngens - len(r)) for r in action_rows]
        Ap = hnf.mat_mul(hnf.mat_mul(Vinv, A), V)
        sub = [[Ap[i][j] % diag[j] if diag[j] else Ap[i][j] for j in keep]
               for i in keep]
        mats.append(sub)
    return FiniteGModule(group, orders, mats)
