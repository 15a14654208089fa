"""Group rings R[G] for finite abelian G over exact and ball coefficient rings.

G is given by invariant factors (d_1 | ... | d_m); elements are exponent
tuples enumerated in a fixed mixed-radix (lexicographic) order that every
other module reuses.  Coefficient rings: "int", "rat", "cyc:e" (exact
cyclotomic), "ball:prec" and "cball:prec" (certified enclosures).  All values
are immutable after construction and all operations are pure.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod

from .ball import Ball, CBall
from .cyclo import CycloField

# dense representations stay comfortable well beyond the exhaustive-test
# sizes (<= 64); the hyperplane identity sweeps need (Z/3)^6 at most
MAX_GROUP_ORDER = 729


class InputError(ValueError):
    """Bad arguments at an operation boundary."""


class AbelianGroup:
    """Finite abelian group as a product of cyclic groups Z/d_i."""

    _cache = {}

    def __new__(cls, invariant_factors):
        key = tuple(int(d) for d in invariant_factors)
        inst = cls._cache.get(key)
        if inst is not None:
            return inst
        if any(d < 2 for d in key):
            raise InputError(f"invariant factors must be >= 2: {key}")
        for a, b in zip(key, key[1:]):
            if b % a != 0:
                raise InputError(f"invariant factors must form a chain: {key}")
        inst = super().__new__(cls)
        inst.invariant_factors = key
        inst.order = prod(key) if key else 1
        if inst.order > MAX_GROUP_ORDER:
            raise InputError(f"group order {inst.order} exceeds desk bound "
                             f"{MAX_GROUP_ORDER}")
        inst.exponent = key[-1] if key else 1
        inst.rank = len(key)
        # fixed global element order: mixed-radix lexicographic
        elements = [()]
        for d in key:
            elements = [e + (a,) for e in elements for a in range(d)]
        # lexicographic in tuple order
        elements.sort()
        inst.elements = elements
        inst.index = {e: i for i, e in enumerate(elements)}
        cls._cache[key] = inst
        return inst

    def op(self, a, b):
        return tuple((x + y) % d for x, y, d in
                     zip(a, b, self.invariant_factors))

    def inv(self, a):
        return tuple((-x) % d for x, d in zip(a, self.invariant_factors))

    def identity(self):
        return (0,) * self.rank

    def element_order(self, a):
        return lcm(*(d // gcd(x, d) for x, d in
                     zip(a, self.invariant_factors))) if self.rank else 1

    def subgroup(self, generators):
        return Subgroup(self, generators)

    def all_characters(self):
        return [Character(self, t) for t in self.elements]

    def trivial_character(self):
        return Character(self, self.identity())

    @lru_cache(maxsize=None)
    def multiplication_table(self):
        n = self.order
        els = self.elements
        idx = self.index
        return [[idx[self.op(els[i], els[j])] for j in range(n)]
                for i in range(n)]

    @lru_cache(maxsize=None)
    def inversion_permutation(self):
        return [self.index[self.inv(e)] for e in self.elements]

    def __repr__(self):
        return f"AbelianGroup{self.invariant_factors}"

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)


class Subgroup:
    """Subgroup stored as an element bitmask over the fixed element order."""

    __slots__ = ("group", "generators", "mask", "size")

    def __init__(self, group, generators):
        self.group = group
        gens = [tuple(g) for g in generators]
        for g in gens:
            if len(g) != group.rank or any(
                    not 0 <= x < d for x, d in zip(g, group.invariant_factors)):
                raise InputError(f"generator {g} out of range for {group}")
        self.generators = gens
        mask = 1 << group.index[group.identity()]
        frontier = [group.identity()]
        seen = {group.identity()}
        while frontier:
            cur = frontier.pop()
            for g in gens:
                nxt = group.op(cur, g)
                if nxt not in seen:
                    seen.add(nxt)
                    mask |= 1 << group.index[nxt]
                    frontier.append(nxt)
        self.mask = mask
        self.size = len(seen)

    @staticmethod
    def from_members(group, members):
        """Trusted constructor from a full member list (skips the closure)."""
        sub = Subgroup.__new__(Subgroup)
        sub.group = group
        sub.generators = [tuple(m) for m in members]
        mask = 0
        for m in members:
            mask |= 1 << group.index[tuple(m)]
        sub.mask = mask
        sub.size = len(members)
        return sub

    def elements(self):
        g = self.group
        return [g.elements[i] for i in range(g.order) if self.mask >> i & 1]

    def contains(self, element):
        return bool(self.mask >> self.group.index[tuple(element)] & 1)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.group is other.group
                and self.mask == other.mask)

    def __hash__(self):
        return hash((id(self.group), self.mask))

    def __repr__(self):
        return f"Subgroup(order={self.size} of {self.group})"


# -- coefficient ring plumbing -------------------------------------------

class Ring:
    """Coefficient ring descriptor with coercion helpers."""

    def __init__(self, tag):
        self.tag = tag
        if tag == "int" or tag == "rat":
            self.param = None
        elif tag.startswith("cyc:"):
            self.param = int(tag.split(":")[1])
        elif tag.startswith("ball:") or tag.startswith("cball:"):
            self.param = int(tag.split(":")[1])
        else:
            raise InputError(f"unknown ring tag {tag!r}")
        self.kind = tag.split(":")[0]

    def zero(self):
        if self.kind == "int":
            return 0
        if self.kind == "rat":
            return Fraction(0)
        if self.kind == "cyc":
            return CycloField(self.param).zero()
        if self.kind == "ball":
            return Ball(0)
        return CBall(0, 0)

    def one(self):
        if self.kind == "int":
            return 1
        if self.kind == "rat":
            return Fraction(1)
        if self.kind == "cyc":
            return CycloField(self.param).one()
        if self.kind == "ball":
            return Ball(1)
        return CBall(1, 0)

    def coerce(self, x):
        if self.kind == "int":
            if isinstance(x, int):
                return x
            if isinstance(x, Fraction) and x.denominator == 1:
                return int(x)
            raise InputError(f"cannot coerce {x!r} into Z")
        if self.kind == "rat":
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise InputError(f"cannot coerce {x!r} into Q")
        if self.kind == "cyc":
            f = CycloField(self.param)
            from .cyclo import CycloElt
            if isinstance(x, CycloElt):
                if x.field.e == self.param:
                    return x
                if x.is_rational():
                    return f.from_rational(x.rational_value())
                raise InputError("mixed cyclotomic fields")
            if isinstance(x, (int, Fraction)):
                return f.from_rational(x)
            raise InputError(f"cannot coerce {x!r} into Q(zeta)")
        if self.kind == "ball":
            if isinstance(x, Ball):
                return x
            if isinstance(x, (int, Fraction)):
                return Ball(x)
            raise InputError(f"cannot coerce {x!r} into a real ball")
        if self.kind == "cball":
            if isinstance(x, CBall):
                return x
            if isinstance(x, Ball):
                return CBall(x, 0)
            if isinstance(x, (int, Fraction)):
                return CBall(x, 0)
            raise InputError(f"cannot coerce {x!r} into a complex ball")

    def is_exact(self):
        return self.kind in ("int", "rat", "cyc")

    def __eq__(self, other):
        return isinstance(other, Ring) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"Ring({self.tag})"


def join_ring(r1, r2):
    """Smallest common coefficient ring for a mixed binary operation."""
    order = {"int": 0, "rat": 1, "cyc": 2, "ball": 3, "cball": 4}
    a, b = (r1, r2) if order[r1.kind] >= order[r2.kind] else (r2, r1)
    if a.kind == b.kind:
        if a.param != b.param:
            if a.kind == "cyc":
                raise InputError("mixed cyclotomic exponents")
            return Ring(f"{a.kind}:{max(a.param, b.param)}")
        return a
    if a.kind in ("ball", "cball") and b.kind == "cyc":
        raise InputError("cyclotomic values must be converted to complex "
                         "balls explicitly")
    return a


class GroupRingElement:
    """Dense element of R[G], immutable by convention."""

    __slots__ = ("group", "ring", "coeffs")

    def __init__(self, group, ring, coeffs):
        self.group = group
        self.ring = ring if isinstance(ring, Ring) else Ring(ring)
        coeffs = [self.ring.coerce(c) for c in coeffs]
        if len(coeffs) != group.order:
            raise InputError("coefficient vector length must equal |G|")
        self.coeffs = coeffs

    # construction helpers
    @staticmethod
    def zero(group, ring="int"):
        r = ring if isinstance(ring, Ring) else Ring(ring)
        return GroupRingElement(group, r, [r.zero()] * group.order)

    @staticmethod
    def one(group, ring="int"):
        r = ring if isinstance(ring, Ring) else Ring(ring)
        c = [r.zero()] * group.order
        c[group.index[group.identity()]] = r.one()
        return GroupRingElement(group, r, c)

    @staticmethod
    def from_element(group, element, ring="int"):
        r = ring if isinstance(ring, Ring) else Ring(ring)
        c = [r.zero()] * group.order
        c[group.index[tuple(element)]] = r.one()
        return GroupRingElement(group, r, c)

    def convert(self, ring):
        ring = ring if isinstance(ring, Ring) else Ring(ring)
        if ring == self.ring:
            return self
        if self.ring.kind == "cyc" and ring.kind == "cball":
            return GroupRingElement(self.group, ring,
                                    [c.to_cball() for c in self.coeffs])
        if self.ring.kind == "cyc" and ring.kind in ("rat", "int"):
            return GroupRingElement(self.group, ring,
                                    [c.rational_value() for c in self.coeffs])
        return GroupRingElement(self.group, ring, self.coeffs)

    def _pair(self, other):
        if isinstance(other, GroupRingElement):
            if other.group is not self.group:
                raise InputError("mixed groups")
            ring = join_ring(self.ring, other.ring)
            return self.convert(ring), other.convert(ring)
        if isinstance(other, (int, Fraction, Ball, CBall)):
            scalar_ring = _scalar_ring(other)
            ring = join_ring(self.ring, scalar_ring)
            me = self.convert(ring)
            c = [ring.zero()] * self.group.order
            c[self.group.index[self.group.identity()]] = ring.coerce(other)
            return me, GroupRingElement(self.group, ring, c)
        raise InputError(f"cannot combine group ring element with {other!r}")

    def __add__(self, other):
        a, b = self._pair(other)
        return GroupRingElement(a.group, a.ring,
                                [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        return GroupRingElement(a.group, a.ring,
                                [x - y for x, y in zip(a.coeffs, b.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GroupRingElement(self.group, self.ring,
                                [-x for x in self.coeffs])

    def scale(self, scalar):
        ring = join_ring(self.ring, _scalar_ring(scalar))
        me = self.convert(ring)
        s = ring.coerce(scalar)
        return GroupRingElement(me.group, ring, [s * c for c in me.coeffs])

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        a, b = self._pair(other)
        table = self.group.multiplication_table()
        n = self.group.order
        out = [a.ring.zero()] * n
        for i, ca in enumerate(a.coeffs):
            if _is_zero_fast(ca):
                continue
            row = table[i]
            for j, cb in enumerate(b.coeffs):
                if _is_zero_fast(cb):
                    continue
                k = row[j]
                out[k] = out[k] + ca * cb
        return GroupRingElement(a.group, a.ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise InputError("only nonnegative integer powers")
        out = GroupRingElement.one(self.group, self.ring)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def involution(self):
        """The # map: coefficient of sigma moves to sigma^{-1}."""
        perm = self.group.inversion_permutation()
        out = [None] * self.group.order
        for i, c in enumerate(self.coeffs):
            out[perm[i]] = c
        return GroupRingElement(self.group, self.ring, out)

    def aug(self):
        """Augmentation: sum of coefficients."""
        total = self.ring.zero()
        for c in self.coeffs:
            total = total + c
        return total

    def coefficient(self, element):
        return self.coeffs[self.group.index[tuple(element)]]

    def act_on_index(self, i):
        """Indices and coefficients of self * (basis element i)."""
        table = self.group.multiplication_table()
        return [(table[j][i], c) for j, c in enumerate(self.coeffs)]

    def is_zero(self):
        return all(_is_zero_exact(c) for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            try:
                a, b = self._pair(other)
            except InputError:
                return NotImplemented
            return a == b
        if not self.ring.is_exact() or not other.ring.is_exact():
            raise InputError("ball elements have no decidable equality; "
                             "use certified predicates")
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if not self.ring.is_exact():
            raise TypeError("ball elements are unhashable")
        return hash((id(self.group), self.ring.tag,
                     tuple(repr(c) for c in self.coeffs)))

    def int_vector(self):
        """Exact integer coefficient vector (raises if not integral)."""
        out = []
        for c in self.coeffs:
            if isinstance(c, int):
                out.append(c)
            elif isinstance(c, Fraction) and c.denominator == 1:
                out.append(int(c))
            else:
                from .cyclo import CycloElt
                if isinstance(c, CycloElt) and c.is_rational() \
                        and c.rational_value().denominator == 1:
                    out.append(int(c.rational_value()))
                else:
                    raise InputError(f"non-integral coefficient {c!r}")
        return out

    def certified_int_vector(self):
        """Recognize a ball element as the unique nearby integer vector.

        Follows the 1/4 rule coefficientwise; raises Undecided when any
        coefficient fails to certify.
        """
        if self.ring.is_exact():
            return self.int_vector()
        out = []
        for c in self.coeffs:
            if isinstance(c, CBall):
                c = c.real_part_certified()
            out.append(c.unique_integer())
        return out

    def to_json(self):
        def enc(c):
            if isinstance(c, int):
                return c
            if isinstance(c, Fraction):
                return f"{c.numerator}/{c.denominator}"
            if isinstance(c, Ball):
                return c.to_json()
            if isinstance(c, CBall):
                return {"re": c.re.to_json(), "im": c.im.to_json()}
            from .cyclo import CycloElt
            if isinstance(c, CycloElt):
                return [f"{q.numerator}/{q.denominator}" for q in c.vec]
            raise TypeError(type(c))
        return {"group": list(self.group.invariant_factors),
                "ring": self.ring.tag,
                "coeffs": [enc(c) for c in self.coeffs]}

    def __repr__(self):
        terms = []
        for e, c in zip(self.group.elements, self.coeffs):
            if _is_zero_fast(c):
                continue
            terms.append(f"({c})*g{list(e)}")
        return "GR[" + (" + ".join(terms) if terms else "0") + "]"


def element_from_json(obj):
    group = AbelianGroup(tuple(obj["group"]))
    ring = Ring(obj["ring"])

    def dec(c):
        if ring.kind == "int":
            return int(c)
        if ring.kind == "rat":
            return Fraction(c)
        if ring.kind == "cyc":
            return CycloField(ring.param).element([Fraction(q) for q in c])
        if ring.kind == "ball":
            from .ball import ball_from_json
            return ball_from_json(c)
        from .ball import ball_from_json
        return CBall(ball_from_json(c["re"]), ball_from_json(c["im"]))

    return GroupRingElement(group, ring, [dec(c) for c in obj["coeffs"]])


def _scalar_ring(x):
    if isinstance(x, int):
        return Ring("int")
    if isinstance(x, Fraction):
        return Ring("rat")
    if isinstance(x, Ball):
        return Ring("ball:128")
    if isinstance(x, CBall):
        return Ring("cball:128")
    from .cyclo import CycloElt
    if isinstance(x, CycloElt):
        return Ring(f"cyc:{x.field.e}")
    raise InputError(f"unsupported scalar {x!r}")


def _is_zero_fast(c):
    # cheap short-circuit for convolution; never wrong about exact zeros
    if isinstance(c, int):
        return c == 0
    if isinstance(c, Fraction):
        return c == 0
    from .cyclo import CycloElt
    if isinstance(c, CycloElt):
        return c.is_zero()
    if isinstance(c, Ball):
        return c.endpoints() == (0, 0)
    if isinstance(c, CBall):
        return c.re.endpoints() == (0, 0) and c.im.endpoints() == (0, 0)
    return False


def _is_zero_exact(c):
    # for balls, only an exactly-zero enclosure counts
    return _is_zero_fast(c)


class Character:
    """Complex character of G, valued in powers of zeta_e (e = exponent)."""

    __slots__ = ("group", "exponents")

    def __init__(self, group, exponents):
        self.group = group
        t = tuple(exponents)
        if len(t) != group.rank or any(
                not 0 <= x < d for x, d in zip(t, group.invariant_factors)):
            raise InputError(f"character label {t} out of range")
        self.exponents = t

    def value_exponent(self, element):
        """k with chi(element) = zeta_e^k."""
        g = self.group
        e = g.exponent
        total = 0
        for t, a, d in zip(self.exponents, element, g.invariant_factors):
            total += t * a * (e // d)
        return total % e

    def value(self, element):
        """Exact value in Q(zeta_e)."""
        return CycloField(self.group.exponent).zeta_power(
            self.value_exponent(element))

    def value_cball(self, element):
        return CBall.root_of_unity(self.value_exponent(element),
                                   self.group.exponent)

    def is_real(self):
        e = self.group.exponent
        return all(self.value_exponent(el) % e in (0, e // 2 if e % 2 == 0 else 0)
                   for el in self.group.elements)

    def real_value(self, element):
        """Value as a rational, for characters of order <= 2."""
        k = self.value_exponent(element)
        if k == 0:
            return 1
        if 2 * k == self.group.exponent:
            return -1
        raise InputError("character is not quadratic")

    def order(self):
        e = self.group.exponent
        k = gcd(e, *(self.value_exponent(el) for el in self.group.elements))
        return e // k

    def is_trivial(self):
        return all(t == 0 for t in self.exponents)

    def __mul__(self, other):
        if other.group is not self.group:
            raise InputError("mixed groups")
        return Character(self.group, self.group.op(self.exponents,
                                                   other.exponents))

    def inverse(self):
        return Character(self.group, self.group.inv(self.exponents))

    def kernel(self):
        return Subgroup(self.group,
                        [el for el in self.group.elements
                         if self.value_exponent(el) == 0])

    def __eq__(self, other):
        return (isinstance(other, Character) and other.group is self.group
                and other.exponents == self.exponents)

    def __hash__(self):
        return hash((id(self.group), self.exponents))

    def __repr__(self):
        return f"Character{self.exponents}"


# -- named operations -----------------------------------------------------

def norm_element(group, subgroup):
    """Sum of the elements of a subgroup, as an integral group-ring element."""
    if not isinstance(subgroup, Subgroup):
        subgroup = Subgroup(group, subgroup)
    if subgroup.group is not group:
        raise InputError("subgroup belongs to a different group")
    coeffs = [1 if subgroup.mask >> i & 1 else 0 for i in range(group.order)]
    return GroupRingElement(group, "int", coeffs)


def idempotent(chi):
    """e_chi = |G|^{-1} sum_sigma chi(sigma)^{-1} sigma, exactly."""
    g = chi.group
    e = g.exponent
    if e <= 2:
        ring = Ring("rat")
        coeffs = [Fraction(chi.real_value(g.inv(el)), g.order)
                  for el in g.elements]
        return GroupRingElement(g, ring, coeffs)
    field = CycloField(e)
    inv_order = Fraction(1, g.order)
    coeffs = [field.zeta_power(-chi.value_exponent(el)) * inv_order
              for el in g.elements]
    return GroupRingElement(g, f"cyc:{e}", coeffs)


def involution(x):
    return x.involution()


def aug_ideal_power(group, c):
    """The lattice of I_G^c inside Z^{|G|} (delegates to the ideal module)."""
    from .zideal import augmentation_ideal_power
    return augmentation_ideal_power(group, c)


def affine_inner_products(q):
    """<psi, Ind(chi)> for the affine group of F_q acting on its order-q
    normal subgroup: rows indexed by characters chi of the subgroup
    ("trivial" or "nontrivial"), columns by psi (("lin", j) or "nl").

    For q = 2 the table degenerates to the identity on two linear characters.
    """
    if q == 2:
        return {("trivial", ("lin", 0)): 1, ("trivial", "nl"): 0,
                ("nontrivial", ("lin", 0)): 0, ("nontrivial", "nl"): 1}
    table = {}
    for j in range(q - 1):
        table[("trivial", ("lin", j))] = 1 if j == 0 else 0
        table[("nontrivial", ("lin", j))] = 0
    table[("trivial", "nl")] = 0
    table[("nontrivial", "nl")] = 1
    return table


def affine_projection(q, psi_values, group=None, prec=None):
    """Project central character data of the affine group of F_q onto C[G]
    for the order-q translation subgroup G.

    `psi_values` maps the q-1 linear characters ("lin", j), j = 0..q-2, and
    the degree q-1 character "nl" to scalars (rationals or balls).  For q = 2
    the two keys are ("lin", 0) and "nl", matching the two linear characters.
    The output is a*e_1 + b*(1 - e_1) with a the value at the trivial linear
    character and b the value at "nl".
    """
    from sympy import factorint
    fac = factorint(q)
    if len(fac) != 1:
        raise InputError(f"{q} is not a prime power")
    p, k = next(iter(fac.items()))
    expected = {("lin", j) for j in range(q - 1)} | {"nl"}
    if q == 2:
        expected = {("lin", 0), "nl"}
    if set(psi_values.keys()) != expected:
        raise InputError(f"psi_values keys {sorted(map(str, psi_values))} "
                         f"do not match the character index set")
    if group is None:
        group = AbelianGroup((p,) * k)
    if group.order != q:
        raise InputError("group order must be q")
    a = psi_values[("lin", 0)]
    b = psi_values["nl"]
    # a*e_1 + b*(1 - e_1) where e_1 = N_G / |G|
    n_g = norm_element(group, Subgroup(group, group.elements))
    one = GroupRingElement.one(group, "rat")
    e1 = n_g.scale(Fraction(1, group.order))
    return e1.scale(a) + (one - e1).scale(b)
