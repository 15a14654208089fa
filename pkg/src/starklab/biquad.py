"""Real biquadratic composita assembled from their three quadratic
subfields: exact quartic arithmetic on the basis (1, sqrt m1, sqrt m2,
sqrt m3), compositum places, and an S-unit lattice generated by subfield
S-units with exactly verified multiplicative relations.

Saturation inside the full unit group is not attempted (out of desk scope);
the lattice is the subgroup the subfields generate, which is all the
norm-decomposition identity needs.
"""

import itertools
from fractions import Fraction
from math import gcd, isqrt

from . import hnf
from .ball import Ball, ball_log, ball_log_int, ball_sqrt, working_precision
from .grpring import AbelianGroup, GroupRingElement, InputError
from .numfld import (QuadField, SUnitLattice, ord_at_place, places_over,
                     s_unit_lattice, squarefree_part)
from .zideal import UnsupportedCaseError


def _sqrt_exact(n):
    r = isqrt(n)
    assert r * r == n, f"{n} is not a square"
    return r


class BiquadField:
    """Q(sqrt m1, sqrt m2) with the convention sqrt(m3) = sqrt m1 sqrt m2 / s."""

    _cache = {}

    def __new__(cls, D1, D2):
        key = (D1, D2)
        inst = cls._cache.get(key)
        if inst is not None:
            return inst
        inst = super().__new__(cls)
        k1, k2 = QuadField(D1), QuadField(D2)
        m1, m2 = k1.m, k2.m
        m3 = squarefree_part(m1 * m2)
        if m3 == 1:
            raise InputError("the two discriminants generate the same field")
        from .numfld import fundamental_discriminant
        D3 = fundamental_discriminant(m3)
        k3 = QuadField(D3)
        inst.subfields = [k1, k2, k3]
        inst.ms = [m1, m2, m3]
        inst.discs = [D1, D2, D3]
        inst.is_real = all(m > 0 for m in inst.ms)
        # sqrt(mi) sqrt(mj) = s_ij sqrt(mk)
        inst.s12 = _sqrt_exact(m1 * m2 // m3)
        inst.s13 = _sqrt_exact(m1 * m3 // m2)
        inst.s23 = _sqrt_exact(m2 * m3 // m1)
        inst.group = AbelianGroup((2, 2))
        cls._cache[key] = inst
        return inst

    def element(self, a0=0, a1=0, a2=0, a3=0):
        return BiquadElt(self, Fraction(a0), Fraction(a1), Fraction(a2),
                         Fraction(a3))

    def from_subfield(self, idx, x):
        """Embed a QuadElt of the idx-th subfield."""
        coords = [Fraction(x.a), 0, 0, 0]
        coords[idx + 1] = Fraction(x.b)
        return BiquadElt(self, *coords)

    def signs_of(self, element):
        """The action signs (s1, s2, s3) of the group element (e1, e2)."""
        e1, e2 = element
        s1 = -1 if e1 else 1
        s2 = -1 if e2 else 1
        return (s1, s2, s1 * s2)

    def subgroup_fixing(self, idx):
        """The order-2 subgroup of G acting trivially on the idx-th subfield."""
        els = [el for el in self.group.elements
               if self.signs_of(el)[idx] == 1]
        assert len(els) == 2
        from .grpring import Subgroup
        return Subgroup.from_members(self.group, els)

    def ramified_primes(self):
        out = set()
        for k in self.subfields:
            out |= set(k.ramified_primes())
        return sorted(out)

    def __repr__(self):
        return f"BiquadField(sqrt {self.ms[0]}, sqrt {self.ms[1]})"


class BiquadElt:
    __slots__ = ("field", "c")

    def __init__(self, field, a0, a1, a2, a3):
        self.field = field
        self.c = (Fraction(a0), Fraction(a1), Fraction(a2), Fraction(a3))

    def __add__(self, other):
        return BiquadElt(self.field, *(x + y for x, y in zip(self.c, other.c)))

    def __sub__(self, other):
        return BiquadElt(self.field, *(x - y for x, y in zip(self.c, other.c)))

    def __neg__(self):
        return BiquadElt(self.field, *(-x for x in self.c))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BiquadElt(self.field, *(x * other for x in self.c))
        f = self.field
        a, b = self.c, other.c
        m1, m2, m3 = f.ms
        s12, s13, s23 = f.s12, f.s13, f.s23
        out0 = a[0]*b[0] + m1*a[1]*b[1] + m2*a[2]*b[2] + m3*a[3]*b[3]
        out1 = a[0]*b[1] + a[1]*b[0] + s23*(a[2]*b[3] + a[3]*b[2])
        out2 = a[0]*b[2] + a[2]*b[0] + s13*(a[1]*b[3] + a[3]*b[1])
        out3 = a[0]*b[3] + a[3]*b[0] + s12*(a[1]*b[2] + a[2]*b[1])
        return BiquadElt(f, out0, out1, out2, out3)

    __rmul__ = __mul__

    def galois(self, element):
        s = self.field.signs_of(element)
        return BiquadElt(self.field, self.c[0], s[0]*self.c[1],
                         s[1]*self.c[2], s[2]*self.c[3])

    def inverse(self):
        # multiply by the three conjugates over the rational norm
        f = self.field
        conjs = [self.galois(el) for el in f.group.elements
                 if el != (0, 0)]
        prod = conjs[0] * conjs[1] * conjs[2]
        n = (self * prod).c
        assert n[1] == 0 and n[2] == 0 and n[3] == 0, "norm not rational"
        if n[0] == 0:
            raise ZeroDivisionError
        return prod * (1 / n[0])

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.element(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, BiquadElt) and self.c == other.c \
            and self.field is other.field

    def is_one(self):
        return self.c == (1, 0, 0, 0)

    def is_pm_one(self):
        return self.c in ((1, 0, 0, 0), (-1, 0, 0, 0))

    def embedding_ball(self, signs):
        f = self.field
        out = Ball(self.c[0])
        for i in range(3):
            if self.c[i + 1]:
                out = out + Ball(self.c[i + 1]) * signs[i] \
                    * ball_sqrt(Ball(f.ms[i]))
        return out

    def __repr__(self):
        return f"BiquadElt{self.c}"


class BiquadPlace:
    """A place of the compositum over a rational place."""

    __slots__ = ("field", "kind", "q", "e", "f", "signs", "e_sub", "label")

    def __init__(self, field, kind, q=None, e=1, f=1, signs=None,
                 e_sub=None, label=""):
        self.field = field
        self.kind = kind
        self.q = q
        self.e = e
        self.f = f
        self.signs = signs      # archimedean: (s1, s2, s3)
        self.e_sub = e_sub      # finite: ramification degree over each subfield
        self.label = label

    def nw(self):
        return self.q ** self.f

    def __repr__(self):
        return f"BiquadPlace({self.label})"


def biquad_places(field, v):
    """Places of the compositum over the rational place v.

    Finite places are supported only when there is a single place over v
    (no Galois orbit bookkeeping at split primes of the compositum); the
    spread cases raise UnsupportedCaseError.
    """
    if v == "inf":
        if not field.is_real:
            raise UnsupportedCaseError("complex composita not supported")
        out = []
        for s1, s2 in itertools.product((1, -1), repeat=2):
            out.append(BiquadPlace(field, "real", signs=(s1, s2, s1 * s2),
                                   label=f"inf{'+' if s1>0 else '-'}"
                                         f"{'+' if s2>0 else '-'}"))
        return out
    q = int(v)
    # character-theoretic splitting data: the three quadratic characters
    from .numfld import kronecker
    values = [kronecker(D, q) for D in field.discs]
    n_unram = 1 + sum(1 for vl in values if vl != 0)
    e = 4 // n_unram
    f_ord = 2 if any(vl == -1 for vl in values) else 1
    g = n_unram // f_ord
    if g != 1:
        raise UnsupportedCaseError(
            f"{q} has {g} places in the compositum; only single-place "
            "primes are supported at desk scale")
    e_sub = []
    for idx, k in enumerate(field.subfields):
        e_k = 2 if values[idx] == 0 else 1
        e_sub.append(e // e_k)
    return [BiquadPlace(field, "finite", q=q, e=e, f=f_ord, e_sub=e_sub,
                        label=f"{q}")]


class BiquadSUnitLattice:
    """S-unit sublattice of a real biquadratic compositum generated by the
    three subfields' S-units, with exact relations and Galois action."""

    def __init__(self, field, S, prec=128):
        self.field = field
        self.S = S
        self.prec = prec
        sub_lattices = []
        for k in field.subfields:
            sub_S = ["inf"] + [q for q in S if q != "inf"]
            sub_lattices.append(s_unit_lattice(k, sub_S, [],
                                               enforce_h3=False))
        self.sub_lattices = sub_lattices
        self.places = []
        for v in S:
            self.places.extend(biquad_places(field, v))
        fin = [w for w in self.places if w.kind == "finite"]
        # generator pool: (subfield index, element)
        pool = []
        self.pool_owner = []
        for idx, sl in enumerate(sub_lattices):
            for g in sl.gens:
                pool.append(field.from_subfield(idx, g))
                self.pool_owner.append((idx, g))
        self.pool = pool
        # valuations of pool elements at the compositum places
        val_rows = []
        for (idx, g) in self.pool_owner:
            row = []
            for w in fin:
                sub_places = places_over(field.subfields[idx], w.q)
                assert len(sub_places) == 1, "unsupported split tower"
                o = ord_at_place(g, sub_places[0])
                row.append(o * w.e_sub[idx])
            val_rows.append(row)
        self.val_rows = val_rows
        # relation lattice: kernel vectors whose product is exactly +-1,
        # discovered through unit coordinates and verified exactly
        ker = hnf.kernel(val_rows, ambient_dim=len(fin))
        unit_idx = [i for i, (idx, g) in enumerate(self.pool_owner)
                    if all(v == 0 for v in val_rows[i])]
        eps_idx = unit_idx  # the three fundamental units
        assert len(eps_idx) == 3
        # unit coordinates of each kernel combination, as rationals with
        # denominator dividing 8 (the classical bound on the unit index of
        # the subfield-unit subgroup in a real biquadratic field)
        with working_precision(prec + 64):
            eps_logs = self._unit_log_matrix(eps_idx, prec + 64)
            coord_rows = []
            for c in ker:
                coord_rows.append(self._express_unit_combination(
                    c, eps_idx, eps_logs, prec + 64))
        scaled = [[int(d * 8) for d in row] for row in coord_rows]
        rel_rows = []
        for y in hnf.kernel(scaled, ambient_dim=3):
            row = [0] * len(pool)
            for yj, c in zip(y, ker):
                if yj:
                    for i, ci in enumerate(c):
                        row[i] += yj * ci
            u = self._pool_product(row)
            assert u.is_pm_one(), "relation verification failed"
            rel_rows.append(row)
        diag, V, Vinv = hnf.diagonalize_relations(rel_rows,
                                                  ncols=len(pool))
        assert all(d in (0, 1) for d in diag), diag
        keep = [j for j, d in enumerate(diag) if d == 0]
        self._keep = keep
        self._V = V
        self._basis_pool_rows = [Vinv[j] for j in keep]
        self.rank = len(keep)
        assert self.rank == len(self.places) - 1, \
            (self.rank, len(self.places))
        # basis elements as exact products of the pool
        self.basis_elements = [self._pool_product(row)
                               for row in self._basis_pool_rows]
        self._offsets = []
        off = 0
        for sl in sub_lattices:
            self._offsets.append(off)
            off += len(sl.gens)
        self.saturation_known = False

    def _pool_product(self, exponents):
        out = self.field.element(1)
        for g, e in zip(self.pool, exponents):
            if e:
                out = out * (g ** e)
        return out

    def _unit_log_matrix(self, eps_idx, prec):
        rows = []
        arch = [w for w in self.places if w.kind == "real"][:3]
        for i in eps_idx:
            rows.append([ball_log(abs(self.pool[i].embedding_ball(w.signs)))
                         for w in arch])
        return rows

    def _express_unit_combination(self, c, eps_idx, eps_logs, prec):
        """Rational exponents d (denominator | 8) with
        prod pool^c = +- prod eps^d in log coordinates, certified."""
        u = self._pool_product(c)
        arch = [w for w in self.places if w.kind == "real"][:3]
        logs_u = [ball_log(abs(u.embedding_ball(w.signs))) for w in arch]
        from .ball import gauss_solve
        A = [[eps_logs[i][k] for i in range(3)] for k in range(3)]
        sol = gauss_solve(A, logs_u)
        return [s.unique_rational(8) for s in sol]

    def pool_coords_to_basis(self, coords):
        """Image of a pool-exponent vector in basis coordinates."""
        y = [sum(coords[i] * self._V[i][j] for i in range(len(coords)))
             for j in range(len(self._V))]
        return [y[j] for j in self._keep]

    def subfield_generator_coords(self, sub_idx, gen_idx):
        coords = [0] * len(self.pool)
        coords[self._offsets[sub_idx] + gen_idx] = 1
        return self.pool_coords_to_basis(coords)

    def _local_index(self, pool_idx):
        idx = self.pool_owner[pool_idx][0]
        return pool_idx - self._offsets[idx]

    def sigma_matrix(self, element):
        """Action of a group element on basis coordinates (exact)."""
        n = len(self.pool)
        pool_mat = []
        for i, (idx, _g) in enumerate(self.pool_owner):
            sub = self.sub_lattices[idx]
            local = self._local_index(i)
            H = self.field.subgroup_fixing(idx)
            if H.contains(element):
                row = [1 if j == local else 0 for j in range(len(sub.gens))]
            else:
                row = list(sub.sigma_matrix[local])
            full = [0] * n
            off = self._offsets[idx]
            for j, e in enumerate(row):
                full[off + j] = e
            pool_mat.append(full)
        out = []
        for pool_row in self._basis_pool_rows:
            coords = [0] * n
            for i, e in enumerate(pool_row):
                if e:
                    for l in range(n):
                        coords[l] += e * pool_mat[i][l]
            out.append(self.pool_coords_to_basis(coords))
        return out

    def log_matrix(self, prec=None):
        prec = prec or self.prec
        out = []
        with working_precision(prec):
            fin = [w for w in self.places if w.kind == "finite"]
            for h, hcoords in zip(self.basis_elements, self._basis_pool_rows):
                row = []
                for w in self.places:
                    if w.kind == "real":
                        row.append(-ball_log(abs(h.embedding_ball(w.signs))))
                    else:
                        # -log|h|_w = ord_w(h) * log(Nw)
                        o = self._basis_ord(hcoords, w, fin)
                        row.append(ball_log_int(w.nw()) * o)
                tot = row[0]
                for e in row[1:]:
                    tot = tot + e
                assert tot.contains_zero(), "product formula violated"
                out.append(row)
        return out

    def _basis_ord(self, pool_coords, w, fin):
        widx = fin.index(w)
        return sum(c * self.val_rows[i][widx]
                   for i, c in enumerate(pool_coords) if c)
