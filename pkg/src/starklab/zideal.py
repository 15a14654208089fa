"""Ideals of Z[G] as G-stable integer lattices in Hermite normal form,
Fitting ideals of finitely presented Z[G]-modules, and annihilators of
finite G-modules.

Every ideal is identified with its lattice of coefficient vectors inside
Z^{|G|}; equality and containment are decided on canonical HNF bases, so no
Groebner-style machinery is needed.
"""

import itertools
from fractions import Fraction

from . import hnf
from .ball import Undecided
from .grpring import AbelianGroup, GroupRingElement, InputError, Subgroup


class UnsupportedCaseError(RuntimeError):
    """A case outside the supported desk-scale shapes."""


class GIdealLattice:
    """A G-stable sublattice of Z[G] ~ Z^{|G|}, canonical HNF basis."""

    __slots__ = ("group", "lattice")

    def __init__(self, group, lattice):
        self.group = group
        self.lattice = lattice  # hnf.IntLattice

    @staticmethod
    def from_vectors(group, vectors, stabilize=True):
        lat = hnf.IntLattice(group.order)
        table = group.multiplication_table()
        for v in vectors:
            if stabilize:
                for gi in range(group.order):
                    row = table[gi]
                    moved = [0] * group.order
                    for j, c in enumerate(v):
                        if c:
                            moved[row[j]] = c
                    lat.add_vector(moved)
            else:
                lat.add_vector(list(v))
        return GIdealLattice(group, lat)

    @staticmethod
    def zero(group):
        return GIdealLattice(group, hnf.IntLattice(group.order))

    @staticmethod
    def unit(group):
        lat = hnf.IntLattice(group.order)
        for i in range(group.order):
            row = [0] * group.order
            row[i] = 1
            lat.add_vector(row)
        return GIdealLattice(group, lat)

    def basis(self):
        return self.lattice.canonical()

    def basis_elements(self):
        return [GroupRingElement(self.group, "int", row)
                for row in self.basis()]

    @property
    def rank(self):
        return self.lattice.rank

    def is_zero(self):
        return self.rank == 0

    def is_unit(self):
        return self.basis() == hnf.identity_matrix(self.group.order)

    def is_g_stable(self):
        table = self.group.multiplication_table()
        for row in self.basis():
            for gi in range(self.group.order):
                moved = [0] * self.group.order
                for j, c in enumerate(row):
                    if c:
                        moved[table[gi][j]] = c
                if not self.lattice.contains_vector(moved):
                    return False
        return True

    def contains_vector(self, vec):
        return self.lattice.contains_vector(list(vec))

    def contains(self, other):
        """Ideal containment other <= self via HNF membership of basis rows."""
        return all(self.lattice.contains_vector(r) for r in other.basis())

    def __eq__(self, other):
        if not isinstance(other, GIdealLattice):
            return NotImplemented
        return self.group is other.group and self.basis() == other.basis()

    def __hash__(self):
        return hash((id(self.group), tuple(map(tuple, self.basis()))))

    def product(self, other):
        if other.group is not self.group:
            raise InputError("mixed groups")
        if self.is_zero() or other.is_zero():
            return GIdealLattice.zero(self.group)
        table = self.group.multiplication_table()
        n = self.group.order
        lat = hnf.IntLattice(n)
        for a in self.basis():
            for b in other.basis():
                prod = [0] * n
                for i, ca in enumerate(a):
                    if ca:
                        row = table[i]
                        for j, cb in enumerate(b):
                            if cb:
                                prod[row[j]] += ca * cb
                lat.add_vector(prod)
        # products of G-stable lattices are G-stable already
        return GIdealLattice(self.group, lat)

    def sum(self, other):
        if other.group is not self.group:
            raise InputError("mixed groups")
        lat = hnf.IntLattice(self.group.order)
        for r in self.basis():
            lat.add_vector(list(r))
        for r in other.basis():
            lat.add_vector(list(r))
        return GIdealLattice(self.group, lat)

    def power(self, c):
        if c < 0:
            raise InputError("nonnegative powers only")
        out = GIdealLattice.unit(self.group)
        for _ in range(c):
            out = out.product(self)
        return out

    def scale(self, n):
        lat = hnf.IntLattice(self.group.order)
        for r in self.basis():
            lat.add_vector([n * c for c in r])
        return GIdealLattice(self.group, lat)

    def sharp(self):
        """Image under the # involution (coefficient permutation)."""
        perm = self.group.inversion_permutation()
        lat = hnf.IntLattice(self.group.order)
        for r in self.basis():
            moved = [0] * self.group.order
            for j, c in enumerate(r):
                moved[perm[j]] = c
            lat.add_vector(moved)
        return GIdealLattice(self.group, lat)

    def index_in_full(self):
        """[Z[G] : self] when full rank, else None."""
        if self.rank < self.group.order:
            return None
        basis = self.basis()
        out = 1
        for k in range(len(basis)):
            out *= basis[k][self.lattice.pivots[k]]
        return abs(out)

    def to_json(self):
        return {"group": list(self.group.invariant_factors),
                "hnf": [list(r) for r in self.basis()]}

    def __repr__(self):
        if self.is_zero():
            return f"GIdeal(0 of {self.group})"
        if self.is_unit():
            return f"GIdeal(1 of {self.group})"
        return f"GIdeal(rank {self.rank} of {self.group})"


def ideal_from_json(obj):
    group = AbelianGroup(tuple(obj["group"]))
    return GIdealLattice.from_vectors(group, obj["hnf"], stabilize=False)


def ideal_from_generators(gens):
    """Smallest G-stable lattice containing the given elements of Z[G]."""
    if not gens:
        raise InputError("need at least one generator")
    group = gens[0].group
    vecs = []
    for g in gens:
        if g.group is not group:
            raise InputError("mixed groups")
        vecs.append(g.int_vector())
    return GIdealLattice.from_vectors(group, vecs, stabilize=True)


def ideal_product(a, b):
    return a.product(b)


def ideal_contains(a, b):
    return a.contains(b)


def ideal_sharp(a):
    return a.sharp()


def principal_ideal(x):
    return ideal_from_generators([x])


def augmentation_ideal(group):
    """I_G, generated by sigma - 1 over the group generators."""
    one = GroupRingElement.one(group)
    gens = []
    for k in range(group.rank):
        el = tuple(1 if i == k else 0 for i in range(group.rank))
        gens.append(GroupRingElement.from_element(group, el) - one)
    if not gens:
        return GIdealLattice.zero(group)
    return ideal_from_generators(gens)


def augmentation_ideal_power(group, c):
    """The lattice of I_G^c inside Z^{|G|}; I_G^0 = Z[G]."""
    if c < 0:
        raise InputError("power must be nonnegative")
    return augmentation_ideal(group).power(c)


def membership(x, ideal):
    """Does x lie in the ideal lattice?  Ball elements must certify to a
    unique integer vector first (Undecided propagates, distinct from False).
    """
    vec = x.certified_int_vector() if isinstance(x, GroupRingElement) else list(x)
    return ideal.contains_vector(vec)


class Presentation:
    """Relations-by-generators matrix over Z[G] presenting a module."""

    __slots__ = ("group", "n_generators", "relations")

    def __init__(self, group, n_generators, relations):
        self.group = group
        self.n_generators = n_generators
        rels = []
        for row in relations:
            if len(row) != n_generators:
                raise InputError("relation width must match generator count")
            coerced = []
            for entry in row:
                if isinstance(entry, GroupRingElement):
                    if entry.group is not group:
                        raise InputError("mixed groups")
                    coerced.append(entry.convert("int"))
                else:
                    coerced.append(GroupRingElement.one(group).scale(int(entry)))
            rels.append(coerced)
        self.relations = rels

    def __repr__(self):
        return (f"Presentation({self.n_generators} generators, "
                f"{len(self.relations)} relations over {self.group})")


def fitting_ideal(pres, n=0):
    """n-th Fitting ideal: the ideal of (g-n)-minors of the relation matrix.

    Conventions: size <= 0 gives the unit ideal (this covers n >= g); too few
    relations for the required size gives the zero ideal.
    """
    g = pres.n_generators
    if n < 0:
        raise InputError("Fitting index must be nonnegative")
    size = g - n
    if size <= 0:
        return GIdealLattice.unit(pres.group)
    if len(pres.relations) < size:
        return GIdealLattice.zero(pres.group)
    group = pres.group
    lat = hnf.IntLattice(group.order)
    unit = GIdealLattice.unit(group)
    acc = GIdealLattice(group, lat)
    table = group.multiplication_table()
    for cols in itertools.combinations(range(g), size):
        for rows in itertools.combinations(range(len(pres.relations)), size):
            sub = [[pres.relations[r][c] for c in cols] for r in rows]
            det = _det_group_ring(sub)
            vec = det.int_vector()
            if not any(vec):
                continue
            if acc.contains_vector(vec):
                continue
            # G-stabilize the new generator into the accumulator
            for gi in range(group.order):
                moved = [0] * group.order
                row = table[gi]
                for j, c in enumerate(vec):
                    if c:
                        moved[row[j]] = c
                lat.add_vector(moved)
            acc = GIdealLattice(group, lat)
            if acc == unit:
                return acc
    return acc


def _det_group_ring(matrix):
    """Exact determinant over Z[G] by cofactor expansion."""
    k = len(matrix)
    if k == 0:
        raise InputError("empty determinant has no group context")
    group = matrix[0][0].group
    if k == 1:
        return matrix[0][0]

    def expand(rows, cols):
        if len(cols) == 1:
            return matrix[rows[0]][cols[0]]
        total = GroupRingElement.zero(group, "int")
        r0 = rows[0]
        rest = rows[1:]
        for idx, c in enumerate(cols):
            entry = matrix[r0][c]
            if entry.is_zero():
                continue
            minor = expand(rest, cols[:idx] + cols[idx + 1:])
            term = entry * minor
            total = total + term if idx % 2 == 0 else total - term
        return total

    return expand(tuple(range(k)), tuple(range(k)))


class FiniteGModule:
    """Finite abelian group with a G-action given by integer matrices.

    Coordinates: elements are rows (x_1, ..., x_k) with x_i taken mod the
    i-th diagonal order; `action[j]` gives the matrix of the j-th group
    generator acting by x -> x @ A_j.
    """

    __slots__ = ("group", "orders", "action")

    def __init__(self, group, orders, action):
        self.group = group
        self.orders = [int(d) for d in orders]
        if any(d < 1 for d in self.orders):
            raise InputError("orders must be positive (finite module)")
        self.action = [[list(map(int, row)) for row in mat] for mat in action]
        if len(self.action) != group.rank:
            raise InputError("need one action matrix per group generator")
        k = len(self.orders)
        for mat in self.action:
            if len(mat) != k or any(len(row) != k for row in mat):
                raise InputError("action matrix shape mismatch")
        self._validate()

    def _validate(self):
        k = len(self.orders)
        # well-defined: order_j * row_j of A must vanish mod orders
        for mat in self.action:
            for j in range(k):
                for i in range(k):
                    if (self.orders[j] * mat[j][i]) % self.orders[i] != 0:
                        raise InputError("action matrix not well defined "
                                         "modulo the coordinate orders")
        # commuting actions with correct orders, checked on the generators
        for a in range(self.group.rank):
            for b in range(a + 1, self.group.rank):
                ab = hnf.mat_mul(self.action[a], self.action[b])
                ba = hnf.mat_mul(self.action[b], self.action[a])
                if not self._mats_equal(ab, ba):
                    raise InputError("action matrices do not commute")
        for a, d in enumerate(self.group.invariant_factors):
            power = hnf.identity_matrix(len(self.orders))
            for _ in range(d):
                power = hnf.mat_mul(power, self.action[a])
            if not self._mats_equal(power, hnf.identity_matrix(len(self.orders))):
                raise InputError("action matrix order does not divide the "
                                 "group exponent")

    def _mats_equal(self, m1, m2):
        k = len(self.orders)
        return all((m1[i][j] - m2[i][j]) % self.orders[j] == 0
                   for i in range(k) for j in range(k))

    @staticmethod
    def zero(group):
        return FiniteGModule(group, [], [[] for _ in range(group.rank)])

    @staticmethod
    def trivial_action(group, orders):
        k = len(orders)
        return FiniteGModule(group, orders,
                             [hnf.identity_matrix(k)] * group.rank)

    def order(self):
        out = 1
        for d in self.orders:
            out *= d
        return out

    def reduce(self, vec):
        return tuple(x % d for x, d in zip(vec, self.orders))

    def act_by_generator(self, j, vec):
        k = len(self.orders)
        out = [0] * k
        for i in range(k):
            if vec[i]:
                for l in range(k):
                    out[l] += vec[i] * self.action[j][i][l]
        return self.reduce(out)

    def act_by_element(self, element, vec):
        out = tuple(vec)
        for j, a in enumerate(element):
            for _ in range(a):
                out = self.act_by_generator(j, out)
        return out

    def element_action_matrix(self, element):
        k = len(self.orders)
        rows = []
        for i in range(k):
            e_i = tuple(1 if l == i else 0 for l in range(k))
            rows.append(list(self.act_by_element(element, e_i)))
        return rows

    def act_group_ring(self, x, vec):
        """Action of a Z[G]-element on a module element."""
        xs = x.int_vector()
        k = len(self.orders)
        out = [0] * k
        for idx, c in enumerate(xs):
            if c:
                moved = self.act_by_element(self.group.elements[idx], vec)
                for l in range(k):
                    out[l] += c * moved[l]
        return self.reduce(out)

    def all_elements(self):
        return list(itertools.product(*(range(d) for d in self.orders)))

    def invariant_factors(self):
        return hnf.invariant_factors_from_diagonal(self.orders)

    def standard_presentation(self):
        """Z[G]-presentation with one generator per coordinate.

        Relations: d_i * e_i, and (sigma_j - 1 twisted) rows g_j(e_i) - A_j
        image rows expressing the action.
        """
        group = self.group
        k = len(self.orders)
        rels = []
        one = GroupRingElement.one(group)
        for i in range(k):
            row = [GroupRingElement.zero(group) for _ in range(k)]
            row[i] = one.scale(self.orders[i])
            rels.append(row)
        for j in range(group.rank):
            gen = tuple(1 if l == j else 0 for l in range(group.rank))
            sigma = GroupRingElement.from_element(group, gen)
            for i in range(k):
                # sigma * e_i - sum_l A_j[i][l] e_l = 0
                row = [one.scale(-self.action[j][i][l]) for l in range(k)]
                row[i] = row[i] + sigma
                rels.append(row)
        return Presentation(group, k, rels)

    def __repr__(self):
        return (f"FiniteGModule(orders={self.orders} over {self.group})")


def annihilator(module):
    """Ann_{Z[G]}(M) as a G-stable lattice, by exact kernel computation."""
    group = module.group
    n = group.order
    k = len(module.orders)
    if k == 0 or module.order() == 1:
        return GIdealLattice.unit(group)
    # constraints: for each generator e_j and coordinate i:
    #   sum_sigma c_sigma (M_sigma)[j][i] == 0  mod orders[i]
    mats = [module.element_action_matrix(el) for el in group.elements]
    cols = []
    moduli = []
    for j in range(k):
        for i in range(k):
            cols.append([mats[s][j][i] for s in range(n)])
            moduli.append(module.orders[i])
    m = len(cols)
    # kernel of Z^n -> prod Z/moduli via [C | -D] kernel projection
    rows = []
    for s in range(n):
        rows.append([cols[t][s] for t in range(m)])
    for t in range(m):
        rows.append([moduli[t] if tt == t else 0 for tt in range(m)])
    ker = hnf.kernel(rows)
    lat = hnf.IntLattice(n)
    for row in ker:
        lat.add_vector(row[:n])
    out = GIdealLattice(group, lat)
    assert out.is_g_stable()
    return out


def fitting_from_extension(cl_module, d, group=None):
    """Fitt^0(Cl) * I_G^(d-1): the closed form for the transpose Selmer
    module when G is cyclic of prime order and all d split-removed places
    have full decomposition group (caller asserts the latter).
    """
    from sympy import isprime
    group = group or cl_module.group
    if group.rank != 1 or not isprime(group.invariant_factors[0]):
        raise UnsupportedCaseError("closed form requires G cyclic of prime "
                                   "order")
    if d < 1:
        raise InputError("d counts places outside V; it must be >= 1")
    if cl_module.order() == 1:
        fitt0 = GIdealLattice.unit(group)
    else:
        fitt0 = fitting_ideal(cl_module.standard_presentation(), 0)
    return fitt0.product(augmentation_ideal_power(group, d - 1))
