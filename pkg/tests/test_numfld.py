import random
from fractions import Fraction

import pytest
import sympy

from starklab.ball import set_working_precision, working_precision
from starklab.grpring import InputError
from starklab.hnf import identity_matrix, invariant_factors_from_diagonal, \
    mat_mul
from starklab.numfld import (DatumError, ImaginaryClassGroup, QuadField,
                             QuadIdeal, RealClassGroup, class_number,
                             fundamental_discriminant, fundamental_unit,
                             ideal_power, is_fundamental_discriminant,
                             kronecker, log_abs_at_place, narrow_class_number,
                             ord_at_place, places_over, ray_class,
                             s_unit_lattice, squarefree_part, unit_norm)


def test_kronecker_against_residue_oracle():
    for q in [3, 5, 7, 11, 13]:
        for a in range(-30, 31):
            if a % q == 0:
                assert kronecker(a, q) == 0
            else:
                qr = any((x * x - a) % q == 0 for x in range(q))
                assert kronecker(a, q) == (1 if qr else -1)
    # multiplicativity in the lower argument
    rng = random.Random(1)
    for _ in range(100):
        a, n1, n2 = rng.randint(-30, 30), rng.randint(1, 30), rng.randint(1, 30)
        assert kronecker(a, n1 * n2) == kronecker(a, n1) * kronecker(a, n2)


def test_discriminants():
    assert squarefree_part(12) == 3 and squarefree_part(-18) == -2
    assert fundamental_discriminant(2) == 8
    assert fundamental_discriminant(3) == 12
    assert fundamental_discriminant(5) == 5
    assert fundamental_discriminant(-1) == -4
    assert is_fundamental_discriminant(-23)
    assert not is_fundamental_discriminant(20)
    with pytest.raises(InputError):
        QuadField(20)
    with pytest.raises(InputError):
        fundamental_discriminant(4)


def test_fundamental_units_known_values():
    F5 = QuadField(5)
    assert fundamental_unit(5) == F5.element(Fraction(1, 2), Fraction(1, 2))
    assert fundamental_unit(8) == QuadField(8).element(1, 1)
    assert fundamental_unit(12) == QuadField(12).element(2, 1)
    assert unit_norm(12) == 1 and unit_norm(8) == -1
    assert fundamental_unit(13) == QuadField(13).element(
        Fraction(3, 2), Fraction(1, 2))
    assert fundamental_unit(61) == QuadField(61).element(
        Fraction(39, 2), Fraction(5, 2))
    assert fundamental_unit(376) == QuadField(376).element(2143295, 221064)


def test_fundamental_unit_is_minimal():
    # brute-force oracle for small D: no unit > 1 smaller than eps
    for D in [5, 8, 12, 13, 17, 21, 24, 28, 29, 33]:
        F = QuadField(D)
        eps = fundamental_unit(D)
        w = F.omega()
        best = None
        for x in range(-60, 61):
            for y in range(-60, 61):
                if y == 0 and x in (-1, 0, 1):
                    continue
                u = F.element(x, 0) + w * y
                if abs(u.norm()) == 1 and u.compare_zero() > 0 \
                        and u.abs_greater_one():
                    if best is None or (best - u).compare_zero() > 0:
                        best = u
        assert best is not None and best == eps, D


def test_class_numbers_against_tables():
    known_neg = {-3: 1, -4: 1, -7: 1, -8: 1, -11: 1, -15: 2, -20: 2,
                 -23: 3, -24: 2, -31: 3, -39: 4, -47: 5, -71: 7, -95: 8,
                 -163: 1, -231: 12}
    for D, h in known_neg.items():
        assert class_number(D) == h, D
    known_pos = {5: 1, 8: 1, 12: 1, 13: 1, 40: 2, 60: 2, 65: 2, 229: 3,
                 145: 4, 401: 5, 469: 3}
    for D, h in known_pos.items():
        assert class_number(D) == h, D
    assert narrow_class_number(12) == 2  # N(eps) = +1 doubles the count
    assert narrow_class_number(5) == 1
    cg = ImaginaryClassGroup(-23)
    diag, _, _ = cg.structure.invariants()
    assert invariant_factors_from_diagonal(diag) == [3]
    cg4 = ImaginaryClassGroup(-84)  # Klein group (2, 2)
    diag, _, _ = cg4.structure.invariants()
    assert invariant_factors_from_diagonal(diag) == [2, 2]


def test_splitting_against_factorization_oracle():
    for D in [5, 8, -4, -23, 12, -84, 17]:
        F = QuadField(D)
        m = F.m
        # minimal polynomial of the integral generator
        if m % 4 == 1:
            poly = lambda x: x * x - x + (1 - m) // 4
        else:
            poly = lambda x: x * x - m
        for q in sympy.primerange(2, 100):
            roots = sorted(x for x in range(q) if poly(x) % q == 0)
            kind = F.splitting(q)
            if len(roots) == 2:
                assert kind == "split", (D, q)
            elif len(roots) == 0:
                assert kind == "inert", (D, q)
            else:
                # single root: ramified exactly when it is a double root
                x = roots[0]
                double = (2 * x - (1 if m % 4 == 1 else 0)) % q == 0
                assert kind == ("ramified" if double else "split"), (D, q)


def test_ideals_and_generators():
    Fm23 = QuadField(-23)
    p23 = QuadIdeal.prime_over(Fm23, 23)
    g = p23.principal_generator()
    assert g is not None and abs(g.norm()) == 23
    p2 = QuadIdeal.prime_over(Fm23, 2)
    assert p2.principal_generator() is None  # class of order 3
    g8 = ideal_power(p2, 3).principal_generator()
    assert g8 is not None and abs(g8.norm()) == 8
    F5 = QuadField(5)
    p5 = QuadIdeal.prime_over(F5, 5)
    g5 = p5.principal_generator()
    assert abs(g5.norm()) == 5


def test_valuations_and_product_formula():
    F5 = QuadField(5)
    split = places_over(F5, 11)
    assert len(split) == 2
    pi = F5.element(Fraction(7, 2), Fraction(1, 2))  # norm 11
    vals = sorted(ord_at_place(pi, w) for w in split)
    assert vals == [0, 1]
    assert ord_at_place(pi.conj(), split[0]) == ord_at_place(pi, split[1])
    ram = places_over(F5, 5)[0]
    assert ord_at_place(F5.sqrt_m(), ram) == 1
    assert ord_at_place(F5.element(5), ram) == 2
    inert = places_over(QuadField(8), 3)[0]
    assert inert.nw() == 9
    assert ord_at_place(QuadField(8).element(3), inert) == 1
    # split prime 2 (D = 17): distinguish the two places 2-adically
    F17 = QuadField(17)
    two = places_over(F17, 2)
    x = (F17.element(1) + F17.sqrt_m()) * Fraction(1, 2)  # norm -4
    assert sorted(ord_at_place(x, w) for w in two) == [0, 2]
    # product formula over all places
    with working_precision(100):
        for D, coords in [(5, (Fraction(7, 2), Fraction(1, 2))), (8, (1, 1)),
                          (-23, (3, 1)),
                          (17, (Fraction(1, 2), Fraction(1, 2)))]:
            F = QuadField(D)
            x = F.element(*coords)
            n = x.norm()
            primes = sorted(set(
                list(sympy.factorint(abs(n.numerator)))
                + list(sympy.factorint(n.denominator))
                + F.ramified_primes()))
            total = None
            for v in ["inf"] + primes:
                for w in places_over(F, v):
                    term = log_abs_at_place(x, w)
                    total = term if total is None else total + term
            assert total.contains_zero() and total.rad() < Fraction(1, 2 ** 60)


def test_s_unit_lattices():
    L = s_unit_lattice("Q", ["inf", 2], [5])
    assert L.rank == 1 and L.gens == [Fraction(2)]
    assert L.t_index() == 2
    with pytest.raises(DatumError):
        s_unit_lattice("Q", ["inf"], [])
    with pytest.raises(DatumError):
        s_unit_lattice(QuadField(5), ["inf", 5], [2])  # (H3): -1 = 1 mod 2
    with pytest.raises(DatumError):
        s_unit_lattice(QuadField(5), ["inf"], [3])     # missing ramified 5
    L5 = s_unit_lattice(QuadField(5), ["inf", 5], [3])
    assert L5.rank == 2 and L5.t_index() == 4
    assert mat_mul(L5.sigma_matrix, L5.sigma_matrix) == identity_matrix(2)
    L5.log_matrix()  # row sums certified zero internally
    L12 = s_unit_lattice(QuadField(12), ["inf", 2, 3], [5])
    assert L12.rank == 3 and L12.t_index() == 12
    Li = s_unit_lattice(QuadField(-4), ["inf", 2], [5])
    assert Li.rank == 1 and abs(Li.gens[0].norm()) == 2
    # rank = |S_K| - 1 on a split-prime scenario
    L57 = s_unit_lattice(QuadField(5), ["inf", 5, 11], [3])
    assert L57.rank == 4  # places: 2 arch + 1 ram + 2 split - 1


def test_express_roundtrip():
    F5 = QuadField(5)
    L5 = s_unit_lattice(F5, ["inf", 5], [3])
    rng = random.Random(2)
    for _ in range(10):
        coords = [rng.randint(-3, 3) for _ in range(2)]
        tor = rng.randint(0, 1)
        x = F5.element(-1 if tor else 1)
        for g, c in zip(L5.gens, coords):
            x = x * (g ** c)
        got, jtor = L5.express(x)
        assert got == coords and jtor == tor


def test_ray_class_modules():
    assert ray_class("Q", ["inf"], [3]).order() == 1
    rc5 = ray_class("Q", ["inf"], [5])
    assert rc5.order() == 2
    assert ray_class("Q", ["inf", 2], [5]).order() == 1
    assert ray_class(QuadField(-4), ["inf", 2], [5]).order() == 1
    assert ray_class(QuadField(5), ["inf", 5], [3]).order() == 1
    assert ray_class(QuadField(12), ["inf", 2, 3], [5]).order() == 1
    rc = ray_class(QuadField(-23), ["inf", 23], [3])
    assert rc.order() == 3 and rc.h_s == 3 and rc.rt_quotient_order == 1
    # inversion action on the class-group part
    m = rc.module
    assert m.act_by_generator(0, (1,)) == ((-1) % m.orders[0],)
    assert rc.p_rank(3) == 1 and rc.p_rank(2) == 0
    # order identity asserted internally; spot check another field
    rc15 = ray_class(QuadField(-15), ["inf", 3, 5], [7])
    assert rc15.order() == rc15.h_s * rc15.rt_quotient_order


def test_torsion_units():
    assert QuadField(-4).torsion_generator()[1] == 4
    assert QuadField(-3).torsion_generator()[1] == 6
    assert QuadField(-23).torsion_generator()[1] == 2
    z, w = QuadField(-3).torsion_generator()
    assert (z ** 6) == QuadField(-3).element(1)
    assert not (z ** 3) == QuadField(-3).element(1)
