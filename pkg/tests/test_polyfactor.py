"""Rational polynomial factorization, with sympy as independent oracle."""

import random
from collections import Counter
from fractions import Fraction as Q

import pytest
import sympy

from ordiso.polyfactor import factor_rational_poly, qeval, qmul, qtrim


def test_difference_of_squares():
    assert factor_rational_poly([-1, 0, 1]) == [[Q(-1), Q(1)], [Q(1), Q(1)]]


def test_irreducible_quadratic():
    assert factor_rational_poly([1, 0, 1]) == [[Q(1), Q(0), Q(1)]]


def test_cube_minus_one():
    fs = factor_rational_poly([-1, 0, 0, 1])
    assert sorted(len(f) - 1 for f in fs) == [1, 2]
    assert [Q(-1), Q(1)] in fs
    assert [Q(1), Q(1), Q(1)] in fs


def test_swinnerton_dyer_style_inputs_stay_irreducible():
    # These split modulo every prime; recombination has to reassemble them.
    assert len(factor_rational_poly([1, 0, 0, 0, 1])) == 1
    assert len(factor_rational_poly([1, 0, -10, 0, 1])) == 1


def test_multiplicities():
    fs = factor_rational_poly([1, 2, 1])
    assert fs == [[Q(1), Q(1)], [Q(1), Q(1)]]


def test_zero_poly_rejected():
    with pytest.raises(ValueError):
        factor_rational_poly([0])


def test_product_times_content_recovers_input():
    rng = random.Random(2)
    for _ in range(40):
        deg = rng.randrange(1, 8)
        f = [Q(rng.randrange(-5, 6), rng.randrange(1, 4)) for _ in range(deg)]
        f.append(Q(rng.randrange(1, 5)))
        fs = factor_rational_poly(f)
        prod = [f[-1]]
        for g in fs:
            prod = qmul(prod, g)
        assert qtrim(prod) == qtrim(list(f))
        for g in fs:
            assert g[-1] == 1  # monic


def test_against_sympy_degree_profiles():
    x = sympy.Symbol("x")
    rng = random.Random(3)
    for _ in range(40):
        deg = rng.randrange(1, 9)
        coeffs = [Q(rng.randrange(-6, 7)) for _ in range(deg)] + [Q(rng.randrange(1, 4))]
        mine = Counter(len(g) - 1 for g in factor_rational_poly(coeffs))
        poly = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(coeffs))
        theirs = Counter()
        for fac, mult in sympy.factor_list(poly)[1]:
            d = sympy.degree(fac, x)
            if d > 0:
                theirs[int(d)] += mult
        assert mine == theirs


def test_low_degree_factors_have_no_rational_root_when_irreducible():
    rng = random.Random(4)
    for _ in range(30):
        deg = rng.randrange(2, 6)
        f = [Q(rng.randrange(-4, 5)) for _ in range(deg)] + [Q(1)]
        for g in factor_rational_poly(f):
            if len(g) - 1 in (2, 3):
                # rational root test certifies irreducibility at these degrees
                num_cands = {d for d in range(1, abs(g[0].numerator) + 1) if g[0].numerator % d == 0}
                num_cands |= {0}
                for r in list(num_cands):
                    for s in (1, -1):
                        assert qeval(g, Q(s * r)) != 0 or len(g) - 1 == 1
