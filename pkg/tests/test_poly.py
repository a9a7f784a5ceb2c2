from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sipsdp.poly import (
    X,
    Y,
    Polynomial,
    Space,
    dehomogenize,
    grlex_key,
    monomial_basis,
    perturbation_polynomial,
)
from sipsdp.instances import octic_constraint

from conftest import XY, example_two_p


def test_example_two_evaluation():
    assert example_two_p().evaluate([-0.5, 0, 1, 0]) == pytest.approx(0.25)


def test_trivial_evaluations():
    s = Space(("x1",), ("y1",))
    x1, y1 = s.gens()
    assert Polynomial.constant(s, 1).evaluate([7.0, -3.0]) == 1.0
    assert (x1 * y1).evaluate([2, 3]) == 6.0


def test_block_degrees():
    p = example_two_p()
    assert (p.block_degree(X), p.block_degree(Y)) == (2, 1)
    q = octic_constraint()
    assert (q.block_degree(X), q.block_degree(Y)) == (8, 8)
    c = Polynomial.constant(XY, 5)
    assert (c.block_degree(X), c.block_degree(Y)) == (0, 0)


def test_no_zero_coefficients_stored():
    x1, x2, y1, y2 = XY.gens()
    p = (x1 + y1) - y1 - x1
    assert p.is_zero() and len(p) == 0
    assert len((x1 + 1e-16 * x2)) == 1


def test_homogenize_generator():
    s = Space(("x1",), ("y1",))
    _, y1 = s.gens()
    g = 1 - y1**2
    h = g.homogenize_block(Y)
    assert h.space.y == ("y0", "y1")
    # y0^2 - y1^2
    assert h.terms == {(0, 2, 0): 1.0, (0, 0, 2): -1.0}


def test_homogenize_homogeneous_is_identity():
    s = Space(("x1",), ("y1", "y2"))
    _, y1, y2 = s.gens()
    g = y1 * y2 + 3 * y2**2
    h = g.homogenize_block(Y)
    assert all(m[1] == 0 for m in h.terms)
    assert dehomogenize(h) == g


def test_homogenize_example_two():
    h = example_two_p().homogenize_block(Y)
    x1, x2, y0, y1, y2 = h.space.gens()
    expected = -x1**2 * y0 - 2 * y2 * x1 * x2 - y1 * x2**2 - x1 * y0 - x2 * y0
    assert h == expected


def test_highest_degree_form():
    x1, x2, y1, y2 = XY.gens()
    assert (1 - y1**2).highest_degree_form(Y) == -y1**2
    assert (y1 - y2**2).highest_degree_form(Y) == -y2**2
    g = y1 * y2
    assert g.highest_degree_form(Y) == g


def test_coefficient_norm():
    s = Space(("x1",), ("y1", "y2"))
    _, y1, y2 = s.gens()
    assert (3 * y1**2 * y2).coefficient_norm() == pytest.approx(1.0)
    assert Polynomial.constant(s, -2.5).coefficient_norm() == 2.5
    assert (y1 + y2).coefficient_norm() == 1.0


def test_monomial_basis_sizes():
    assert monomial_basis(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(monomial_basis(2, 2)) == 6
    assert len(monomial_basis(3, 2)) == 10


def test_perturbation_polynomial():
    s1 = Space(("x1",), ())
    assert perturbation_polynomial(s1, 1, 1.0).terms == {(2,): 1.0}
    s2 = Space(("x1", "x2"), ())
    assert perturbation_polynomial(s2, 2, 2.0).terms == {(4, 0): 1 / 16, (0, 4): 1 / 16}
    assert perturbation_polynomial(s2, 3, 1.7).evaluate([1.7, 0]) == pytest.approx(1.0)


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        Space(("x1", "y1"), ("y1",))


def test_mixed_spaces_rejected():
    a = Polynomial.variable(Space(("x1",), ()), "x1")
    b = Polynomial.variable(Space(("x1", "x2"), ()), "x1")
    with pytest.raises(ValueError):
        a + b


# -- properties -----------------------------------------------------------------------

SPACE = Space(("x1",), ("y1", "y2"))
monos = st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
coeffs = st.floats(-5, 5, allow_nan=False).filter(lambda c: abs(c) > 1e-3)
polys = st.dictionaries(monos, coeffs, min_size=1, max_size=6).map(lambda t: Polynomial(SPACE, t))


@given(polys)
@settings(max_examples=60, deadline=None)
def test_homogenize_then_dehomogenize_roundtrip(p):
    h = p.homogenize_block(Y)
    assert dehomogenize(h).allclose(p, 1e-12)
    assert h.is_block_homogeneous(Y)
    sl = h.space.block_slice(Y)
    assert {sum(m[sl]) for m in h.terms} == {p.block_degree(Y)}


@given(polys, st.floats(-4, 4, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_coefficient_norm_absolutely_homogeneous(p, c):
    assert (c * p).coefficient_norm() == pytest.approx(abs(c) * p.coefficient_norm(), abs=1e-12)


@given(st.integers(1, 4), st.integers(0, 4))
def test_basis_length_and_order(n, k):
    basis = monomial_basis(n, k)
    assert len(basis) == comb(n + k, k)
    keys = [grlex_key(m) for m in basis]
    assert all(a < b for a, b in zip(keys, keys[1:]))
    assert all(sum(m) <= k for m in basis)


@given(polys, polys, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_arithmetic_matches_evaluation(p, q, pt):
    assert (p * q).evaluate(pt) == pytest.approx(p.evaluate(pt) * q.evaluate(pt), rel=1e-9, abs=1e-9)
    assert (p - q).evaluate(pt) == pytest.approx(p.evaluate(pt) - q.evaluate(pt), rel=1e-9, abs=1e-9)


@given(polys, st.lists(st.floats(-2, 2), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_partial_evaluate_consistent(p, pt):
    q = p.partial_evaluate(Y, pt[1:])
    assert q.block_degree(Y) == 0
    assert q.evaluate(pt) == pytest.approx(p.evaluate(pt), rel=1e-9, abs=1e-9)
    assert np.allclose(p.evaluate_many(np.array([pt, pt])), p.evaluate(pt))


@given(polys)
@settings(max_examples=40, deadline=None)
def test_degree_bookkeeping(p):
    assert p.degree() == max(sum(m) for m in p.terms)
    assert p.block_degree(X) == max(m[0] for m in p.terms)
    assert all(c != 0 for c in p.terms.values())
