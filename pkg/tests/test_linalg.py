import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from qtwist import linalg as la


def fraction_matrix(rows):
    return la.OperatorMatrix.from_rows(rows)


def sympy_charpoly(rows):
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    x = sympy.Symbol("x")
    coeffs = M.charpoly(x).all_coeffs()[::-1]
    return [Fraction(int(c.p), int(c.q)) for c in coeffs]


@st.composite
def rational_rows(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    entry = st.fractions(min_value=-6, max_value=6, max_denominator=4)
    return [[draw(entry) for _ in range(n)] for _ in range(n)]


@settings(max_examples=40, deadline=None)
@given(rational_rows())
def test_charpoly_matches_sympy(rows):
    assert la.charpoly(fraction_matrix(rows)) == sympy_charpoly(rows)


def test_charpoly_large_entries():
    rng = random.Random(5)
    rows = [[Fraction(rng.randint(-10 ** 6, 10 ** 6), rng.randint(1, 7)) for _ in range(9)]
            for _ in range(9)]
    assert la.charpoly(fraction_matrix(rows)) == sympy_charpoly(rows)


@settings(max_examples=30, deadline=None)
@given(rational_rows(max_n=5))
def test_minimal_polynomial_divides_charpoly_and_annihilates(rows):
    A = fraction_matrix(rows)
    mp = la.minimal_polynomial(A)
    cp = la.charpoly(A)
    assert mp[-1] == 1
    _, rem = la.dense_divmod(cp, mp)
    assert not any(rem)
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    acc = sympy.zeros(M.rows)
    for c in reversed(mp):
        acc = acc * M + sympy.Rational(c.numerator, c.denominator) * sympy.eye(M.rows)
    assert acc == sympy.zeros(M.rows)


def test_jordan_block_detected():
    # J_2(3) (+) [3] (+) [-1]
    rows = [[3, 1, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [0, 0, 0, -1]]
    A = fraction_matrix(rows)
    rep = la.spectrum_report(A)
    assert rep.minpoly == [Fraction(c) for c in (9, 3, -5, 1)]  # (x-3)^2 (x+1)
    assert not rep.squarefree
    assert rep.multiplicities[Fraction(3)] == (3, 2)
    assert rep.jordan_eigenvalues == [3]


def test_diagonalizable_with_repeated_eigenvalue():
    A = fraction_matrix([[2, 0, 0], [0, 2, 0], [0, 0, Fraction(1, 2)]])
    rep = la.spectrum_report(A)
    assert rep.squarefree
    assert rep.multiplicities == {Fraction(2): (2, 2), Fraction(1, 2): (1, 1)}


def test_nilpotent_is_not_diagonalizable():
    A = fraction_matrix([[0, 1], [0, 0]])
    assert la.minimal_polynomial(A) == [0, 0, 1]
    assert not la.is_squarefree(la.minimal_polynomial(A))


@settings(max_examples=30, deadline=None)
@given(rational_rows())
def test_rank_matches_sympy(rows):
    A = fraction_matrix(rows)
    M = sympy.Matrix(A.num.tolist())
    assert la.rank_int(A.num.tolist()) == M.rank()


def test_rational_eigenvalues_with_denominator():
    A = fraction_matrix([[Fraction(1, 3), 1], [0, Fraction(-5, 2)]])
    assert la.rational_eigenvalues(A) == {Fraction(1, 3): 1, Fraction(-5, 2): 1}


def test_operator_arithmetic():
    A = fraction_matrix([[1, Fraction(1, 2)], [0, 2]])
    B = fraction_matrix([[0, 1], [Fraction(1, 3), 0]])
    assert (A @ B).to_fractions() == [[Fraction(1, 6), 1], [Fraction(2, 3), 0]]
    assert (A @ A.inverse()) == la.OperatorMatrix.identity(2)
    assert A.commutator(A).is_zero()
    assert (A - A).is_zero()
    assert la.OperatorMatrix.identity(3).scale(Fraction(5, 7)).scalar_value() == Fraction(5, 7)


def test_block_triangular_spectrum():
    # upper triangular in the grading, with a Jordan-like coupling
    rows = [[1, 5, 0], [0, 1, 0], [2, 0, -3]]
    grades = [1, 0, 2]
    A = fraction_matrix(rows)
    assert la.block_triangular(A, grades)
    ev = sorted(z.real for z in la.spectrum_float(A, grades))
    assert ev == pytest.approx([-3, 1, 1], abs=1e-12)


def test_descending_primes_and_bound():
    from itertools import islice
    ps = list(islice(la.primes_below(1000), 5))
    assert ps == [997, 991, 983, 977, 971]
    assert not la._is_prime(561)
    M = np.array([[3, 0], [0, 4]], dtype=object)
    assert la.coefficient_bound(M) >= 12
