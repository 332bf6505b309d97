from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfn.linalg import SingularSystem, determinant, identity_minus, solve, solve_integer


def laplace_det(a):
    """Cofactor expansion along the first row; exponential but independent."""
    if not a:
        return Fraction(1)
    return sum(((-1) ** j * a[0][j] * laplace_det([row[:j] + row[j + 1:] for row in a[1:]])
                for j in range(len(a)) if a[0][j]), Fraction(0))


small = st.fractions(min_value=-4, max_value=4, max_denominator=6)
matrices = st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


@given(matrices)
def test_determinant_matches_cofactor_expansion(a):
    assert determinant(a) == laplace_det(a)


@given(matrices, st.data())
def test_solve_residual_is_exactly_zero(a, data):
    n = len(a)
    b = data.draw(st.lists(small, min_size=n, max_size=n))
    if laplace_det(a) == 0:
        with pytest.raises(SingularSystem):
            solve(a, b)
        return
    x = solve(a, b)
    assert [sum(a[i][j] * x[j] for j in range(n)) for i in range(n)] == b


def test_matrix_right_hand_side():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    x = solve(a, [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]])
    assert x == [[Fraction(3, 5), Fraction(-1, 5)], [Fraction(-1, 5), Fraction(2, 5)]]


def test_pivot_needs_row_swap():
    a = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    assert determinant(a) == -1
    assert solve(a, [Fraction(2), Fraction(3)]) == [3, 2]


def test_integer_solve_returns_common_denominator():
    d, y = solve_integer([[2, -1], [-1, 2]], [[2], [0]])
    assert [Fraction(v[0], d) for v in y] == [Fraction(4, 3), Fraction(2, 3)]


def test_identity_minus():
    half = Fraction(1, 2)
    assert identity_minus([[0, half], [half, 0]]) == [[1, -half], [-half, 1]]
    assert determinant([]) == 1
