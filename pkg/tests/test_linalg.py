from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from minlaplace.exact import XI, GaussianRational, Poly, RationalFunction
from minlaplace.linalg import Matrix, charpoly, kernel_basis, rank, solve_linear, split_roots

from conftest import g
from test_exact import gaussians, to_sym


def matrices(rows=st.integers(1, 4), cols=st.integers(1, 4)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(gaussians, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0]).map(
            lambda rs: Matrix(rs, rc[1])
        )
    )


square = st.integers(1, 4).flatmap(lambda n: matrices(st.just(n), st.just(n)))


def sym(m: Matrix):
    return sympy.Matrix([[to_sym(x) for x in row] for row in m.rows])


# -- examples -------------------------------------------------------------------


def test_solve_identity_returns_rhs():
    b = (g(1), g(2, 1))
    assert solve_linear(Matrix.identity(2), b) == b


def test_solve_diagonal_scaling():
    assert solve_linear(Matrix([[2, 0], [0, 2]]), (g(1), g(1))) == (g(Fraction(1, 2)), g(Fraction(1, 2)))


def test_solve_over_function_field():
    xi1 = g(3)
    m = Matrix([[XI - xi1]])
    (v,) = solve_linear(m, (RationalFunction(1),))
    assert v * (XI - xi1) == RationalFunction(1)
    assert v == RationalFunction(1) / (XI - xi1)


def test_solve_inconsistent_is_none():
    assert solve_linear(Matrix([[1, 1], [1, 1]]), (g(1), g(2))) is None


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_linear(Matrix.identity(2), (g(1),))


def test_kernel_examples():
    assert kernel_basis(Matrix.zeros(2, 2)) == [(g(1), g(0)), (g(0), g(1))]
    assert kernel_basis(Matrix([[1, 2], [3, 4]])) == []
    (v,) = kernel_basis(Matrix([[1, 1], [1, 1]]))
    assert v[0] == -v[1] and v[0]


def test_matrix_is_immutable_and_checked():
    m = Matrix.identity(2)
    with pytest.raises(AttributeError):
        m.rows = ()
    with pytest.raises(ValueError):
        Matrix([[1, 2], [3]])
    with pytest.raises(ZeroDivisionError):
        Matrix([[1, 1], [1, 1]]).inverse()


# -- properties against sympy -----------------------------------------------------


@given(matrices())
def test_kernel_vectors_and_count(m):
    basis = kernel_basis(m)
    for v in basis:
        assert all(not x for x in m.apply(v))
    assert len(basis) == m.ncols - sym(m).rank()
    assert rank(m) == sym(m).rank()


@given(matrices(), st.data())
def test_solve_matches_sympy_solvability(m, data):
    b = tuple(data.draw(st.lists(gaussians, min_size=m.nrows, max_size=m.nrows)))
    v = solve_linear(m, b)
    solvable = sym(m).rank() == sym(m).row_join(sympy.Matrix([to_sym(x) for x in b])).rank()
    assert (v is not None) == solvable
    if v is not None:
        assert m.apply(v) == b


@given(square)
def test_charpoly_matches_sympy(m):
    lam = sympy.Symbol("lam")
    want = sympy.Poly(sym(m).charpoly(lam).as_expr(), lam).all_coeffs()[::-1]
    got = charpoly(m).coeffs
    assert len(got) == len(want)
    assert all(sympy.simplify(to_sym(a) - b) == 0 for a, b in zip(got, want))


@given(square)
def test_det_and_inverse(m):
    d = m.det()
    assert to_sym(d) == sympy.expand(sym(m).det())
    if d:
        assert m @ m.inverse() == Matrix.identity(m.nrows)


@given(st.lists(gaussians, min_size=1, max_size=4), st.integers(0, 1))
def test_split_roots_recovers_roots(roots, extra):
    p = Poly((1,))
    for z in roots:
        p = p * Poly((-z, 1))
    if extra:
        p = p * Poly((1, 0, 0, 0, 0, 0, 1))  # lam^6 + 1 keeps two Q(i) roots +-i
    found, rest = split_roots(p)
    expected = list(roots) + ([g(0, 1), g(0, -1)] if extra else [])
    assert sorted(found, key=lambda z: (z.re, z.im)) == sorted(expected, key=lambda z: (z.re, z.im))
    assert rest.degree == (4 if extra else 0)


def test_split_roots_irreducible():
    roots, rest = split_roots(Poly((-2, 0, 1)))  # lam^2 - 2
    assert roots == [] and rest == Poly((-2, 0, 1))
