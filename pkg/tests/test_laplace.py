import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minlaplace.connection import IrregularData, ParabolicConnection
from minlaplace.documents import load_connection
from minlaplace.exact import XI, RationalFunction
from minlaplace.fixtures import random_connection, random_minimal_section
from minlaplace.laplace import (
    NotInMinimalExtensionError,
    build_model,
    fiber_cokernel,
    formal_data_at_infinity,
    inverse_transform,
    reduce_section,
    reflect,
    residue_data_at,
    transform_connection,
)
from minlaplace.linalg import Matrix, rank
from minlaplace.sections import MeromorphicSection

from conftest import CORPUS, diag_sing, g, rank_one

SMALL = ["rank1", "rank1_gaussian", "rank2_two_points", "rank3_n2_blocks12", "rank3_single_block"]


def small_model(name):
    return build_model(load_connection(CORPUS / f"{name}.conn.json"))


def zero_eigen_rank_two():
    return ParabolicConnection(
        2,
        [
            diag_sing(0, [0, F(1, 3)], [0, F(1, 2)], [(0, 1), (1, 0)]),
            diag_sing(1, [0, F(1, 5)], [0, F(1, 7)], [(1, 0), (5, 1)]),
        ],
        IrregularData([g(2), g(3)], [0, 1, 2], [g(F(-1, 3)), g(F(-1, 5))], [F(1, 6), 0]),
    )


# -- the model of H^0(F) ---------------------------------------------------------


def test_model_dimensions_rank_one(rank1):
    model = build_model(rank1)
    assert (model.rank, model.transformed_rank, model.h0f_dimension) == (1, 1, 2)


@pytest.mark.parametrize("name", SMALL)
def test_model_dimension_is_sum_of_residue_ranks(name):
    model = small_model(name)
    conn = model.conn
    expected = sum(rank(s.residue) for s in conn.regular_singularities)
    assert model.transformed_rank == expected == conn.transformed_rank()
    assert model.h0f_dimension == conn.rank + expected


def test_zero_eigenvector_has_no_class():
    model = build_model(zero_eigen_rank_two())
    assert model.transformed_rank == 2
    with pytest.raises(NotInMinimalExtensionError):
        model.residue_class(0, (g(0), g(1)))


def test_invalid_input_rejected():
    with pytest.raises(ValueError):
        build_model(rank_one(mu=F(1), beta=0))


# -- reduction: hand-derived rank-one cases ----------------------------------------


def test_reduce_constant_section(rank1):
    # (d_x - xi) 1 = (a - xi) + mu/(x-p), so dx == mu/(xi - a) * dx/(x-p)
    model = build_model(rank1)
    s = MeromorphicSection.monomial(rank1.points, 1, 0, (g(1),))
    red = reduce_section(model, s)
    assert red.coordinates == (RationalFunction(g(F(1, 2))) / (XI - g(2)),)
    assert red.certificate_holds(model, s)


def test_reduce_double_pole(rank1):
    # (d_x - xi)(x-p)^{-1} = (mu-1)(x-p)^{-2} + (a-xi)(x-p)^{-1}
    model = build_model(rank1)
    s = MeromorphicSection.pole_term(rank1.points, 1, 0, 2, (g(1),))
    red = reduce_section(model, s)
    assert red.coordinates == ((XI - g(2)) / RationalFunction(g(F(-1, 2))),)
    assert red.certificate_holds(model, s)


def test_reduce_at_singular_value_rejected(rank1):
    model = build_model(rank1)
    s = MeromorphicSection.monomial(rank1.points, 1, 0, (g(1),))
    with pytest.raises(ValueError):
        reduce_section(model, s, g(2))


def test_reduce_section_pole_mismatch(rank1):
    model = build_model(rank1)
    with pytest.raises(ValueError):
        reduce_section(model, MeromorphicSection.zero((g(5),), 1))


# -- reduction: properties ---------------------------------------------------------


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("seed", range(3))
def test_certificate_for_random_sections(name, seed):
    model = small_model(name)
    s = random_minimal_section(model, random.Random(seed))
    red = reduce_section(model, s)
    assert red.certificate_holds(model, s)


@pytest.mark.parametrize("name", SMALL)
def test_numeric_reduction_matches_symbolic(name):
    model = small_model(name)
    rng = random.Random(7)
    s = random_minimal_section(model, rng)
    symbolic = reduce_section(model, s)
    lead = model.conn.irregular.leading
    for xi0 in [g(F(1, 7)), g(-5, 2), g(F(11, 3), -1)]:
        assert xi0 not in lead
        numeric = reduce_section(model, s, xi0)
        assert numeric.certificate_holds(model, s, xi0)
        assert numeric.coordinates == tuple(c(xi0) for c in symbolic.coordinates)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=15)
def test_reduction_is_linear(seed_a, seed_b):
    model = small_model("rank2_two_points")
    s = random_minimal_section(model, random.Random(seed_a))
    t = random_minimal_section(model, random.Random(seed_b))
    lhs = reduce_section(model, s + t).coordinates
    rhs = tuple(a + b for a, b in zip(reduce_section(model, s).coordinates, reduce_section(model, t).coordinates))
    assert lhs == rhs


def test_exact_image_reduces_to_zero(rank1):
    model = build_model(rank1)
    u = MeromorphicSection.monomial(rank1.points, 1, 2, (g(3),)) + MeromorphicSection.pole_term(
        rank1.points, 1, 0, 1, (g(1),)
    )
    image = model.twisted_derivative(u, g(F(1, 5)))
    assert all(not c for c in reduce_section(model, image, g(F(1, 5))).coordinates)


# -- the transformed connection -----------------------------------------------------


def test_transform_rank_one(rank1):
    t = transform_connection(build_model(rank1))
    assert t.rank == 1
    assert t.x_action == Matrix([[RationalFunction(g(F(1, 3))) + RationalFunction(g(F(1, 2))) / (XI - g(2))]])
    assert t.connection_form == -t.x_action


def test_all_zero_residues_give_empty_transform():
    conn = load_connection(CORPUS / "all_residues_zero.conn.json")
    assert all(s.residue.is_zero() for s in conn.regular_singularities)
    t = transform_connection(build_model(conn))
    assert t.rank == 0


@pytest.mark.parametrize("name", SMALL)
def test_transform_matches_fiber_cokernel(name):
    """Symbolic X(xi) against direct linear algebra on the fiber at random points."""
    model = small_model(name)
    t = transform_connection(model)
    rng = random.Random(name)
    lead = set(model.conn.irregular.leading)
    checked = 0
    while checked < 5:
        xi0 = g(F(rng.randint(-40, 40), rng.randint(1, 9)), F(rng.randint(-3, 3), rng.randint(1, 4)))
        if xi0 in lead:
            continue
        assert t.evaluate(xi0) == fiber_cokernel(model, xi0).x_action()
        checked += 1


def test_fiber_cokernel_rejects_singular_point(rank1):
    with pytest.raises(ValueError):
        fiber_cokernel(build_model(rank1), g(2))


@pytest.mark.parametrize("name", SMALL)
def test_partial_fractions_rebuild(name):
    t = transform_connection(small_model(name))
    const, terms = t.partial_fractions()
    rebuilt = const.map(RationalFunction)
    for xl, res in terms:
        rebuilt = rebuilt + res.map(lambda c, xl=xl: RationalFunction(c) / (XI - xl))
    assert rebuilt == t.x_action


def test_residue_and_formal_data_rank_one(rank1):
    t = transform_connection(build_model(rank1))
    data = residue_data_at(t, 2)
    assert data.matrix == Matrix([[g(F(-1, 2))]])
    assert data.splits and data.eigenvalues == [g(F(-1, 2))]
    a_hat, c_hat = formal_data_at_infinity(t)
    assert a_hat == Matrix([[g(F(1, 3))]])
    assert c_hat == Matrix([[g(F(1, 2))]])


def test_residue_data_away_from_poles_is_zero(rank1):
    data = residue_data_at(transform_connection(build_model(rank1)), 7)
    assert data.matrix.is_zero()


def test_reflect_is_an_involution(rank1):
    twice = reflect(reflect(rank1))
    assert twice.points == rank1.points
    assert twice.irregular.leading == rank1.irregular.leading
    assert reflect(rank1).points == (g(F(-1, 3)),)


def test_inverse_transform_rank_one():
    # a rank-one datum on the xi-line: X = 1/3 + (1/2)/(xi - 2) read as a connection
    datum = rank_one(p=2, mu=F(1, 2), beta=0, xi=F(1, 3), beta_inf=0)
    back = inverse_transform(datum)
    assert back.rank == 1
    assert back.x_action == Matrix([[RationalFunction(g(-2)) + RationalFunction(g(F(1, 2))) / (XI + g(F(1, 3)))]])


@pytest.mark.parametrize("seed", range(3))
def test_random_connection_transform_matches_fiber(seed):
    conn = random_connection(random.Random(seed), 2, 2, (1, 1), complex_part=True)
    model = build_model(conn)
    t = transform_connection(model)
    xi0 = g(F(13, 7), F(1, 3))
    assert t.evaluate(xi0) == fiber_cokernel(model, xi0).x_action()
