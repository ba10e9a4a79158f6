import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minlaplace.connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    UnsupportedSubdatumError,
    dmodule_degrees,
    extend_filtration,
    parabolic_degree,
    slope_of_subdata,
    spectral_degrees,
    validate_admissible,
    validate_resonance_free,
)
from minlaplace.fixtures import random_connection
from minlaplace.linalg import Matrix

from conftest import diag_sing, g, rank_one


def two_point(mu1=F(1, 2), mu_inf=F(1, 3), beta=F(0)):
    """Rank 1 with two points; the second residue restores compatibility."""
    mu2 = -mu_inf - mu1
    return ParabolicConnection(
        1,
        [diag_sing(0, [mu1], [beta]), diag_sing(1, [mu2], [F(1, 5)])],
        IrregularData([g(2)], [0, 1], [g(mu_inf)], [F(0)]),
    )


def rank_two(weights_inf=(F(1, 6), F(0)), zero_weight=F(0)):
    return ParabolicConnection(
        2,
        [
            diag_sing(0, [0, F(1, 3)], [zero_weight, F(1, 2)], [(0, 1), (1, 0)]),
            diag_sing(1, [0, F(1, 5)], [F(0), F(1, 7)], [(1, 0), (5, 1)]),
        ],
        IrregularData([g(2), g(3)], [0, 1, 2], [g(F(-1, 3)), g(F(-1, 5))], list(weights_inf)),
    )


def clauses(report):
    return {v.clause for v in report.violations}


# -- data model -----------------------------------------------------------------


def test_compatibility_at_infinity_enforced():
    with pytest.raises(InvalidConnectionError, match="-C"):
        ParabolicConnection(1, [diag_sing(0, [F(1, 2)], [0])], IrregularData([g(1)], [0, 1], [g(F(1, 2))], [0]))


def test_points_must_be_distinct():
    with pytest.raises(InvalidConnectionError, match="distinct"):
        ParabolicConnection(
            1,
            [diag_sing(0, [F(1, 2)], [0]), diag_sing(0, [F(1, 3)], [0])],
            IrregularData([g(1)], [0, 1], [g(F(-5, 6))], [0]),
        )


def test_blocks_must_be_constant_and_distinct():
    with pytest.raises(InvalidConnectionError):
        IrregularData([g(1), g(2)], [0, 2], [g(0), g(0)], [0, 0])
    with pytest.raises(InvalidConnectionError):
        IrregularData([g(1), g(1)], [0, 1, 2], [g(0), g(0)], [0, 0])


def test_eigenvectors_checked():
    with pytest.raises(InvalidConnectionError, match="not an eigenvector"):
        RegularSingularity(g(0), Matrix([[1, 1], [0, 2]]), [EigenDatum(1, 0, (1, 0)), EigenDatum(2, 0, (0, 1))])
    with pytest.raises(InvalidConnectionError, match="basis"):
        RegularSingularity(g(0), Matrix([[0, 1], [0, 0]]), [EigenDatum(0, 0, (1, 0)), EigenDatum(0, 0, (1, 0))])


def test_weights_in_unit_interval():
    with pytest.raises(InvalidConnectionError):
        EigenDatum(g(1), F(1), (g(1),))
    with pytest.raises(InvalidConnectionError):
        EigenDatum(g(1), F(-1, 2), (g(1),))


# -- validate_resonance_free ---------------------------------------------------------


def test_resonance_free_example_passes():
    assert validate_resonance_free(two_point()).passed


def test_integer_eigenvalue_fails():
    report = validate_resonance_free(two_point(mu1=F(1)))
    assert "Re(mu) in Z" in clauses(report)
    assert report.violations[0].where == "p1"


def test_eigenvalue_equal_to_weight_fails():
    report = validate_resonance_free(two_point(mu1=F(1, 4), beta=F(1, 4)))
    assert clauses(report) == {"mu = beta"}


def test_block_difference_integer_fails():
    conn = ParabolicConnection(
        2,
        [diag_sing(0, [F(-1, 2), F(-3, 2)], [0, 0])],
        IrregularData([g(1), g(1)], [0, 2], [g(F(1, 2)), g(F(3, 2))], [0, 0]),
    )
    report = validate_resonance_free(conn)
    assert "mu_k - mu_m in Z\\{0}" in clauses(report)
    assert {v.where for v in report.violations} == {"p1", "infinity"}


def test_differences_across_blocks_allowed():
    conn = ParabolicConnection(
        2,
        [diag_sing(0, [F(-1, 2), F(-3, 2)], [0, 0]), diag_sing(1, [F(1, 3), F(1, 3)], [0, 0])],
        IrregularData([g(1), g(2)], [0, 1, 2], [g(F(1, 6)), g(F(7, 6))], [0, 0]),
    )
    assert not any(v.where == "infinity" for v in validate_resonance_free(conn).violations)


# -- validate_admissible --------------------------------------------------------


def test_admissible_vacuous_and_zero_weight():
    assert validate_admissible(rank_one()).passed
    assert validate_admissible(rank_two()).passed


def test_zero_eigenvector_with_weight_fails():
    report = validate_admissible(rank_two(zero_weight=F(1, 4)))
    assert not report.passed
    assert report.violations[0].where == "p1"


# -- degrees ------------------------------------------------------------------


def test_parabolic_degree_all_zero_weights():
    conn = ParabolicConnection(1, [diag_sing(0, [F(1, 2)], [0])], IrregularData([g(1)], [0, 1], [g(F(-1, 2))], [0]))
    assert parabolic_degree(conn) == 0


def test_parabolic_degree_sums_weights():
    conn = ParabolicConnection(
        2,
        [diag_sing(0, [F(1, 2), F(1, 5)], [F(1, 3), F(2, 3)])],
        IrregularData([g(1), g(2)], [0, 1, 2], [g(F(-1, 2)), g(F(-1, 5))], [0, 0]),
    )
    assert parabolic_degree(conn) == 1
    assert parabolic_degree(rank_two(weights_inf=(F(1, 2), F(0)))) == F(1, 2) + F(1, 7) + F(1, 2)


def test_parabolic_degree_quarter_example():
    conn = ParabolicConnection(
        2,
        [diag_sing(0, [F(1, 2), F(1, 5)], [F(1, 4), 0]), diag_sing(1, [F(1, 3), F(1, 7)], [0, F(1, 4)])],
        IrregularData([g(1), g(2)], [0, 1, 2], [g(F(-5, 6)), g(F(-12, 35))], [F(1, 2), 0]),
    )
    assert parabolic_degree(conn) == 1


def test_dmodule_degrees_rank_one():
    deg, pdeg, slope = dmodule_degrees(rank_one(beta=0, beta_inf=0))
    assert deg == 0 and pdeg == 0 and slope == 0


def test_dmodule_degrees_all_zero():
    conn = ParabolicConnection(1, [diag_sing(0, [0], [0])], IrregularData([g(1)], [0, 1], [g(0)], [0]))
    assert dmodule_degrees(conn) == (g(0), g(0), g(0))


def test_spectral_degree_hand_example():
    # eigenvalues {0, 1/3} at p1 with weights {0, 1/4}; C = diag(-1/3, -1/6), weights {1/8, 0}
    deg, pdeg, slope = spectral_degrees([[(g(0), F(0)), (g(F(1, 3)), F(1, 4))], [(g(F(-1, 3)), F(1, 8)), (g(F(-1, 6)), F(0))]], 2)
    assert deg == F(1, 6)
    assert pdeg == F(1, 6) + F(1, 4) + F(1, 8)
    assert slope == pdeg / 2


@pytest.mark.parametrize("seed", range(6))
def test_trivial_bundle_degree_vanishes(seed):
    # residue theorem: all residues sum to zero, so deg(M) = 0 and both degrees agree
    conn = random_connection(random.Random(seed), 3, 2, (1, 2), complex_part=bool(seed % 2))
    deg, pdeg, _ = dmodule_degrees(conn)
    assert deg == 0
    assert pdeg == parabolic_degree(conn)


# -- extend_filtration ------------------------------------------------------------


def test_extend_filtration_examples():
    assert extend_filtration(F(1, 2), (F(1, 2), F(1, 4)), 0) == (g(F(1, 2)), F(1, 4))
    assert extend_filtration(F(5, 2), (F(1, 2), F(1, 4)), 2) == (g(F(5, 2)), F(9, 4))
    assert extend_filtration(F(-4, 3), (F(-1, 3), 0), -1) == (g(F(-4, 3)), F(-1))


def test_extend_filtration_requires_integer_shift():
    with pytest.raises(ValueError):
        extend_filtration(F(1, 3), (F(1, 2), 0), 0)


@given(
    st.fractions(max_denominator=7),
    st.fractions(min_value=0, max_value=F(6, 7), max_denominator=7),
    st.integers(-5, 5),
    st.integers(-5, 5),
)
def test_extend_filtration_is_group_action(mu, beta, n, m):
    step = extend_filtration(mu + n, (mu, beta), n)
    twice = extend_filtration(mu + n + m, step, m)
    assert twice == extend_filtration(mu + n + m, (mu, beta), n + m)


# -- slopes ----------------------------------------------------------------------


def test_slope_of_line_subbundles():
    conn = rank_two()
    first = {0: [1], 1: [(1, 0)], "infinity": [0]}
    second = {0: [0], 1: [(5, 1)], "infinity": [1]}
    assert slope_of_subdata(conn, first) == F(2, 3)
    assert slope_of_subdata(conn, second) == F(1, 7)
    whole = {0: [0, 1], 1: [0, 1], "infinity": [0, 1]}
    assert slope_of_subdata(conn, whole) == dmodule_degrees(conn)[2]


def test_slope_rejects_non_eigen_subspace():
    conn = rank_two()
    with pytest.raises(UnsupportedSubdatumError):
        slope_of_subdata(conn, {0: [(1, 1)], 1: [0], "infinity": [0]})
    with pytest.raises(UnsupportedSubdatumError):
        slope_of_subdata(conn, {0: [0], 1: [0]})


# -- invariance ------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(8))
def test_resonance_report_invariant_under_permutation(seed):
    rng = random.Random(seed)
    conn = random_connection(rng, 3, 3, (1, 1, 1), complex_part=True)
    sings = list(conn.regular_singularities)
    rng.shuffle(sings)
    permuted = ParabolicConnection(conn.rank, sings, conn.irregular)
    # labels p_j move with the permutation, so compare (clause, detail) multisets
    def key(report):
        return sorted((v.clause, v.detail) for v in report.violations)

    assert key(validate_resonance_free(permuted)) == key(validate_resonance_free(conn))
    assert validate_admissible(permuted).passed == validate_admissible(conn).passed


@pytest.mark.parametrize("seed", range(8))
def test_resonance_report_invariant_under_diagonal_conjugation(seed):
    rng = random.Random(100 + seed)
    conn = random_connection(rng, 3, 2, (1, 2))
    d = Matrix.diagonal([g(rng.choice([1, 2, -3, F(1, 2)])) for _ in range(3)])
    d_inv = d.inverse()
    sings = [
        RegularSingularity(
            s.point, d_inv @ s.residue @ d, [EigenDatum(e.value, e.weight, d_inv.apply(e.vector)) for e in s.eigen]
        )
        for s in conn.regular_singularities
    ]
    conj = ParabolicConnection(3, sings, conn.irregular)
    assert validate_resonance_free(conj).violations == validate_resonance_free(conn).violations
    assert validate_admissible(conj).passed == validate_admissible(conn).passed
