from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from minlaplace.connection import EigenDatum, IrregularData, ParabolicConnection, RegularSingularity
from minlaplace.documents import load_connection
from minlaplace.exact import GaussianRational
from minlaplace.linalg import Matrix

# sympy oracles are slow; fixed seeds keep the suite reproducible
settings.register_profile("artifact", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("artifact")

CORPUS = Path(__file__).resolve().parents[1] / "src" / "minlaplace" / "corpus"


def corpus_paths():
    return sorted(CORPUS.glob("*.conn.json"))


def g(re, im=0):
    if isinstance(re, GaussianRational):
        return re + GaussianRational(Fraction(0), Fraction(im))
    return GaussianRational(Fraction(re), Fraction(im))


def diag_sing(point, values, weights, vectors=None):
    """Regular singularity with residue ``S diag(values) S^{-1}``, columns of S = vectors."""
    r = len(values)
    vectors = vectors or [tuple(1 if i == k else 0 for i in range(r)) for k in range(r)]
    s = Matrix.from_columns([[g(x) for x in v] for v in vectors], r)
    residue = s @ Matrix.diagonal([g(v) for v in values]) @ s.inverse()
    eigen = [EigenDatum(g(v), Fraction(w), tuple(g(x) for x in vec)) for v, w, vec in zip(values, weights, vectors)]
    return RegularSingularity(g(point), residue, eigen)


def rank_one(p=Fraction(1, 3), mu=Fraction(1, 2), beta=Fraction(1, 4), xi=2, beta_inf=Fraction(1, 3)):
    """``d + (xi + mu/(x-p)) dx``; compatibility forces ``mu^inf = -mu``."""
    return ParabolicConnection(
        1,
        [diag_sing(p, [mu], [beta])],
        IrregularData([g(xi)], [0, 1], [-g(mu)], [Fraction(beta_inf)]),
        name="rank1",
    )


@pytest.fixture
def rank1():
    return rank_one()


@pytest.fixture(params=[p.name for p in corpus_paths()])
def corpus_conn(request):
    return load_connection(CORPUS / request.param)
