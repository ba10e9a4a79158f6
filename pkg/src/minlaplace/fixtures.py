"""Seeded random generation of valid connection data.

Residues are built as ``S D S^{-1}`` with small Gaussian-rational spectra.
The block-diagonal part of their sum is then diagonalised by a
block-diagonal change of frame, which makes the compatibility condition at
infinity hold by construction.  Candidates failing resonance-freeness or
admissibility are discarded and redrawn.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    validate_admissible,
    validate_resonance_free,
)
from .exact import ZERO, GaussianRational
from .linalg import Matrix, kernel_basis, split_roots, charpoly

__all__ = ["random_connection", "random_gaussian", "hand_fixtures", "corpus", "write_corpus", "random_minimal_section"]

_DENOMS = (2, 3, 4, 5, 6, 7)


def random_gaussian(rng: random.Random, bound: int = 3, complex_part: bool = False) -> GaussianRational:
    re = Fraction(rng.randint(-bound, bound))
    im = Fraction(rng.randint(-1, 1)) if complex_part else Fraction(0)
    return GaussianRational(re, im)


def _eigenvalue(rng: random.Random, complex_part: bool) -> GaussianRational:
    d = rng.choice(_DENOMS)
    num = rng.choice([k for k in range(-2 * d + 1, 2 * d) if k % d])
    im = Fraction(rng.randint(-1, 1), rng.choice((1, 2))) if complex_part else Fraction(0)
    return GaussianRational(Fraction(num, d), im)


def _weight(rng: random.Random) -> Fraction:
    d = rng.choice(_DENOMS)
    return Fraction(rng.randrange(d), d)


def _unimodularish(rng: random.Random, r: int) -> Matrix:
    while True:
        m = Matrix([[rng.randint(-2, 2) for _ in range(r)] for _ in range(r)])
        if m.det():
            return m


def _unitriangular(rng: random.Random, r: int, boundaries: Optional[Sequence[int]] = None) -> Matrix:
    """Upper unitriangular; with ``boundaries`` only off-block entries are random."""
    block = {}
    if boundaries is not None:
        for l, (lo, hi) in enumerate(zip(boundaries, boundaries[1:])):
            block.update({k: l for k in range(lo, hi)})
    rows = []
    for a in range(r):
        row = []
        for b in range(r):
            if a == b:
                row.append(1)
            elif a < b and (boundaries is None or block[a] != block[b]):
                row.append(rng.randint(-2, 2))
            else:
                row.append(0)
        rows.append(row)
    return Matrix(rows, r)


def _residue(rng, r, zeros, complex_part, triangular=False):
    values = [ZERO] * zeros + [_eigenvalue(rng, complex_part) for _ in range(r - zeros)]
    rng.shuffle(values)
    s = _unitriangular(rng, r) if triangular else _unimodularish(rng, r)
    a = s @ Matrix.diagonal(values) @ s.inverse()
    return a, values, s.columns()


def _diagonalise_blocks(total: Matrix, boundaries: Sequence[int]) -> Optional[Matrix]:
    """Block-diagonal ``G`` with ``G^{-1} M_bb G`` diagonal, or ``None``."""
    r = total.nrows
    rows = [[ZERO] * r for _ in range(r)]
    for lo, hi in zip(boundaries, boundaries[1:]):
        idx = range(lo, hi)
        block = total.block(idx, idx)
        roots, rest = split_roots(charpoly(block))
        if rest.degree > 0:
            return None
        cols = []
        for lam in sorted(set(roots), key=lambda z: (z.re, z.im)):
            cols.extend(kernel_basis(block.sub_identity(lam)))
        if len(cols) != hi - lo:
            return None
        for c, vec in enumerate(cols):
            for a, x in enumerate(vec):
                rows[lo + a][lo + c] = x
    return Matrix(rows, r)


def random_connection(
    rng: random.Random,
    rank: int,
    n_points: int,
    block_sizes: Sequence[int],
    *,
    zero_dims: Optional[Sequence[int]] = None,
    complex_part: bool = False,
    max_tries: int = 500,
    name: str = "",
) -> ParabolicConnection:
    """A valid, resonance-free, admissible connection with the given shape."""
    if sum(block_sizes) != rank:
        raise ValueError("block sizes must add up to the rank")
    boundaries = [0]
    for b in block_sizes:
        boundaries.append(boundaries[-1] + b)
    for attempt in range(max_tries):
        # generic frames rarely give split blocks at larger rank
        triangular = max(block_sizes) > 1 and attempt % 2 == 1
        zeros = list(zero_dims) if zero_dims is not None else [rng.randrange(rank) for _ in range(n_points)]
        points: list[GaussianRational] = []
        while len(points) < n_points:
            p = random_gaussian(rng, 3, complex_part)
            if p not in points:
                points.append(p)
        residues = [_residue(rng, rank, z, complex_part, triangular) for z in zeros]
        if triangular:
            h = _unitriangular(rng, rank, boundaries)
            h_inv = h.inverse()
            residues = [(h_inv @ a @ h, values, [h_inv.apply(v) for v in vecs]) for a, values, vecs in residues]
        total = Matrix.zeros(rank, rank)
        for a, _, _ in residues:
            total = total + a
        g = _diagonalise_blocks(total, boundaries)
        if g is None:
            continue
        g_inv = g.inverse()
        sings = []
        for p, (a, values, vecs) in zip(points, residues):
            a2 = g_inv @ a @ g
            eigen = [
                EigenDatum(v, _weight(rng) if v else Fraction(0), g_inv.apply(vec))
                for v, vec in zip(values, vecs)
            ]
            sings.append(RegularSingularity(p, a2, eigen))
        total = g_inv @ total @ g
        leading: list[GaussianRational] = []
        while len(leading) < len(block_sizes):
            xi = random_gaussian(rng, 3, complex_part)
            if xi not in leading:
                leading.append(xi)
        lead = [leading[l] for l, b in enumerate(block_sizes) for _ in range(b)]
        residue = [-total[k, k] for k in range(rank)]
        weights = [_weight(rng) for _ in range(rank)]
        try:
            conn = ParabolicConnection(rank, sings, IrregularData(lead, boundaries, residue, weights), name=name)
        except InvalidConnectionError:
            continue
        if validate_resonance_free(conn).passed and validate_admissible(conn).passed:
            return conn
    raise RuntimeError(f"no valid connection of shape rank={rank}, n={n_points}, blocks={list(block_sizes)}")


def _small(rng: random.Random) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-3, 3), rng.randint(1, 3)))


def random_minimal_section(model, rng: random.Random):
    """A random section of the minimal extension.

    Built from polynomial sections and the cokernel basis by applying the
    connection and multiplication by ``x``, so every pole it has is one the
    D-module structure produces.
    """
    from .sections import MeromorphicSection

    pts, r = model.conn.points, model.rank
    s = MeromorphicSection.zero(pts, r)
    for _ in range(rng.randint(1, 3)):
        if model.transformed_rank and rng.random() < 0.4:
            piece = model.basis_section(rng.randrange(model.transformed_rank)).scale(_small(rng))
        else:
            piece = MeromorphicSection.monomial(pts, r, rng.randint(0, 2), [_small(rng) for _ in range(r)])
        for _ in range(rng.randint(0, 2)):
            piece = model.connection_derivative(piece)
        if rng.random() < 0.3:
            piece = piece.times_x()
        s = s + piece
    return s


# ---------------------------------------------------------------------------
# the stored corpus


def _diag_sing(point, values, weights, vectors=None) -> RegularSingularity:
    r = len(values)
    vectors = vectors or [tuple(1 if i == k else 0 for i in range(r)) for k in range(r)]
    cols = Matrix.from_columns(vectors, r)
    residue = cols @ Matrix.diagonal(values) @ cols.inverse()
    return RegularSingularity(point, residue, [EigenDatum(v, w, vec) for v, w, vec in zip(values, weights, vectors)])


def hand_fixtures() -> list[ParabolicConnection]:
    F = Fraction
    g = GaussianRational
    rank1 = ParabolicConnection(
        1,
        [_diag_sing(g(F(1, 3)), [g(F(1, 2))], [F(1, 4)])],
        IrregularData([g(2)], [0, 1], [g(F(-1, 2))], [F(1, 3)]),
        name="rank1",
    )
    two = ParabolicConnection(
        2,
        [
            _diag_sing(g(0), [ZERO, g(F(1, 3))], [F(0), F(1, 2)], [(0, 1), (1, 0)]),
            _diag_sing(g(1), [ZERO, g(F(1, 5))], [F(0), F(1, 7)], [(1, 0), (5, 1)]),
        ],
        IrregularData([g(2), g(3)], [0, 1, 2], [g(F(-1, 3)), g(F(-1, 5))], [F(1, 6), F(0)]),
        name="rank2_two_points",
    )
    gaussian = ParabolicConnection(
        1,
        [_diag_sing(g(F(1, 2), 1), [g(F(1, 3), F(1, 2))], [F(2, 5)])],
        IrregularData([g(0, -1)], [0, 1], [g(F(-1, 3), F(-1, 2))], [F(0)]),
        name="rank1_gaussian",
    )
    trivial = ParabolicConnection(
        2,
        [_diag_sing(g(1), [ZERO, ZERO], [F(0), F(0)]), _diag_sing(g(-1), [ZERO, ZERO], [F(0), F(0)])],
        IrregularData([g(1), g(2)], [0, 1, 2], [ZERO, ZERO], [F(0), F(0)]),
        name="all_residues_zero",
    )
    empty = ParabolicConnection(0, [], IrregularData([], [], [], []), name="empty")
    return [rank1, two, gaussian, trivial, empty]


# (name, seed, rank, n, blocks, zero_dims, complex)
RANDOM_SHAPES = (
    ("rank3_n2_blocks12", 3, 3, 2, (1, 2), None, False),
    ("rank3_single_block", 5, 3, 2, (3,), (1, 1), False),
    ("rank4_n3_gaussian", 7, 4, 3, (2, 1, 1), None, True),
    ("rank5_n4_blocks221", 11, 5, 4, (2, 2, 1), (3, 4, 3, 3), False),
    ("rank6_n5_blocks2211", 13, 6, 5, (2, 2, 1, 1), (4, 4, 3, 5, 4), True),
)


def corpus() -> list[ParabolicConnection]:
    out = hand_fixtures()
    for name, seed, rank, n, blocks, zeros, cplx in RANDOM_SHAPES:
        out.append(random_connection(random.Random(seed), rank, n, blocks, zero_dims=zeros, complex_part=cplx, name=name))
    return out


def write_corpus(directory) -> list:
    """Write every corpus fixture as ``<name>.conn.json``; returns the paths."""
    from pathlib import Path

    from .documents import dump_connection

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for conn in corpus():
        path = directory / f"{conn.name}.conn.json"
        path.write_text(dump_connection(conn), encoding="utf-8")
        paths.append(path)
    return paths


if __name__ == "__main__":
    import sys

    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else "corpus"):
        print(p)
