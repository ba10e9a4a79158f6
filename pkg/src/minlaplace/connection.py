"""Parabolic connections on the trivial bundle over P^1.

A connection is ``d + (A + sum_j A^j/(x - p_j)) dx`` with semi-simple
residues ``A^j`` at finite points and a Poincare rank 1 pole at infinity
with diagonal leading term ``A``.  ``C`` is the formal residue at
infinity in the coordinate ``w = 1/x``; on the trivial bundle this forces
``blockdiag(sum_j A^j) == -C``, which is checked on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exact import ZERO, GaussianRational, format_fraction, parse_fraction, to_gaussian
from .linalg import Matrix, rank as matrix_rank

__all__ = [
    "InvalidConnectionError",
    "UnsupportedSubdatumError",
    "EigenDatum",
    "RegularSingularity",
    "IrregularData",
    "ParabolicConnection",
    "Violation",
    "ValidationReport",
    "validate_resonance_free",
    "validate_admissible",
    "resonance_violations",
    "parabolic_degree",
    "dmodule_degrees",
    "spectral_degrees",
    "extend_filtration",
    "slope_of_subdata",
]


class InvalidConnectionError(ValueError):
    """Raised when input data is not a well-formed parabolic connection."""


class UnsupportedSubdatumError(ValueError):
    pass


def _weight(w) -> Fraction:
    w = parse_fraction(w) if isinstance(w, str) else Fraction(w)
    if not 0 <= w < 1:
        raise InvalidConnectionError(f"parabolic weight {format_fraction(w)} not in [0,1)")
    return w


@dataclass(frozen=True)
class EigenDatum:
    value: GaussianRational
    weight: Fraction
    vector: tuple

    def __post_init__(self):
        object.__setattr__(self, "value", to_gaussian(self.value))
        object.__setattr__(self, "weight", _weight(self.weight))
        object.__setattr__(self, "vector", tuple(to_gaussian(x) for x in self.vector))


@dataclass(frozen=True)
class RegularSingularity:
    """Logarithmic pole at ``point`` with semi-simple residue."""

    point: GaussianRational
    residue: Matrix
    eigen: tuple[EigenDatum, ...]

    def __post_init__(self):
        object.__setattr__(self, "point", to_gaussian(self.point))
        object.__setattr__(self, "eigen", tuple(self.eigen))
        r = self.residue.nrows
        if not self.residue.is_square():
            raise InvalidConnectionError("residue matrix must be square")
        if len(self.eigen) != r:
            raise InvalidConnectionError(
                f"residue at {self.point}: {len(self.eigen)} eigenvectors for rank {r}"
            )
        for e in self.eigen:
            if len(e.vector) != r:
                raise InvalidConnectionError(f"residue at {self.point}: eigenvector of wrong length")
            image = self.residue.apply(e.vector)
            if any(a != e.value * b for a, b in zip(image, e.vector)):
                raise InvalidConnectionError(
                    f"residue at {self.point}: vector {[str(x) for x in e.vector]} "
                    f"is not an eigenvector for {e.value}"
                )
        if r and matrix_rank(self.eigenbasis) != r:
            raise InvalidConnectionError(
                f"residue at {self.point}: eigenvectors do not form a basis (not semi-simple?)"
            )

    @property
    def eigenbasis(self) -> Matrix:
        return Matrix.from_columns([e.vector for e in self.eigen], self.residue.nrows)

    @property
    def zero_multiplicity(self) -> int:
        return sum(1 for e in self.eigen if not e.value)

    @property
    def nonzero(self) -> tuple[EigenDatum, ...]:
        return tuple(e for e in self.eigen if e.value)


@dataclass(frozen=True)
class IrregularData:
    """Formal data at infinity.

    ``leading`` is the diagonal of ``A``; ``boundaries`` are the block
    boundaries ``0 = a_1 < ... < a_{n'+1} = r``; ``residue`` is the
    diagonal of ``C`` and ``weights`` the parabolic weights there.
    """

    leading: tuple[GaussianRational, ...]
    boundaries: tuple[int, ...]
    residue: tuple[GaussianRational, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "leading", tuple(to_gaussian(x) for x in self.leading))
        object.__setattr__(self, "residue", tuple(to_gaussian(x) for x in self.residue))
        object.__setattr__(self, "weights", tuple(_weight(w) for w in self.weights))
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        r = len(self.leading)
        if len(self.residue) != r or len(self.weights) != r:
            raise InvalidConnectionError("A, C and the weights at infinity must have the same size")
        b = self.boundaries
        if r == 0:
            if b not in ((), (0,)):
                raise InvalidConnectionError("block boundaries given for an empty connection")
            return
        if len(b) < 2 or b[0] != 0 or b[-1] != r or any(x >= y for x, y in zip(b, b[1:])):
            raise InvalidConnectionError(f"bad block boundaries {list(b)} for rank {r}")
        for lo, hi in zip(b, b[1:]):
            if any(self.leading[k] != self.leading[lo] for k in range(lo, hi)):
                raise InvalidConnectionError(f"A is not constant on block {lo + 1}..{hi}")
        values = [self.leading[lo] for lo in b[:-1]]
        if len(set(values)) != len(values):
            raise InvalidConnectionError("eigenvalues of A on distinct blocks must be distinct")

    @property
    def rank(self) -> int:
        return len(self.leading)

    @property
    def blocks(self) -> list[tuple[GaussianRational, range]]:
        """``(xi_l, index range)`` for each eigenblock of ``A``."""
        b = self.boundaries
        return [(self.leading[lo], range(lo, hi)) for lo, hi in zip(b, b[1:])]

    @property
    def points(self) -> tuple[GaussianRational, ...]:
        return tuple(xi for xi, _ in self.blocks)


@dataclass(frozen=True)
class ParabolicConnection:
    rank: int
    regular_singularities: tuple[RegularSingularity, ...]
    irregular: IrregularData
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "regular_singularities", tuple(self.regular_singularities))
        r = self.rank
        if r < 0:
            raise InvalidConnectionError("rank must be non-negative")
        if self.irregular.rank != r:
            raise InvalidConnectionError(f"data at infinity has size {self.irregular.rank}, rank is {r}")
        for s in self.regular_singularities:
            if s.residue.nrows != r:
                raise InvalidConnectionError(f"residue at {s.point} has size {s.residue.nrows}, rank is {r}")
        pts = self.points
        if len(set(pts)) != len(pts):
            raise InvalidConnectionError("singular points must be pairwise distinct")
        total = self.residue_sum()
        for xi, idx in self.irregular.blocks:
            for a in idx:
                for b in idx:
                    want = -self.irregular.residue[a] if a == b else ZERO
                    if total[a, b] != want:
                        raise InvalidConnectionError(
                            f"block of A for eigenvalue {xi}: entry ({a + 1},{b + 1}) of "
                            f"sum_j A^j is {total[a, b]}, expected {want} (= -C)"
                        )
        trace = sum((s.residue.diagonal_entries()[k] for s in self.regular_singularities for k in range(r)), ZERO)
        assert trace + sum(self.irregular.residue, ZERO) == 0

    @property
    def points(self) -> tuple[GaussianRational, ...]:
        return tuple(s.point for s in self.regular_singularities)

    @property
    def leading_matrix(self) -> Matrix:
        return Matrix.diagonal(self.irregular.leading)

    @property
    def formal_residue(self) -> Matrix:
        return Matrix.diagonal(self.irregular.residue)

    def residue_sum(self) -> Matrix:
        total = Matrix.zeros(self.rank, self.rank)
        for s in self.regular_singularities:
            total = total + s.residue
        return total

    def transformed_rank(self) -> int:
        return sum(self.rank - s.zero_multiplicity for s in self.regular_singularities)

    def spectra(self) -> list[tuple[str, list[tuple[GaussianRational, Fraction]]]]:
        """``(label, [(eigenvalue, weight), ...])`` for every singularity."""
        out = [(f"p{j + 1}", [(e.value, e.weight) for e in s.eigen]) for j, s in enumerate(self.regular_singularities)]
        out.append(("infinity", list(zip(self.irregular.residue, self.irregular.weights))))
        return out


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    where: str
    clause: str
    detail: str

    def __str__(self) -> str:
        return f"{self.where}: {self.clause}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    check: str
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def at_finite_points(self) -> ValidationReport:
        return ValidationReport(self.check, tuple(v for v in self.violations if v.where != "infinity"))

    def __add__(self, other: ValidationReport) -> ValidationReport:
        return ValidationReport(f"{self.check}+{other.check}", self.violations + other.violations)

    def lines(self) -> list[str]:
        if self.passed:
            return [f"{self.check}: pass"]
        return [f"{self.check}: fail: {v}" for v in self.violations]


def _integer_real_part(z: GaussianRational) -> bool:
    return z.re.denominator == 1


def _nonzero_integer(z: GaussianRational) -> bool:
    return bool(z) and z.is_integer()


def resonance_violations(
    finite: Sequence[tuple[str, Sequence[tuple[GaussianRational, Fraction]]]],
    infinity_blocks: Sequence[Sequence[tuple[GaussianRational, Fraction]]],
) -> list[Violation]:
    """Resonance clauses on raw spectral data.

    At finite points only the non-zero eigenvalues are constrained; at
    infinity every eigenvalue is, and differences only within a block.
    """
    out: list[Violation] = []

    def single(where, mu, beta):
        if _integer_real_part(mu):
            out.append(Violation(where, "Re(mu) in Z", f"mu = {mu}"))
        if mu == beta:
            out.append(Violation(where, "mu = beta", f"mu = beta = {mu}"))

    def pairs(where, values):
        for a in range(len(values)):
            for b in range(a + 1, len(values)):
                d = values[a] - values[b]
                if _nonzero_integer(d):
                    out.append(
                        Violation(where, "mu_k - mu_m in Z\\{0}", f"{values[a]} - {values[b]} = {d}")
                    )

    for where, spec in finite:
        nz = [(mu, beta) for mu, beta in spec if mu]
        for mu, beta in nz:
            single(where, mu, beta)
        pairs(where, [mu for mu, _ in nz])
    for block in infinity_blocks:
        for mu, beta in block:
            single("infinity", mu, beta)
        pairs("infinity", [mu for mu, _ in block])
    return out


def validate_resonance_free(conn: ParabolicConnection) -> ValidationReport:
    finite = conn.spectra()[:-1]
    irr = conn.irregular
    blocks = [[(irr.residue[k], irr.weights[k]) for k in idx] for _, idx in irr.blocks]
    return ValidationReport("resonance-free", tuple(resonance_violations(finite, blocks)))


def validate_admissible(conn: ParabolicConnection) -> ValidationReport:
    """Zero-eigenvectors of every finite residue must carry weight 0."""
    out = []
    for j, s in enumerate(conn.regular_singularities):
        for k, e in enumerate(s.eigen):
            if not e.value and e.weight:
                out.append(
                    Violation(
                        f"p{j + 1}",
                        "0-eigenspace not in gr^0",
                        f"eigenvector {k + 1} has eigenvalue 0 and weight {format_fraction(e.weight)}",
                    )
                )
    return ValidationReport("admissible", tuple(out))


# ---------------------------------------------------------------------------
# degrees


def parabolic_degree(conn: ParabolicConnection) -> Fraction:
    """``deg(E) + sum of all weights``; ``deg(E) = 0`` on the trivial bundle."""
    return sum((beta for _, spec in conn.spectra() for _, beta in spec), Fraction(0))


def spectral_degrees(
    spectra: Iterable[Sequence[tuple[GaussianRational, Fraction]]], rank: int
) -> tuple[GaussianRational, GaussianRational, Optional[GaussianRational]]:
    """``(deg, pdeg, slope)`` from the lattice eigenvalues and weights.

    ``deg = -sum(alpha)`` over all eigenvalues at all singularities and
    ``pdeg = deg + sum(beta)``.  ``slope`` is ``None`` for rank 0.
    """
    deg = ZERO
    weights = Fraction(0)
    for spec in spectra:
        for mu, beta in spec:
            deg = deg - mu
            weights += beta
    pdeg = deg + weights
    slope = pdeg / rank if rank else None
    return deg, pdeg, slope


def dmodule_degrees(conn: ParabolicConnection):
    return spectral_degrees((spec for _, spec in conn.spectra()), conn.rank)


def extend_filtration(alpha, base: tuple, n: int) -> tuple[GaussianRational, Fraction]:
    """Transport ``(mu, beta)`` to ``alpha = mu + n`` along ``(x-p)^n``."""
    alpha = to_gaussian(alpha)
    mu, beta = to_gaussian(base[0]), Fraction(base[1])
    shift = alpha - mu
    if not shift.is_integer():
        raise ValueError(f"{alpha} - {mu} is not an integer; no transport exists")
    if shift != n:
        raise ValueError(f"alpha - mu = {shift} but N = {n}")
    return alpha, beta + n


SubSpec = Mapping[Union[int, str], Sequence]


def _select_eigen(vectors: Sequence, eigen: Sequence[tuple], where: str) -> list[int]:
    """Indices of the eigenvectors spanning the same space as ``vectors``."""
    if all(isinstance(v, int) for v in vectors):
        idx = sorted(set(vectors))
        if any(not 0 <= k < len(eigen) for k in idx):
            raise UnsupportedSubdatumError(f"{where}: eigenvector index out of range")
        return idx
    vecs = [tuple(to_gaussian(x) for x in v) for v in vectors]
    dim = matrix_rank(Matrix(vecs)) if vecs else 0
    chosen = []
    for k, (_, _, ev) in enumerate(eigen):
        if matrix_rank(Matrix(vecs + [ev])) == dim:
            chosen.append(k)
    if len(chosen) != dim:
        raise UnsupportedSubdatumError(f"{where}: subspace is not spanned by eigenvectors")
    return chosen


def slope_of_subdata(conn: ParabolicConnection, sub: SubSpec) -> GaussianRational:
    """Parabolic slope of an eigenvector-spanned sub-datum.

    ``sub`` maps each finite singularity index ``j`` (0-based) and the key
    ``"infinity"`` to either eigenvector indices or spanning vectors.  The
    induced filtration on a span of eigenvectors is the restriction, so
    the slope is computed with the chosen eigenvalues and weights.
    """
    r = conn.rank
    unit = [tuple(1 if i == k else 0 for i in range(r)) for k in range(r)]
    sites = [
        (j, f"p{j + 1}", [(e.value, e.weight, e.vector) for e in s.eigen])
        for j, s in enumerate(conn.regular_singularities)
    ]
    irr = conn.irregular
    sites.append(("infinity", "infinity", [(irr.residue[k], irr.weights[k], unit[k]) for k in range(r)]))
    missing = [label for key, label, _ in sites if key not in sub]
    if missing:
        raise UnsupportedSubdatumError(f"sub-datum does not specify {', '.join(missing)}")
    chosen_spectra = []
    dims = set()
    for key, label, eigen in sites:
        idx = _select_eigen(sub[key], eigen, label)
        dims.add(len(idx))
        chosen_spectra.append([(eigen[k][0], eigen[k][1]) for k in idx])
    if len(dims) != 1:
        raise UnsupportedSubdatumError("sub-datum has different dimensions at different singularities")
    sub_rank = dims.pop()
    if sub_rank == 0:
        raise UnsupportedSubdatumError("the zero sub-datum is not a nontrivial subbundle")
    return spectral_degrees(chosen_spectra, sub_rank)[2]
