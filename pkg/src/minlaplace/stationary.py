"""Stationary-phase prediction of the transform's singularity data.

The prediction only reads the input data: the spectrum at ``xi_l`` is the
block ``l`` of ``(mu^inf, beta^inf)`` padded with weight-0 zeros, and at
infinity the leading term is ``diag(p_j)`` with residue spectrum
``{mu^j_k}`` carrying the weights ``beta^j_k``.  The checks compare this
with what :mod:`minlaplace.laplace` actually computes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    parabolic_degree,
    resonance_violations,
    spectral_degrees,
    validate_admissible,
    validate_resonance_free,
)
from .exact import ZERO, GaussianRational, Poly
from .laplace import (
    ReductionError,
    TransformedConnection,
    build_model,
    formal_data_at_infinity,
    inverse_transform,
    reflect,
    residue_data_at,
    transform_connection,
)
from .linalg import Matrix, charpoly, kernel_basis, split_roots

__all__ = [
    "HarvestError",
    "PredictedData",
    "CheckItem",
    "ComparisonReport",
    "predict",
    "verify_stationary_phase",
    "harvest",
    "verify_involution",
]

Spectrum = tuple[tuple[GaussianRational, Fraction], ...]


class HarvestError(ValueError):
    """The computed transform cannot be read back as a connection datum."""


@dataclass(frozen=True)
class PredictedData:
    regular: tuple[tuple[GaussianRational, Spectrum], ...]
    infinity_blocks: tuple[tuple[GaussianRational, Spectrum], ...]
    rank: int
    deg: GaussianRational
    pdeg: GaussianRational
    lambdas: tuple[tuple[tuple[int, int], GaussianRational], ...] = ()

    @property
    def regular_points(self) -> tuple[GaussianRational, ...]:
        return tuple(xi for xi, _ in self.regular)

    @property
    def infinity_leading(self) -> tuple[GaussianRational, ...]:
        return tuple(p for p, spec in self.infinity_blocks for _ in spec)

    @property
    def infinity_residue(self) -> Spectrum:
        return tuple(pair for _, spec in self.infinity_blocks for pair in spec)

    def spectrum_at(self, xi) -> Spectrum:
        for point, spec in self.regular:
            if point == xi:
                return spec
        raise KeyError(xi)

    def resonance_report(self):
        """Resonance clauses applied to the predicted transform data."""
        finite = [(f"xi{n + 1}", spec) for n, (_, spec) in enumerate(self.regular)]
        return resonance_violations(finite, [spec for _, spec in self.infinity_blocks])


def _require(conn: ParabolicConnection) -> None:
    report = validate_resonance_free(conn).at_finite_points() + validate_admissible(conn)
    if not report.passed:
        raise InvalidConnectionError("; ".join(str(v) for v in report.violations))


def predict(conn: ParabolicConnection) -> PredictedData:
    _require(conn)
    rank = conn.transformed_rank()
    irr = conn.irregular
    regular = []
    if rank:
        for xi, idx in irr.blocks:
            nonzero = [(irr.residue[k], irr.weights[k]) for k in idx if irr.residue[k]]
            zeros = [(ZERO, Fraction(0))] * (rank - len(nonzero))
            regular.append((xi, tuple(zeros + nonzero)))
    blocks = []
    lambdas = []
    for j, s in enumerate(conn.regular_singularities):
        spec = tuple((e.value, e.weight) for e in s.eigen if e.value)
        if spec:
            blocks.append((s.point, spec))
        for k, e in enumerate(s.eigen):
            if e.value:
                lambdas.append(((j, k), (e.value - e.weight) / 2))
    spectra = [spec for _, spec in regular] + [spec for _, spec in blocks]
    deg, pdeg, _ = spectral_degrees(spectra, rank)
    return PredictedData(tuple(regular), tuple(blocks), rank, deg, pdeg, tuple(lambdas))


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return f"{self.name}: {verdict}" + (f" ({self.detail})" if self.detail else "")


@dataclass(frozen=True)
class ComparisonReport:
    title: str
    items: tuple[CheckItem, ...]
    convention: str = ""

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def __bool__(self) -> bool:
        return self.passed

    def lines(self) -> list[str]:
        out = [item.line() for item in self.items]
        if self.convention:
            out.append(f"convention: {self.convention}")
        return out


def _fmt(values) -> str:
    return "[" + ", ".join(str(v) for v in values) + "]"


def _mod_z(z: GaussianRational) -> tuple:
    return (z.re - (z.re.numerator // z.re.denominator), z.im)


def _spectra_match(computed: Sequence[GaussianRational], predicted: Sequence[GaussianRational], sign: int):
    """``(exact, modulo_Z)`` equality of multisets under ``sign``."""
    target = [sign * v for v in predicted]
    exact = Counter(computed) == Counter(target)
    mod = Counter(map(_mod_z, computed)) == Counter(map(_mod_z, target))
    return exact, mod


def _block_diagonal(m: Matrix, keys: Sequence) -> Matrix:
    n = m.nrows
    return Matrix([[m[a, b] if keys[a] == keys[b] else ZERO for b in range(n)] for a in range(n)], n)


def _poly_from_roots(roots) -> Poly:
    p = Poly((1,))
    for z in roots:
        p = p * Poly((-z, 1))
    return p


def verify_stationary_phase(pred: PredictedData, t: TransformedConnection) -> ComparisonReport:
    items = [
        CheckItem("rank", t.rank == pred.rank, f"computed {t.rank}, predicted {pred.rank}")
    ]
    if t.rank == 0:
        items.append(CheckItem("poles", not pred.regular, "empty transform"))
        return ComparisonReport("stationary phase", tuple(items), "vacuous")
    try:
        const, terms = t.partial_fractions()
        confined = True
    except ReductionError:
        const, terms, confined = None, [], False
    poles = [xl for xl, _ in terms]
    items.append(
        CheckItem(
            "poles",
            confined and Counter(poles) == Counter(pred.regular_points),
            f"computed {_fmt(poles)}, predicted {_fmt(pred.regular_points)}"
            + ("" if confined else "; X has poles outside {xi_l} or of higher order"),
        )
    )
    a_hat, c_hat = formal_data_at_infinity(t)
    lead = list(pred.infinity_leading)
    items.append(
        CheckItem(
            "infinity leading term",
            a_hat == Matrix.diagonal(lead),
            f"Ahat diagonal {_fmt(a_hat.diagonal_entries())}, predicted {_fmt(lead)}",
        )
    )
    diag = a_hat.diagonal_entries()
    c_block = _block_diagonal(c_hat, diag)
    mismatched = []
    for p, spec in pred.infinity_blocks:
        idx = [a for a, d in enumerate(diag) if d == p]
        if charpoly(c_hat.block(idx, idx)) != _poly_from_roots([mu for mu, _ in spec]):
            mismatched.append(p)
    whole = charpoly(c_block) == _poly_from_roots([mu for mu, _ in pred.infinity_residue])
    items.append(
        CheckItem(
            "infinity residue",
            whole and not mismatched,
            "charpoly of block-diagonal Chat is prod(lam - mu^j_k) on every block"
            if whole and not mismatched
            else f"charpoly differs on the blocks for p in {_fmt(mismatched)}",
        )
    )
    conventions = (("identity", 1), ("negated", -1))
    residue_spectra = {}
    for xl in pred.regular_points:
        data = residue_data_at(t, xl)
        residue_spectra[xl] = data
    chosen = None
    for name, sign in conventions:
        all_exact, all_mod = True, True
        for xl, data in residue_spectra.items():
            predicted = [mu for mu, _ in pred.spectrum_at(xl)]
            if data.eigenvalues is None:
                exact = sign == 1 and data.charpoly == _poly_from_roots(predicted)
                mod = exact
            else:
                exact, mod = _spectra_match(data.eigenvalues, predicted, sign)
            all_exact &= exact
            all_mod &= mod
        if all_mod:
            chosen = (name, sign, all_exact)
            break
    name, sign, exact = chosen if chosen else ("identity", 1, False)
    for xl, data in residue_spectra.items():
        predicted = [mu for mu, _ in pred.spectrum_at(xl)]
        shown = data.eigenvalues if data.eigenvalues is not None else [f"roots of {data.charpoly.to_str('lam')}"]
        if data.eigenvalues is None:
            ok = sign == 1 and data.charpoly == _poly_from_roots(predicted)
        else:
            ok = _spectra_match(data.eigenvalues, predicted, sign)[1]
        items.append(
            CheckItem(f"residue at {xl}", ok, f"computed {_fmt(shown)}, predicted {_fmt(predicted)}")
        )
    convention = f"residue at xi_l = {'' if sign == 1 else '-'}mu^inf" + (
        " exactly" if exact else " modulo Z"
    )
    collisions = _collisions(pred)
    if collisions:
        convention += f"; mu^inf values shared across blocks mod Z: {_fmt(collisions)}"
    return ComparisonReport("stationary phase", tuple(items), convention)


def _collisions(pred: PredictedData) -> list[str]:
    seen: dict = {}
    for xl, spec in pred.regular:
        for mu, _ in spec:
            if mu:
                seen.setdefault(_mod_z(mu), set()).add(xl)
    return sorted(
        f"{Fraction(k[0])}+{Fraction(k[1])}*i" if k[1] else str(Fraction(k[0]))
        for k, pts in seen.items()
        if len(pts) > 1
    )


# ---------------------------------------------------------------------------
# harvesting and the involution


def _eigen_data(b: Matrix, spectrum: Spectrum, where: str) -> list[EigenDatum]:
    cp = charpoly(b)
    roots, rest = split_roots(cp)
    if rest.degree > 0:
        raise HarvestError(f"{where}: residue spectrum does not split over Q(i)")
    weights: dict = {}
    for mu, beta in spectrum:
        weights.setdefault(mu, []).append(beta)
    out = []
    for lam, mult in sorted(Counter(roots).items(), key=lambda kv: (bool(kv[0]), kv[0].re, kv[0].im)):
        vectors = kernel_basis(b.sub_identity(lam))
        if len(vectors) != mult:
            raise HarvestError(f"{where}: residue is not semi-simple at eigenvalue {lam}")
        if not lam:
            betas = [Fraction(0)] * mult
        elif len(weights.get(lam, ())) != mult:
            raise HarvestError(f"{where}: eigenvalue {lam} does not match the predicted spectrum")
        else:
            # a flag inside one eigenspace is not determined by the spectrum;
            # only the weight multiset is transported
            betas = sorted(weights[lam])
        out.extend(EigenDatum(lam, beta, v) for beta, v in zip(betas, vectors))
    return out


def harvest(t: TransformedConnection, pred: PredictedData, name: str = "") -> ParabolicConnection:
    """Read ``d - X dxi`` back as a connection datum on the xi-line.

    The parabolic weights are the ones transported by stationary phase.
    """
    n = t.rank
    if n == 0:
        return ParabolicConnection(0, (), IrregularData((), (), (), ()), name=name)
    try:
        const, terms = t.partial_fractions()
    except ReductionError as exc:
        raise HarvestError(str(exc)) from None
    if not const.is_diagonal():
        raise HarvestError("constant part of X is not diagonal")
    lead = [-c for c in const.diagonal_entries()]
    boundaries = [0] + [a for a in range(1, n) if lead[a] != lead[a - 1]] + [n]
    sings = []
    for xl, res in terms:
        b = -res
        sings.append(RegularSingularity(xl, b, _eigen_data(b, pred.spectrum_at(xl), f"xi = {xl}")))
    _, c_hat = formal_data_at_infinity(t)
    residue = []
    weights = []
    source = t.source.regular_singularities
    for a, (j, k) in enumerate(t.labels):
        e = source[j].eigen[k]
        if c_hat[a, a] != e.value:
            raise HarvestError(f"formal residue entry {a + 1} is {c_hat[a, a]}, expected {e.value}")
        residue.append(c_hat[a, a])
        weights.append(e.weight)
    try:
        return ParabolicConnection(n, sings, IrregularData(lead, boundaries, residue, weights), name=name)
    except InvalidConnectionError as exc:
        raise HarvestError(f"harvested datum is not a valid connection: {exc}") from None


def _signature(conn: ParabolicConnection):
    finite = {}
    for s in conn.regular_singularities:
        if s.nonzero:
            finite[s.point] = Counter((e.value, e.weight) for e in s.eigen)
    irr = conn.irregular
    infinity = Counter(
        (irr.leading[k], irr.residue[k], irr.weights[k]) for k in range(conn.rank)
    )
    return finite, infinity


def verify_involution(conn: ParabolicConnection) -> ComparisonReport:
    """Transform, read back, apply the inverse transform and compare."""
    title = "involution"
    items: list[CheckItem] = []
    valid = validate_resonance_free(conn) + validate_admissible(conn)
    if conn.rank == 0:
        return ComparisonReport(title, (CheckItem("empty connection", True, "vacuous"),), "vacuous")
    if not valid.passed:
        return ComparisonReport(
            title, (CheckItem("input validation", False, "; ".join(map(str, valid.violations))),)
        )
    pred = predict(conn)
    t = transform_connection(build_model(conn))
    try:
        hat = harvest(t, pred, name=f"{conn.name}^" if conn.name else "")
    except HarvestError as exc:
        return ComparisonReport(title, (CheckItem("harvest transform", False, str(exc)),))
    hat_valid = validate_resonance_free(hat) + validate_admissible(hat)
    items.append(
        CheckItem("transform-side datum validates", hat_valid.passed, "; ".join(map(str, hat_valid.violations)))
    )
    if not hat_valid.passed:
        return ComparisonReport(title, tuple(items))
    items.append(
        CheckItem(
            "pdeg of transform",
            parabolic_degree(hat) == parabolic_degree(conn),
            f"{parabolic_degree(hat)} vs {parabolic_degree(conn)}",
        )
    )
    flipped = reflect(hat)
    back_t = inverse_transform(hat)
    try:
        back = harvest(back_t, predict(flipped))
    except HarvestError as exc:
        items.append(CheckItem("harvest inverse transform", False, str(exc)))
        return ComparisonReport(title, tuple(items))
    items.append(CheckItem("rank", back.rank == conn.rank, f"recovered {back.rank}, original {conn.rank}"))
    fin0, inf0 = _signature(conn)
    fin1, inf1 = _signature(back)
    items.append(
        CheckItem(
            "points",
            set(fin1) == set(fin0),
            f"recovered {_fmt(sorted(fin1, key=lambda z: (z.re, z.im)))}, "
            f"original {_fmt(sorted(fin0, key=lambda z: (z.re, z.im)))}",
        )
    )
    for p in sorted(fin0, key=lambda z: (z.re, z.im)):
        got = fin1.get(p, Counter())
        items.append(
            CheckItem(
                f"eigenvalues and weights at {p}",
                got == fin0[p],
                _pairs(got) + " vs " + _pairs(fin0[p]),
            )
        )
    items.append(CheckItem("data at infinity", inf1 == inf0, "(xi_l, mu^inf, beta^inf) multisets"))
    items.append(
        CheckItem(
            "pdeg",
            parabolic_degree(back) == parabolic_degree(conn),
            f"{parabolic_degree(back)} vs {parabolic_degree(conn)}",
        )
    )
    return ComparisonReport(title, tuple(items), "residue eigenvalues compared exactly (identity)")


def _pairs(c: Counter) -> str:
    items = sorted(c.elements(), key=lambda mb: (mb[0].re, mb[0].im, mb[1]))
    return "[" + ", ".join(f"({mu}, {beta})" for mu, beta in items) + "]"
