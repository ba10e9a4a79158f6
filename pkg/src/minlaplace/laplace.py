"""Minimal Laplace transform through the twisted de Rham complex.

On the trivial bundle the complex ``E -> F`` has ``H^0(E) = C^r`` and
``H^0(F)`` spanned by ``c dx`` and ``r_j/(x-p_j) dx`` with ``r_j`` in
``im(A^j)``.  For ``xi`` away from the eigenvalues of ``A`` the map
``v -> (A - xi) v dx + sum_j A^j v/(x - p_j) dx`` is injective and its
cokernel has the basis ``[e_{j,k}/(x-p_j) dx]`` over the non-zero
eigenvectors.  Multiplication by ``x`` on that cokernel is ``X(xi)``; the
transformed connection is ``d - X(xi) dxi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Union

from .connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    validate_admissible,
    validate_resonance_free,
)
from .exact import INFINITY, ONE, XI, ZERO, GaussianRational, Poly, RationalFunction, laurent_coefficients, to_gaussian
from .linalg import Matrix, charpoly, kernel_basis, rank as matrix_rank, solve_linear, split_roots
from .sections import MeromorphicSection

__all__ = [
    "ReductionError",
    "NotInMinimalExtensionError",
    "GlobalSectionModel",
    "Reduction",
    "FiberCokernel",
    "TransformedConnection",
    "ResidueData",
    "build_model",
    "reduce_section",
    "fiber_cokernel",
    "transform_connection",
    "residue_data_at",
    "formal_data_at_infinity",
    "reflect",
    "inverse_transform",
]

Scalar = Union[GaussianRational, RationalFunction]


class ReductionError(RuntimeError):
    """A solve that resonance-freeness should guarantee has failed."""


class NotInMinimalExtensionError(ValueError):
    """The section has a residue component along a 0-eigenvector."""


@dataclass(frozen=True)
class GlobalSectionModel:
    conn: ParabolicConnection
    labels: tuple[tuple[int, int], ...]

    @property
    def rank(self) -> int:
        return self.conn.rank

    @property
    def transformed_rank(self) -> int:
        return len(self.labels)

    @property
    def h0f_dimension(self) -> int:
        return self.rank + len(self.labels)

    @cached_property
    def basis_vectors(self) -> tuple[tuple, ...]:
        sing = self.conn.regular_singularities
        return tuple(sing[j].eigen[k].vector for j, k in self.labels)

    @cached_property
    def _dual(self) -> tuple[Matrix, ...]:
        return tuple(s.eigenbasis.inverse() for s in self.conn.regular_singularities)

    @cached_property
    def _label_index(self) -> dict:
        return {lab: n for n, lab in enumerate(self.labels)}

    def eigen_coordinates(self, j: int, v: Sequence) -> tuple:
        return self._dual[j].apply(v)

    def residue_class(self, j: int, v: Sequence) -> dict[int, Scalar]:
        """Cokernel coordinates of ``v/(x - p_j) dx``; ``v`` must lie in ``im(A^j)``."""
        coords = self.eigen_coordinates(j, v)
        out = {}
        for k, (e, c) in enumerate(zip(self.conn.regular_singularities[j].eigen, coords)):
            if not c:
                continue
            if not e.value:
                raise NotInMinimalExtensionError(
                    f"residue at p{j + 1} has a component along the 0-eigenvector {k + 1}"
                )
            out[self._label_index[(j, k)]] = c
        return out

    @cached_property
    def _pole_inverses(self) -> dict:
        return {}

    def pole_solver(self, j: int, m: int) -> Matrix:
        """``(A^j - m Id)^{-1}``, the graded piece of ``(d_x - xi)`` at order ``m``."""
        key = (j, m)
        cache = self._pole_inverses
        if key not in cache:
            try:
                cache[key] = self.conn.regular_singularities[j].residue.sub_identity(m).inverse()
            except ZeroDivisionError:
                raise ReductionError(
                    f"res(nabla, p{j + 1}) - {m}*Id is singular; pole of order {m + 1} cannot be reduced"
                ) from None
        return cache[key]

    def twisted_derivative(self, s: MeromorphicSection, xi: Scalar = XI) -> MeromorphicSection:
        """``(d_x - xi) s = s' + (A - xi) s + sum_j A^j s/(x - p_j)``."""
        shifted = [a - xi for a in self.conn.irregular.leading]
        out = s.derivative() + s.apply_diagonal(shifted)
        for j, sing in enumerate(self.conn.regular_singularities):
            if not sing.residue.is_zero():
                out = out + s.apply_matrix(sing.residue).divide_by_linear(j)
        return out

    def connection_derivative(self, s: MeromorphicSection) -> MeromorphicSection:
        """Untwisted ``nabla_{d/dx}``."""
        return self.twisted_derivative(s, ZERO)

    def nabla_matrix(self, xi: Scalar) -> Matrix:
        """``nabla_xi : C^r -> H^0(F)`` in the coordinates (constant part, cokernel labels)."""
        r = self.rank
        rows = []
        lead = self.conn.irregular.leading
        for a in range(r):
            rows.append([(lead[a] - xi) if a == b else ZERO for b in range(r)])
        for j, k in self.labels:
            mu = self.conn.regular_singularities[j].eigen[k].value
            rows.append([mu * x for x in self._dual[j].rows[k]])
        return Matrix(rows, r)

    def h0f_coordinates(self, s: MeromorphicSection) -> tuple:
        """Coordinates of a section of ``F`` (constant plus simple poles)."""
        if s.degree > 0 or any(s.pole_order(j) > 1 for j in range(len(s.points))):
            raise ValueError("section is not in H^0(F)")
        const = s.poly[0] if s.poly else (ZERO,) * self.rank
        res = [ZERO] * len(self.labels)
        for j in range(len(s.points)):
            for n, c in self.residue_class(j, s.residue(j)).items():
                res[n] = c
        return tuple(const) + tuple(res)

    def basis_section(self, n: int) -> MeromorphicSection:
        j, _ = self.labels[n]
        return MeromorphicSection.pole_term(self.conn.points, self.rank, j, 1, self.basis_vectors[n])


def build_model(conn: ParabolicConnection) -> GlobalSectionModel:
    """Global sections of ``F`` for a connection in trivial-bundle normal form.

    The finite-point resonance clauses and admissibility are required (they
    are what the reduction uses); clauses at infinity only matter for the
    comparison with stationary phase and are not enforced here.
    """
    report = validate_resonance_free(conn).at_finite_points() + validate_admissible(conn)
    if not report.passed:
        raise InvalidConnectionError("; ".join(str(v) for v in report.violations))
    labels = []
    for j, s in enumerate(conn.regular_singularities):
        if matrix_rank(s.residue) != conn.rank - s.zero_multiplicity:
            raise InvalidConnectionError(f"rank of the residue at p{j + 1} disagrees with its spectrum")
        labels.extend((j, k) for k, e in enumerate(s.eigen) if e.value)
    return GlobalSectionModel(conn, tuple(labels))


_POLY_XI = Poly((ZERO, ONE))


def _working_xi(xi: Scalar):
    """``xi`` as used inside a reduction: the symbol becomes a polynomial."""
    if isinstance(xi, RationalFunction):
        if xi == XI:
            return _POLY_XI
        if xi.is_constant():
            return xi.constant_value()
        raise ValueError("only the symbol xi or a point of Q(i) can be used")
    return to_gaussian(xi)


@dataclass(frozen=True)
class Reduction:
    """``scale * s = (d_x - xi) correction + sum_n numerators[n] * basis_n``.

    For symbolic ``xi`` the work is done in Q(i)[xi]: ``scale`` is a
    product of factors ``(a - xi)`` over eigenvalues ``a`` of ``A`` and
    ``coordinates = numerators / scale`` in lowest terms.  For a numeric
    ``xi`` the scale is 1.
    """

    coordinates: tuple
    correction: MeromorphicSection
    numerators: tuple = ()
    scale: Union[GaussianRational, Poly] = ONE

    def certificate_holds(self, model: GlobalSectionModel, s: MeromorphicSection, xi: Scalar = XI) -> bool:
        w = _working_xi(xi)
        rebuilt = model.twisted_derivative(self.correction, w)
        for n, c in enumerate(self.numerators or self.coordinates):
            if c:
                rebuilt = rebuilt + model.basis_section(n).scale(c)
        return rebuilt == s.scale(self.scale)


def reduce_section(model: GlobalSectionModel, s: MeromorphicSection, xi: Scalar = XI) -> Reduction:
    """Class of ``s dx`` in ``coker(d_x - xi)`` in the basis ``[e_{j,k}/(x-p_j) dx]``."""
    conn = model.conn
    if s.points != conn.points or s.rank != conn.rank:
        raise ValueError("section does not match the connection's poles and rank")
    w = _working_xi(xi)
    symbolic = isinstance(w, Poly)
    lead = conn.irregular.leading
    if not symbolic and w in lead:
        raise ValueError(f"xi = {w} is an eigenvalue of A; the cokernel model degenerates there")
    work = s
    correction = MeromorphicSection.zero(conn.points, conn.rank)
    scale: Union[GaussianRational, Poly] = ONE
    roots: dict = {}

    def subtract(piece: MeromorphicSection):
        nonlocal work, correction
        correction = correction + piece
        work = work - model.twisted_derivative(piece, w)

    # poles of order m+1 >= 2: leading coefficient of (d_x - xi)(t (x-p)^{-m}) is (A^j - m) t
    for j in range(len(conn.points)):
        while work.pole_order(j) >= 2:
            m = work.pole_order(j) - 1
            t = model.pole_solver(j, m).apply(work.poles[j][m])
            subtract(MeromorphicSection.pole_term(conn.points, conn.rank, j, m, t))

    # polynomial part: leading coefficient of (d_x - xi)(x^k t) is (A - xi) t
    while work.poly:
        k = work.degree
        top = work.poly[k]
        if symbolic:
            # clear the denominators (a - xi) first so everything stays polynomial
            needed = sorted({lead[i] for i, c in enumerate(top) if c}, key=lambda z: (z.re, z.im))
            q = Poly((ONE,))
            for a in needed:
                q = q * (a - _POLY_XI)
                roots[a] = roots.get(a, 0) + 1
            cofactor = {a: q.divmod(a - _POLY_XI)[0] for a in needed}
            work, correction, scale = work.scale(q), correction.scale(q), q * scale
            t = tuple(cofactor[lead[i]] * c if c else c for i, c in enumerate(top))
        else:
            t = tuple(c / (a - w) if c else c for a, c in zip(lead, top))
        subtract(MeromorphicSection.monomial(conn.points, conn.rank, k, t))

    nums = [ZERO] * model.transformed_rank
    for j in range(len(conn.points)):
        if work.pole_order(j) > 1:
            raise ReductionError(f"pole of order {work.pole_order(j)} survived at p{j + 1}")
        for n, c in model.residue_class(j, work.residue(j)).items():
            nums[n] = c
    if not symbolic:
        return Reduction(tuple(nums), correction, tuple(nums), ONE)
    # scale = prod (a - xi)^e = (-1)^(sum e) prod (xi - a)^e
    sign = -ONE if sum(roots.values()) % 2 else ONE
    coords = tuple(
        RationalFunction.over_linear_factors(c * sign if isinstance(c, Poly) else Poly((c * sign,)), dict(roots))
        for c in nums
    )
    return Reduction(coords, correction, tuple(nums), scale)


@dataclass(frozen=True)
class FiberCokernel:
    """``coker(nabla_xi0 : C^r -> H^0(F))`` at a numeric point."""

    model: GlobalSectionModel
    xi0: GaussianRational
    dimension: int
    labels: tuple[tuple[int, int], ...]

    @cached_property
    def _system(self) -> Matrix:
        n = self.model.transformed_rank
        r = self.model.rank
        inclusion = Matrix([[ZERO] * n for _ in range(r)] + list(Matrix.identity(n).rows), n)
        return self.model.nabla_matrix(self.xi0).hstack(inclusion)

    def represent(self, y: Sequence) -> tuple:
        """Cokernel class of an element of ``H^0(F)`` given in model coordinates."""
        sol = solve_linear(self._system, list(y))
        if sol is None:
            raise ReductionError("H^0(F) element has no representative; the model is inconsistent")
        return sol[self.model.rank:]

    def x_action(self) -> Matrix:
        """Matrix of multiplication by ``x`` on the fiber, by direct linear algebra."""
        model = self.model
        cols = []
        r = model.rank
        for n, (j, _) in enumerate(model.labels):
            y = list(model.basis_vectors[n]) + [ZERO] * model.transformed_rank
            y[r + n] = model.conn.points[j]
            cols.append(self.represent(y))
        return Matrix.from_columns(cols, model.transformed_rank)


def fiber_cokernel(model: GlobalSectionModel, xi0) -> FiberCokernel:
    xi0 = to_gaussian(xi0)
    if xi0 in model.conn.irregular.leading:
        raise ValueError(
            f"xi0 = {xi0} is a singular point of the transform; use residue_data_at for the data there"
        )
    if kernel_basis(model.nabla_matrix(xi0)):
        raise ReductionError(f"nabla_xi has a kernel at xi0 = {xi0}")
    return FiberCokernel(model, xi0, model.transformed_rank, model.labels)


@dataclass(frozen=True)
class TransformedConnection:
    """``d - X(xi) dxi`` on the trivial bundle spanned by the cokernel basis."""

    labels: tuple[tuple[int, int], ...]
    x_action: Matrix
    source: ParabolicConnection = field(compare=False)

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def connection_form(self) -> Matrix:
        return -self.x_action

    @property
    def singular_points(self) -> tuple[GaussianRational, ...]:
        """Candidate poles: the eigenvalues of the source's leading term."""
        return self.source.irregular.points

    def coefficient_at(self, point, order: int) -> Matrix:
        return self.x_action.map(lambda f: laurent_coefficients(f, point, [order])[0])

    def partial_fractions(self) -> tuple[Matrix, list[tuple[GaussianRational, Matrix]]]:
        """``X = P + sum_l R_l/(xi - xi_l)``; raises if that form is not exact."""
        result = self._partial_fractions
        if isinstance(result, ReductionError):
            raise result
        return result[0], list(result[1])

    @cached_property
    def _partial_fractions(self):
        try:
            return self._compute_partial_fractions()
        except ReductionError as exc:
            return exc

    def _compute_partial_fractions(self):
        const = self.coefficient_at(INFINITY, 0)
        terms = [(xl, self.coefficient_at(xl, -1)) for xl in self.singular_points]
        rebuilt = const.map(lambda c: RationalFunction(c))
        for xl, res in terms:
            rebuilt = rebuilt + res.map(lambda c, xl=xl: RationalFunction(c) / (XI - xl))
        if rebuilt != self.x_action:
            raise ReductionError("X(xi) is not of the form P + sum R_l/(xi - xi_l)")
        return const, [(xl, res) for xl, res in terms if not res.is_zero()]

    def evaluate(self, xi0) -> Matrix:
        return self.x_action.map(lambda f: f(xi0))


def transform_connection(model: GlobalSectionModel) -> TransformedConnection:
    conn = model.conn
    cols = []
    for n in range(model.transformed_rank):
        s = model.basis_section(n).times_x()
        cols.append(reduce_section(model, s, XI).coordinates)
    x = Matrix.from_columns(cols, model.transformed_rank) if cols else Matrix([], 0)
    x = x.map(lambda c: c if isinstance(c, RationalFunction) else RationalFunction(c))
    return TransformedConnection(model.labels, x, conn)


@dataclass(frozen=True)
class ResidueData:
    point: GaussianRational
    matrix: Matrix
    charpoly: Poly
    eigenvalues: Optional[list[GaussianRational]]
    unsplit: Poly

    @property
    def splits(self) -> bool:
        return self.unsplit.degree <= 0


def residue_data_at(t: TransformedConnection, xi_l) -> ResidueData:
    """Residue of ``-X(xi) dxi`` at ``xi_l`` and its spectrum over Q(i)."""
    xi_l = to_gaussian(xi_l)
    res = -t.coefficient_at(xi_l, -1)
    cp = charpoly(res) if res.nrows else Poly((ONE,))
    roots, rest = split_roots(cp)
    return ResidueData(xi_l, res, cp, roots if rest.degree <= 0 else None, rest)


def formal_data_at_infinity(t: TransformedConnection) -> tuple[Matrix, Matrix]:
    """``(Ahat, Chat)`` with ``X(1/zeta) = Ahat + Chat zeta + O(zeta^2)``.

    The polar part of the transform at infinity is then
    ``-Ahat dxi - Chat dxi/xi``.
    """
    return t.coefficient_at(INFINITY, 0), t.coefficient_at(INFINITY, 1)


def reflect(conn: ParabolicConnection) -> ParabolicConnection:
    """Pull back along ``x -> -x``: points and ``A`` change sign, residues do not."""
    sings = [
        RegularSingularity(-s.point, s.residue, s.eigen) for s in conn.regular_singularities
    ]
    irr = conn.irregular
    flipped = IrregularData(tuple(-a for a in irr.leading), irr.boundaries, irr.residue, irr.weights)
    return ParabolicConnection(conn.rank, sings, flipped, name=conn.name)


def inverse_transform(datum: ParabolicConnection) -> TransformedConnection:
    """Inverse minimal Laplace transform of a connection on the xi-line.

    The inverse maps ``xi -> d_x``, ``d_xi -> -x``; this is the direct
    transform of the pull-back along ``xi -> -xi``.
    """
    return transform_connection(build_model(reflect(datum)))
