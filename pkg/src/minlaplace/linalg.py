"""Dense exact linear algebra over Q(i) or Q(i)(xi).

Entries are any field elements supporting ``+ - * /`` and truthiness
(:class:`GaussianRational`, :class:`RationalFunction`).  Sizes in this
package never exceed a dozen rows, so plain Gauss-Jordan is used.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import ONE, ZERO, GaussianRational, Poly, to_gaussian

__all__ = [
    "Matrix",
    "row_reduce",
    "rank",
    "solve_linear",
    "kernel_basis",
    "charpoly",
    "split_roots",
]


class Matrix:
    """Immutable rectangular matrix."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: Optional[int] = None):
        data = tuple(tuple(_entry(x) for x in row) for row in rows)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
        object.__setattr__(self, "rows", data)
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __reduce__(self):
        return (Matrix, (self.rows, self.ncols))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, entries: Sequence) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: Optional[int] = None) -> Matrix:
        if nrows is None:
            nrows = len(columns[0]) if columns else 0
        return cls([[col[i] for col in columns] for i in range(nrows)], len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, key):
        i, j = key
        return self.rows[i][j]

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    def diagonal_entries(self) -> tuple:
        return tuple(self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_diagonal(self) -> bool:
        return all(not self.rows[i][j] for i in range(self.nrows) for j in range(self.ncols) if i != j)

    def is_zero(self) -> bool:
        return all(not x for row in self.rows for x in row)

    def transpose(self) -> Matrix:
        return Matrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def map(self, fn) -> Matrix:
        return Matrix([[fn(x) for x in row] for row in self.rows], self.ncols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def __hash__(self) -> int:
        return hash(self.rows)

    def __add__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        _same_shape(self, other)
        return Matrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in row] for row in self.rows], self.ncols)

    def scale(self, c) -> Matrix:
        return Matrix([[a * c for a in row] for row in self.rows], self.ncols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.columns()
            return Matrix([[_dot(row, col) for col in cols] for row in self.rows], other.ncols)
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for matrix with {self.ncols} columns")
        return tuple(_dot(row, v) for row in self.rows)

    def sub_identity(self, c) -> Matrix:
        """``self - c*Id``."""
        return Matrix(
            [[x - c if i == j else x for j, x in enumerate(row)] for i, row in enumerate(self.rows)],
            self.ncols,
        )

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
        return Matrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def hstack(self, other: Matrix) -> Matrix:
        if self.nrows != other.nrows:
            raise ValueError("row counts differ")
        return Matrix([ra + rb for ra, rb in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def inverse(self) -> Matrix:
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        reduced, pivots = row_reduce(self.hstack(Matrix.identity(n)))
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return reduced.block(range(n), range(n, 2 * n))

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(row) for row in self.rows]
        n = self.nrows
        det = ONE
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c]), None)
            if p is None:
                return ZERO
            if p != c:
                a[c], a[p] = a[p], a[c]
                det = -det
            piv = a[c][c]
            det = det * piv
            inv = 1 / piv
            for r in range(c + 1, n):
                if a[r][c]:
                    f = a[r][c] * inv
                    a[r] = [x - f * y for x, y in zip(a[r], a[c])]
        return det

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"Matrix([{body}])"


def _entry(x):
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return to_gaussian(x)
    return x


def _dot(a: Sequence, b: Sequence):
    acc = ZERO
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def _same_shape(a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def row_reduce(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [list(row) for row in m.rows]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        p = next((i for i in range(r, m.nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv if x else x for x in a[r]]
        for i in range(m.nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y if y else x for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.nrows:
            break
    return Matrix(a, m.ncols), pivots


def rank(m: Matrix) -> int:
    return len(row_reduce(m)[1])


def solve_linear(m: Matrix, b: Sequence) -> Optional[tuple]:
    """A solution of ``m v = b``, or ``None`` if the system is inconsistent.

    Free variables are set to zero.  Raises ``ValueError`` when ``b`` does
    not match the row count.
    """
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side of length {len(b)} for {m.nrows} equations")
    aug = m.hstack(Matrix([[x] for x in b], 1))
    reduced, pivots = row_reduce(aug)
    if pivots and pivots[-1] == m.ncols:
        return None
    v = [ZERO] * m.ncols
    for r, c in enumerate(pivots):
        v[c] = reduced[r, m.ncols]
    return tuple(v)


def kernel_basis(m: Matrix) -> list[tuple]:
    """Basis of the right kernel, one vector per free column."""
    reduced, pivots = row_reduce(m)
    free = [c for c in range(m.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * m.ncols
        v[f] = ONE
        for r, c in enumerate(pivots):
            v[c] = -reduced[r, f]
        basis.append(tuple(v))
    return basis


def charpoly(m: Matrix) -> Poly:
    """``det(lambda*Id - m)`` for a square matrix over Q(i) (Faddeev-LeVerrier)."""
    if not m.is_square():
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = m.nrows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    mk = Matrix.zeros(n, n)
    c = ONE
    for k in range(1, n + 1):
        mk = m @ mk.sub_identity(-c) if k > 1 else m
        c = -sum(mk.diagonal_entries(), ZERO) / k
        coeffs[n - k] = c
    return Poly(coeffs)


def split_roots(p: Poly) -> tuple[list[GaussianRational], Poly]:
    """Roots of ``p`` in Q(i) with multiplicity, plus the monic cofactor
    that has no roots in Q(i)."""
    import sympy

    if p.degree < 1:
        return [], p.monic()
    dom = sympy.QQ_I
    sp = sympy.Poly(
        [_to_sympy(c) for c in reversed(p.coeffs)], sympy.Symbol("lam"), domain=dom
    )
    roots: list[GaussianRational] = []
    rest = Poly((ONE,))
    for factor, mult in sp.factor_list()[1]:
        cs = [_from_sympy(c) for c in reversed(factor.monic().all_coeffs())]
        if len(cs) == 2:
            roots.extend([-cs[0]] * mult)
        else:
            for _ in range(mult):
                rest = rest * Poly(cs)
    roots.sort(key=lambda g: (g.re, g.im))
    return roots, rest


def _to_sympy(g: GaussianRational):
    import sympy

    return sympy.Rational(g.re.numerator, g.re.denominator) + sympy.I * sympy.Rational(
        g.im.numerator, g.im.denominator
    )


def _from_sympy(x) -> GaussianRational:
    import sympy

    re, im = sympy.re(x), sympy.im(x)
    return GaussianRational(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
