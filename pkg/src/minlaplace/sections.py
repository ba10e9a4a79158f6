"""Vector-valued meromorphic functions on P^1 with poles at fixed points.

A section is a finite sum ``sum_j sum_m v_{j,m} (x-p_j)^{-m} + sum_k w_k x^k``
whose coefficients are vectors over Q(i) or Q(i)(xi).  Multiplication by
``x`` and by ``1/(x - p_i)`` is done by exact partial fractions, so the
representation stays canonical.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .exact import ZERO, GaussianRational
from .linalg import Matrix

__all__ = ["MeromorphicSection"]


def _vadd(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def _vsub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def _vscale(a: tuple, c) -> tuple:
    return tuple(x * c if x else x for x in a)


def _vzero(a: tuple) -> bool:
    return all(not x for x in a)


def _trim(coeffs: list) -> tuple:
    while coeffs and _vzero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs)


class MeromorphicSection:
    """``poles[j][m-1]`` multiplies ``(x-p_j)^{-m}``; ``poly[k]`` multiplies ``x^k``."""

    __slots__ = ("points", "rank", "poles", "poly")

    def __init__(
        self,
        points: Sequence[GaussianRational],
        rank: int,
        poles: Optional[Sequence[Sequence[tuple]]] = None,
        poly: Sequence[tuple] = (),
    ):
        points = tuple(points)
        if poles is None:
            poles = [()] * len(points)
        if len(poles) != len(points):
            raise ValueError("one pole list per point is required")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "poles", tuple(_trim([tuple(v) for v in pj]) for pj in poles))
        object.__setattr__(self, "poly", _trim([tuple(v) for v in poly]))
        for v in (*self.poly, *(v for pj in self.poles for v in pj)):
            if len(v) != rank:
                raise ValueError(f"coefficient of length {len(v)} in a rank {rank} section")

    def __setattr__(self, name, value):
        raise AttributeError("MeromorphicSection is immutable")

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, points, rank) -> MeromorphicSection:
        return cls(points, rank)

    @classmethod
    def pole_term(cls, points, rank, j: int, order: int, vector: Sequence) -> MeromorphicSection:
        """``vector / (x - p_j)^order`` with ``order >= 1``."""
        if order < 1:
            raise ValueError("pole order must be at least 1")
        zero = (ZERO,) * rank
        poles = [()] * len(points)
        poles[j] = (zero,) * (order - 1) + (tuple(vector),)
        return cls(points, rank, poles)

    @classmethod
    def monomial(cls, points, rank, degree: int, vector: Sequence) -> MeromorphicSection:
        zero = (ZERO,) * rank
        return cls(points, rank, None, (zero,) * degree + (tuple(vector),))

    # -- queries --------------------------------------------------------
    def pole_order(self, j: int) -> int:
        return len(self.poles[j])

    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    def is_zero(self) -> bool:
        return not self.poly and not any(self.poles)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def residue(self, j: int) -> tuple:
        return self.poles[j][0] if self.poles[j] else (ZERO,) * self.rank

    def _compatible(self, other: MeromorphicSection) -> None:
        if self.points != other.points or self.rank != other.rank:
            raise ValueError("sections live over different pole sets")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeromorphicSection):
            return NotImplemented
        if self.points != other.points or self.rank != other.rank:
            return False
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("MeromorphicSection is unhashable")

    # -- linear structure -----------------------------------------------
    @staticmethod
    def _merge(a: Sequence[tuple], b: Sequence[tuple], op) -> list:
        n = max(len(a), len(b))
        out = []
        for k in range(n):
            if k < len(a) and k < len(b):
                out.append(op(a[k], b[k]))
            elif k < len(a):
                out.append(a[k])
            else:
                out.append(op(tuple(ZERO for _ in b[k]), b[k]))
        return out

    def __add__(self, other: MeromorphicSection) -> MeromorphicSection:
        self._compatible(other)
        poles = [self._merge(a, b, _vadd) for a, b in zip(self.poles, other.poles)]
        return MeromorphicSection(self.points, self.rank, poles, self._merge(self.poly, other.poly, _vadd))

    def __sub__(self, other: MeromorphicSection) -> MeromorphicSection:
        self._compatible(other)
        poles = [self._merge(a, b, _vsub) for a, b in zip(self.poles, other.poles)]
        return MeromorphicSection(self.points, self.rank, poles, self._merge(self.poly, other.poly, _vsub))

    def __neg__(self) -> MeromorphicSection:
        return self.scale(-1)

    def scale(self, c) -> MeromorphicSection:
        poles = [[_vscale(v, c) for v in pj] for pj in self.poles]
        return MeromorphicSection(self.points, self.rank, poles, [_vscale(v, c) for v in self.poly])

    def apply_matrix(self, m: Matrix) -> MeromorphicSection:
        """Multiply every coefficient by a constant matrix."""
        poles = [[m.apply(v) for v in pj] for pj in self.poles]
        return MeromorphicSection(self.points, m.nrows, poles, [m.apply(v) for v in self.poly])

    def apply_diagonal(self, diag: Sequence) -> MeromorphicSection:
        def mul(v):
            return tuple(d * x if x else x for d, x in zip(diag, v))

        poles = [[mul(v) for v in pj] for pj in self.poles]
        return MeromorphicSection(self.points, self.rank, poles, [mul(v) for v in self.poly])

    # -- multiplicative structure ---------------------------------------
    def times_x(self) -> MeromorphicSection:
        """Multiply by ``x``: ``x (x-b)^{-k} = (x-b)^{-(k-1)} + b (x-b)^{-k}``."""
        zero = (ZERO,) * self.rank
        poly = [zero] + list(self.poly)
        poles = []
        for b, pj in zip(self.points, self.poles):
            new = [_vscale(v, b) for v in pj]
            if pj:
                poly[0] = _vadd(poly[0], pj[0])
                for k in range(1, len(pj)):
                    new[k - 1] = _vadd(new[k - 1], pj[k])
            poles.append(new)
        return MeromorphicSection(self.points, self.rank, poles, poly)

    def divide_by_linear(self, i: int) -> MeromorphicSection:
        """Multiply by ``1/(x - p_i)``.

        Uses ``1/((x-a)(x-b)^k) = d^{-k}/(x-a) - sum_{t=1..k} d^{-(k-t+1)}/(x-b)^t``
        with ``d = a - b``, and ``x^k/(x-a) = sum_{t<k} a^{k-1-t} x^t + a^k/(x-a)``.
        """
        a = self.points[i]
        zero = (ZERO,) * self.rank
        # terms at other points are fully re-expanded, so their slots start empty
        poles = [[zero] * len(pj) for pj in self.poles]
        poles[i] = [zero] + list(self.poles[i])
        residue_a = zero
        for j, (b, pj) in enumerate(zip(self.points, self.poles)):
            if j == i or not pj:
                continue
            d_inv = 1 / (a - b)
            powers = [GaussianRational(1)]
            for _ in range(len(pj)):
                powers.append(powers[-1] * d_inv)
            for k, v in enumerate(pj, start=1):
                if _vzero(v):
                    continue
                residue_a = _vadd(residue_a, _vscale(v, powers[k]))
                for t in range(1, k + 1):
                    poles[j][t - 1] = _vsub(poles[j][t - 1], _vscale(v, powers[k - t + 1]))
        poly = [zero] * max(len(self.poly) - 1, 0)
        for k, w in enumerate(self.poly):
            if _vzero(w):
                continue
            apow = GaussianRational(1)
            for t in range(k - 1, -1, -1):
                poly[t] = _vadd(poly[t], _vscale(w, apow))
                apow = apow * a
            residue_a = _vadd(residue_a, _vscale(w, apow))
        poles[i][0] = _vadd(poles[i][0], residue_a)
        return MeromorphicSection(self.points, self.rank, poles, poly)

    def derivative(self) -> MeromorphicSection:
        zero = (ZERO,) * self.rank
        poles = []
        for pj in self.poles:
            new = [zero]
            for k, v in enumerate(pj, start=1):
                new.append(_vscale(v, -k))
            poles.append(new if pj else [])
        poly = [_vscale(w, k) for k, w in enumerate(self.poly)][1:]
        return MeromorphicSection(self.points, self.rank, poles, poly)

    def evaluate(self, x0) -> tuple:
        """Value at a point ``x0`` that is not a pole."""
        acc = (ZERO,) * self.rank
        for b, pj in zip(self.points, self.poles):
            if not pj:
                continue
            if x0 == b:
                raise ZeroDivisionError(f"evaluation at the pole {b}")
            inv = 1 / (x0 - b)
            c = inv
            for v in pj:
                acc = _vadd(acc, _vscale(v, c))
                c = c * inv
        c = GaussianRational(1)
        for w in self.poly:
            acc = _vadd(acc, _vscale(w, c))
            c = c * x0
        return acc

    def __repr__(self) -> str:
        parts = []
        for b, pj in zip(self.points, self.poles):
            for m, v in enumerate(pj, start=1):
                if not _vzero(v):
                    parts.append(f"[{', '.join(map(str, v))}]/(x-({b}))^{m}")
        for k, w in enumerate(self.poly):
            if not _vzero(w):
                parts.append(f"[{', '.join(map(str, w))}]*x^{k}")
        return "MeromorphicSection(" + (" + ".join(parts) or "0") + ")"
