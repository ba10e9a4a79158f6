"""Exact scalars over Q(i) and univariate rational functions over Q(i).

Everything here is immutable.  Rational functions are kept in lowest
terms with a monic denominator, so ``==`` is structural.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "Poly",
    "RationalFunction",
    "INFINITY",
    "ZERO",
    "ONE",
    "I",
    "XI",
    "to_gaussian",
    "parse_gaussian",
    "parse_fraction",
    "format_fraction",
    "laurent_coefficients",
]


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"``.  Decimal notation is rejected."""
    if isinstance(text, bool):
        raise ValueError(f"not an exact fraction: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not an exact fraction: {text!r}")
    m = _FRACTION_RE.match(text)
    if not m:
        raise ValueError(f"not an exact fraction: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


_MPQ = type(mpq(0))


class GaussianRational:
    """An element ``re + im*i`` of Q(i).

    Components are GMP rationals (``gmpy2.mpq``); they compare and hash
    equal to the matching :class:`fractions.Fraction`.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0):
        object.__setattr__(self, "re", re if type(re) is _MPQ else mpq(re))
        object.__setattr__(self, "im", im if type(im) is _MPQ else mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (Fraction(self.re), Fraction(self.im)))

    # -- predicates -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def is_zero(self) -> bool:
        return not self

    def is_real(self) -> bool:
        return not self.im

    def is_integer(self) -> bool:
        return not self.im and self.re.denominator == 1

    # -- arithmetic -----------------------------------------------------
    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __pos__(self) -> GaussianRational:
        return self

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> GaussianRational:
        if not self:
            raise ZeroDivisionError("division by zero in Q(i)")
        if not self.im:
            return GaussianRational(1 / self.re)
        n = self.norm()
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> GaussianRational:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- text -----------------------------------------------------------
    def __str__(self) -> str:
        if not self.im:
            return format_fraction(self.re)
        imag = f"{format_fraction(self.im)}*i"
        if not self.re:
            return imag
        sign = "+" if self.im > 0 else ""
        return f"{format_fraction(self.re)}{sign}{imag}"

    def __repr__(self) -> str:
        return f"GaussianRational('{self}')"


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction, _MPQ)) and not isinstance(value, bool):
        return GaussianRational(value)
    if isinstance(value, Rational):
        return GaussianRational(Fraction(value.numerator, value.denominator))
    return NotImplemented


def to_gaussian(value) -> GaussianRational:
    """Coerce ints, Fractions and ``"a/b+c/d*i"`` strings to Q(i)."""
    if isinstance(value, str):
        return parse_gaussian(value)
    g = _coerce(value)
    if g is NotImplemented:
        raise TypeError(f"cannot interpret {value!r} as a Gaussian rational")
    return g


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"a/b"``, ``"c/d*i"``, ``"a/b+c/d*i"``, ``"i"``, ``"-i"``."""
    if not isinstance(text, str):
        return to_gaussian(text)
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Gaussian rational")
    if not s.endswith("i"):
        return GaussianRational(parse_fraction(s))
    body = s[:-1]
    if body.endswith("*"):
        body = body[:-1]
        if not body or body[-1] in "+-":
            raise ValueError(f"not an exact Gaussian rational: {text!r}")
    cut = max(body.rfind("+"), body.rfind("-"))
    real_txt, imag_txt = (body[:cut], body[cut:]) if cut > 0 else ("", body)
    if imag_txt in ("", "+", "-"):
        imag_txt += "1"
    try:
        re_part = parse_fraction(real_txt) if real_txt else Fraction(0)
        im_part = parse_fraction(imag_txt)
    except ValueError:
        raise ValueError(f"not an exact Gaussian rational: {text!r}") from None
    return GaussianRational(re_part, im_part)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITY"

    __str__ = __repr__


INFINITY = _Infinity()


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Dense univariate polynomial over Q(i), coefficients low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_gaussian(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    def __reduce__(self):
        return (Poly, (self.coeffs,))

    @classmethod
    def _raw(cls, coeffs: list) -> Poly:
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        p = object.__new__(cls)
        object.__setattr__(p, "coeffs", tuple(coeffs))
        return p

    @classmethod
    def constant(cls, c) -> Poly:
        return cls((c,))

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def lead(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return self.coeffs == Poly((g,)).coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> Poly:
        return Poly._raw([-c for c in self.coeffs])

    def __add__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly((other,))
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> Poly:
        if not isinstance(other, Poly):
            other = Poly((other,))
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return Poly((other,)) - self

    def __mul__(self, other) -> Poly:
        if not isinstance(other, Poly):
            g = to_gaussian(other)
            return Poly._raw([c * g for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly._raw(out)

    __rmul__ = __mul__

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = other.lead().inverse()
        quot = [ZERO] * max(len(rem) - dq, 0)
        while len(rem) - 1 >= dq and rem:
            k = len(rem) - 1 - dq
            c = rem[-1] * inv_lead
            quot[k] = c
            for i, b in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - c * b
            rem.pop()
            while rem and not rem[-1]:
                rem.pop()
        return Poly._raw(quot), Poly._raw(rem)

    def monic(self) -> Poly:
        if not self.coeffs:
            return self
        inv = self.lead().inverse()
        return Poly._raw([c * inv for c in self.coeffs])

    def gcd(self, other: Poly) -> Poly:
        a, b = self, other
        if b:
            b = b.monic()
        while b:
            # monic remainders keep the Euclidean coefficients from growing
            a, b = b, a.divmod(b)[1]
            if b:
                b = b.monic()
        return a.monic()

    def __call__(self, x):
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Poly:
        return Poly._raw([c * k for k, c in enumerate(self.coeffs)][1:])

    def taylor_shift(self, a: GaussianRational) -> Poly:
        """Coefficients of ``p(a + t)`` in ``t``."""
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                cs[k] = cs[k] + a * cs[k + 1]
        return Poly._raw(cs)

    def reversed(self, length: int) -> Poly:
        """``t^(length-1) * p(1/t)``; ``length`` must exceed the degree."""
        cs = list(self.coeffs) + [ZERO] * (length - len(self.coeffs))
        return Poly._raw(cs[::-1])

    def valuation(self) -> int:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise ValueError("valuation of the zero polynomial")

    def to_str(self, var: str = "xi") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if not mono:
                body = str(c) if c.is_real() or not c.re else f"({c})"
            elif c == ONE:
                body = mono
            elif c == -ONE:
                body = f"-{mono}"
            elif c.is_real() or not c.re:
                body = f"{c}*{mono}"
            else:
                body = f"({c})*{mono}"
            terms.append(body)
        out = terms[0]
        for t in terms[1:]:
            out += t if t.startswith("-") else "+" + t
        return out

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly('{self.to_str()}')"


# ---------------------------------------------------------------------------
# rational functions

_ScalarLike = Union[int, Fraction, GaussianRational]


class RationalFunction:
    """An element of Q(i)(xi) in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        if not isinstance(num, Poly):
            num = Poly((num,))
        if not isinstance(den, Poly):
            den = Poly((den,))
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            num, den = Poly(), Poly((ONE,))
        elif den.degree > 0:
            g = num.gcd(den)
            if g.degree > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        lead = den.lead()
        if lead != ONE:
            inv = lead.inverse()
            num, den = num * inv, den * inv
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    @classmethod
    def over_linear_factors(cls, num: Poly, roots: dict) -> RationalFunction:
        """``num / prod (xi - a)^e`` for ``roots = {a: e}``, reduced by synthetic division."""
        den = Poly((ONE,))
        for a, e in roots.items():
            while e and num and not num(a):
                num = num.divmod(Poly((-a, ONE)))[0]
                e -= 1
            for _ in range(e):
                den = den * Poly((-a, ONE))
        if not num:
            return cls()
        return cls._raw(num, den)


    def __reduce__(self):
        return (RationalFunction, (self.num, self.den))

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> RationalFunction:
        f = object.__new__(cls)
        object.__setattr__(f, "num", num)
        object.__setattr__(f, "den", den)
        return f

    @classmethod
    def variable(cls) -> RationalFunction:
        return cls(Poly((ZERO, ONE)))

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> GaussianRational:
        if not self.is_constant():
            raise ValueError("not a constant rational function")
        return self.num.coeffs[0] if self.num else ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            g = _coerce(other)
            if g is NotImplemented:
                return NotImplemented
            other = RationalFunction(g)
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.num, self.den))

    def __neg__(self) -> RationalFunction:
        return RationalFunction._raw(-self.num, self.den)

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            if self.den == other.den:
                if self.den.degree == 0:
                    return RationalFunction._raw(self.num + other.num, self.den)
                return RationalFunction(self.num + other.num, self.den)
            return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        if not g:
            return self
        return RationalFunction._raw(self.num + self.den * g, self.den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return self + (-other)
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return self + (-g)

    def __rsub__(self, other):
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return (-self) + g

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            if self.den.degree == 0 and other.den.degree == 0:
                return RationalFunction._raw(self.num * other.num, self.den)
            return RationalFunction(self.num * other.num, self.den * other.den)
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        if not g:
            return RationalFunction._raw(Poly(), Poly((ONE,)))
        return RationalFunction._raw(self.num * g, self.den)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if not self.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, RationalFunction):
            return self * other.inverse()
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return RationalFunction._raw(self.num * g.inverse(), self.den)

    def __rtruediv__(self, other):
        g = _coerce(other)
        if g is NotImplemented:
            return NotImplemented
        return self.inverse() * g

    def __pow__(self, n: int) -> RationalFunction:
        if n < 0:
            return self.inverse() ** (-n)
        result = RationalFunction(1)
        for _ in range(n):
            result = result * self
        return result

    def __call__(self, x: _ScalarLike) -> GaussianRational:
        x = to_gaussian(x)
        d = self.den(x)
        if not d:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def poles(self) -> Poly:
        return self.den

    def laurent(self, point, orders: Sequence[int]) -> list[GaussianRational]:
        return laurent_coefficients(self, point, orders)

    def to_str(self, var: str = "xi") -> str:
        if self.den.degree == 0:
            return self.num.to_str(var)
        num = self.num.to_str(var)
        if len(self.num.coeffs) > 1 or "+" in num[1:] or "-" in num[1:]:
            num = f"({num})"
        return f"{num}/({self.den.to_str(var)})"

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"RationalFunction('{self.to_str()}')"


XI = RationalFunction.variable()


def _series_quotient(num: Poly, den: Poly, n: int) -> list[GaussianRational]:
    """First ``n`` power-series coefficients of num/den, den(0) != 0."""
    d0 = den.coeffs[0].inverse()
    a = list(num.coeffs) + [ZERO] * max(0, n - len(num.coeffs))
    out = []
    dc = den.coeffs
    for k in range(n):
        s = a[k]
        for i in range(1, min(k, len(dc) - 1) + 1):
            s = s - dc[i] * out[k - i]
        out.append(s * d0)
    return out


def laurent_coefficients(f, point, orders: Sequence[int]) -> list[GaussianRational]:
    """Exact Laurent coefficients of ``f`` at ``point`` for ``orders``.

    At ``INFINITY`` the expansion variable is ``zeta = 1/xi``.  Orders
    below the true pole order come back as zeros.
    """
    if not isinstance(f, RationalFunction):
        f = RationalFunction(to_gaussian(f))
    orders = list(orders)
    if not orders:
        return []
    if not f:
        return [ZERO] * len(orders)
    if point is INFINITY:
        length = max(f.num.degree, f.den.degree) + 1
        num_t, den_t = f.num.reversed(length), f.den.reversed(length)
    else:
        a = to_gaussian(point)
        num_t, den_t = f.num.taylor_shift(a), f.den.taylor_shift(a)
    vn, vd = num_t.valuation(), den_t.valuation()
    num_t = Poly._raw(list(num_t.coeffs[vn:]))
    den_t = Poly._raw(list(den_t.coeffs[vd:]))
    shift = vn - vd
    top = max(orders)
    if top < shift:
        return [ZERO] * len(orders)
    series = _series_quotient(num_t, den_t, top - shift + 1)
    return [series[k - shift] if k >= shift else ZERO for k in orders]
