"""Exact Gaussian rationals.

A :class:`Scalar` is ``(a + b*i) / d`` with integers ``a, b`` and ``d > 0``
reduced so that ``gcd(a, b, d) == 1``.  Storing a common denominator keeps
arithmetic on plain Python ints, which is several times faster than a pair
of :class:`fractions.Fraction` objects.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["Scalar", "ZERO", "ONE", "I", "as_scalar", "rationalize"]


class Scalar:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar) and im == 0:
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        fr = _to_fraction(re)
        fi = _to_fraction(im)
        d = fr.denominator * fi.denominator // math.gcd(fr.denominator, fi.denominator)
        a = fr.numerator * (d // fr.denominator)
        b = fi.numerator * (d // fi.denominator)
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "Scalar":
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(math.gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        s = object.__new__(cls)
        s._a, s._b, s._d = a, b, d
        return s

    # ---- accessors -------------------------------------------------------
    @property
    def real(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def imag(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_real(self) -> bool:
        return self._b == 0

    def is_one(self) -> bool:
        return self._a == 1 and self._b == 0 and self._d == 1

    def conjugate(self) -> "Scalar":
        return Scalar._make(self._a, -self._b, self._d)

    def abs2(self) -> Fraction:
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # ---- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return Scalar._make(self._a + o._a, self._b + o._b, self._d)
        return Scalar._make(self._a * o._d + o._a * self._d,
                            self._b * o._d + o._b * self._d,
                            self._d * o._d)

    __radd__ = __add__

    def __neg__(self):
        s = object.__new__(Scalar)
        s._a, s._b, s._d = -self._a, -self._b, self._d
        return s

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._b == 0 and o._b == 0:
            return Scalar._make(self._a * o._a, 0, self._d * o._d)
        return Scalar._make(self._a * o._a - self._b * o._b,
                            self._a * o._b + self._b * o._a,
                            self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero Scalar")
        n = self._a * self._a + self._b * self._b
        return Scalar._make(self._d * self._a, -self._d * self._b, n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # ---- comparison ------------------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    # ---- text ------------------------------------------------------------
    def to_text(self) -> str:
        """Canonical text ``a/b+c/d*i``; parts that vanish are omitted."""
        re_t = _frac_text(self.real)
        if self._b == 0:
            return re_t
        im = self.imag
        if im == 1:
            im_t = "i"
        elif im == -1:
            im_t = "-i"
        else:
            im_t = _frac_text(im) + "*i"
        if self._a == 0:
            return im_t
        return re_t + ("" if im_t.startswith("-") else "+") + im_t

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Scalar({self.to_text()!r})"


def _frac_text(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; rationalize explicitly")
    raise TypeError(f"cannot convert {type(x).__name__} to Scalar")


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar._make(x, 0, 1)
    if isinstance(x, Fraction):
        return Scalar._make(x.numerator, 0, x.denominator)
    return None


def as_scalar(x) -> Scalar:
    """Coerce ints, Fractions, strings and Scalars; reject floats."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, complex):
        raise TypeError("complex floats are not exact; use rationalize()")
    return Scalar(x)


def rationalize(z: complex, rat_tol: float = 1e-12, max_den: int = 10**12) -> Scalar | None:
    """Best small-denominator Gaussian rational within ``rat_tol`` of ``z``.

    Tolerance is relative to ``max(1, |z|)``.  Returns ``None`` when the
    continued-fraction approximant is not close enough.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return None
    re = Fraction(z.real).limit_denominator(max_den)
    im = Fraction(z.imag).limit_denominator(max_den)
    cand = Scalar(re, im)
    if abs(complex(cand) - z) <= rat_tol * max(1.0, abs(z)):
        return cand
    return None


ZERO = Scalar._make(0, 0, 1)
ONE = Scalar._make(1, 0, 1)
I = Scalar._make(0, 1, 1)
