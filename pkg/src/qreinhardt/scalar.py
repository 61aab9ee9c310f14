"""Exact Gaussian-rational scalars ``a + b*i`` with ``a, b`` in Q."""

from __future__ import annotations

from fractions import Fraction
from numbers import Number


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # exact binary value, not the decimal repr
        return Fraction(x)
    return Fraction(x)


class GaussianRational:
    """Immutable element of Q(i).

    Arithmetic with ints, Fractions and other ``GaussianRational`` values is
    exact. Mixing with ``float``/``complex`` promotes to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def from_complex(cls, z: complex) -> "GaussianRational":
        z = complex(z)
        return cls(Fraction(z.real), Fraction(z.imag))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls.from_complex(x)
        return cls(x, 0)

    # -- helpers --------------------------------------------------------
    def _exact_other(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    # -- arithmetic -----------------------------------------------------
    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._exact_other(other)
        if o is None:
            return complex(self) + other if isinstance(other, Number) else NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._exact_other(other)
        if o is None:
            return complex(self) - other if isinstance(other, Number) else NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._exact_other(other)
        if o is None:
            return other - complex(self) if isinstance(other, Number) else NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._exact_other(other)
        if o is None:
            return complex(self) * other if isinstance(other, Number) else NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._exact_other(other)
        if o is None:
            return complex(self) / other if isinstance(other, Number) else NotImplemented
        d = o.norm2()
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        o = self._exact_other(other)
        if o is None:
            return other / complex(self) if isinstance(other, Number) else NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussianRational(1) / self) ** (-k)
        result = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._exact_other(other)
        if o is None:
            if isinstance(other, Number):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __repr__(self):
        if self.im == 0:
            return f"GaussianRational({self.re})"
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, int, Fraction))


def frac_str(q: Fraction) -> str:
    """Serialize a rational as ``"p/q"`` (``"p"`` when integral)."""
    return str(q)
