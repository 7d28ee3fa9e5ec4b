"""Scalars: exact Gaussian rationals and complex doubles.

Exact quantities live in numpy ``object`` arrays whose entries are
:class:`GaussQ` (or plain ints, which mix freely); float quantities live in
``complex128`` arrays.  The dtype of an array is its mode.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np
from gmpy2 import mpq

DEFAULT_TOL = 1e-9
DEFAULT_CLUSTER_TOL = 1e-6

_RATIONAL_TYPES = (int, type(mpq()), Fraction, Rational)


class GaussQ:
    """An element ``re + im*i`` of Q(i) with arbitrary-precision parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussQ):
            return other
        if isinstance(other, _RATIONAL_TYPES) and not isinstance(other, bool):
            return GaussQ(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _new(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _new(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _new(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return _new(self.re * o.re, mpq(0))
        return _new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("division by zero in Q(i)")
            return _new(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return _new(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussQ(1) / self**-k
        out = GaussQ(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __neg__(self):
        return _new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, complex | float):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def conjugate(self):
        return _new(self.re, -self.im)

    def norm2(self):
        """The exact squared modulus ``re**2 + im**2``."""
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


def _new(re, im):
    g = GaussQ.__new__(GaussQ)
    g.re = re
    g.im = im
    return g


I = GaussQ(0, 1)
ZERO = GaussQ(0)
ONE = GaussQ(1)


def gq(x, im=0) -> GaussQ:
    """Coerce ``x`` (int, rational, ``"p/q"`` string, GaussQ) to a GaussQ."""
    if isinstance(x, GaussQ):
        return x if not im else x + GaussQ(0, im)
    if isinstance(x, str):
        return parse_scalar(x, exact=True) + GaussQ(0, im)
    if isinstance(x, float | complex):
        raise TypeError(f"refusing to convert inexact value {x!r} to an exact scalar")
    return GaussQ(x, im)


# --------------------------------------------------------------------------
# arrays and modes


def is_exact(a) -> bool:
    """True for exact (object dtype) arrays and exact scalars."""
    if isinstance(a, np.ndarray):
        return a.dtype == object
    return isinstance(a, GaussQ | int | Rational) and not isinstance(a, bool)


def exact_array(data) -> np.ndarray:
    """Object array with every entry converted to GaussQ."""
    arr = np.array(data, dtype=object)
    flat = arr.reshape(-1)
    for idx, x in enumerate(flat):
        flat[idx] = gq(x)
    return arr


def exact_zeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.reshape(-1)[:] = [ZERO] * arr.size
    return arr


def exact_eye(n: int) -> np.ndarray:
    arr = exact_zeros((n, n))
    for i in range(n):
        arr[i, i] = ONE
    return arr


def zeros_like_mode(shape, exact: bool) -> np.ndarray:
    return exact_zeros(shape) if exact else np.zeros(shape, dtype=complex)


def eye_like_mode(n: int, exact: bool) -> np.ndarray:
    return exact_eye(n) if exact else np.eye(n, dtype=complex)


def to_float(a) -> np.ndarray:
    """Convert an exact array (or scalar) to complex128."""
    if isinstance(a, np.ndarray):
        if a.dtype == object:
            out = np.empty(a.shape, dtype=complex)
            out.reshape(-1)[:] = [complex(x) for x in a.reshape(-1)]
            return out
        return a.astype(complex)
    return complex(a)


def is_zero(x, tol: float | None = None) -> bool:
    if isinstance(x, complex | float):
        return abs(x) <= (DEFAULT_TOL if tol is None else tol)
    return not x


def all_zero(a: np.ndarray, tol: float | None = None) -> bool:
    """Exact test for object arrays; ``max|a| <= tol`` for float arrays."""
    if a.size == 0:
        return True
    if a.dtype == object:
        return not any(a.reshape(-1))
    return float(np.max(np.abs(a))) <= (DEFAULT_TOL if tol is None else tol)


def magnitude(x) -> float:
    return abs(complex(x))


# --------------------------------------------------------------------------
# text form: "p/q", "a+bi", "-3/2i", floats like "0.5-1e-3i"


def _split_complex(s: str) -> tuple[str, str]:
    """Split ``"a+bi"`` into ``("a", "+b")``; ``("a", "")`` when real."""
    s = s.replace(" ", "").replace("j", "i")
    if not s:
        raise ValueError("empty scalar")
    if not s.endswith("i"):
        return s.lstrip("+"), ""
    body = s[:-1]
    cut = 0
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "eE":
            cut = pos
            break
    re_s, im_s = body[:cut], body[cut:]
    if im_s in ("", "+"):
        im_s = "1"
    elif im_s == "-":
        im_s = "-1"
    return (re_s or "0").lstrip("+"), im_s.lstrip("+")


def parse_scalar(s: str, exact: bool = True):
    """Parse ``"p/q"``, ``"a+bi"``, ``"-i"``, ``"2/3i"`` (or decimals in float mode)."""
    if not isinstance(s, str):
        raise TypeError(f"expected a string scalar, got {type(s).__name__}")
    try:
        re_s, im_s = _split_complex(s)
        if exact:
            return _new(mpq(re_s), mpq(im_s) if im_s else mpq(0))
        return complex(float(re_s), float(im_s) if im_s else 0.0)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed scalar {s!r}") from exc


def format_part(x, exact: bool) -> str:
    if exact:
        return str(mpq(x))
    return repr(float(x))


def format_scalar(x) -> str:
    """Inverse of :func:`parse_scalar`."""
    if isinstance(x, complex | float):
        z = complex(x)
        if z.imag == 0:
            return repr(z.real)
        sign = "+" if z.imag >= 0 else "-"
        return f"{z.real!r}{sign}{abs(z.imag)!r}i"
    g = gq(x)
    if not g.im:
        return str(g.re)
    im = g.im
    sign = "+" if im >= 0 else "-"
    return f"{g.re}{sign}{abs(im)}i"
