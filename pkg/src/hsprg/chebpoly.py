"""Chebyshev-basis univariate polynomials with extended-precision coefficients.

A polynomial is stored as coefficients c_0..c_d against the Chebyshev basis
T_k of a stated interval [lo, hi].  Coefficients are mpmath ``mpf`` values so
that high-degree minimax solves and coefficient manipulations stay stable;
every polynomial also carries a float64 coefficient cache for fast vectorized
evaluation where double precision suffices.

Evaluation uses the Clenshaw recurrence, which is valid (and used unchanged)
outside [lo, hi]; extrapolated values simply grow like T_d of the mapped
argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from .errors import InvalidInputError


def as_mpf(x):
    """Coerce to mpf without re-rounding values that already are mpf.

    ``mpf(x)`` rounds an existing mpf to the *current* working precision,
    which silently destroys extended-precision data outside a workprec
    block; this helper never does.
    """
    if isinstance(x, mpf):
        return x
    if isinstance(x, int):
        with mp.workprec(max(mp.prec, x.bit_length() + 8)):
            return mpf(x)
    return mpf(x)


def mpf_to_decimal_str(x) -> str:
    """Render an mpf exactly as a decimal string.

    Every binary float is a finite decimal, so the round trip through this
    string is lossless at any precision.
    """
    x = as_mpf(x)
    if mpmath.isnan(x) or mpmath.isinf(x):
        raise InvalidInputError(f"cannot serialize non-finite value {x}")
    frac = Fraction(*mpmath.libmp.to_rational(x._mpf_))
    num, den = frac.numerator, frac.denominator
    sign = "-" if num < 0 else ""
    num = abs(num)
    if den == 1:
        return f"{sign}{num}"
    # den is a power of two; scale to a power of ten
    shift = den.bit_length() - 1
    digits = num * 5**shift  # num/2^shift == digits/10^shift
    text = str(digits).rjust(shift + 1, "0")
    return f"{sign}{text[:-shift]}.{text[-shift:]}"


def decimal_str_to_mpf(s: str, prec: int | None = None):
    """Parse a decimal string produced by :func:`mpf_to_decimal_str`.

    The parse is exact when the current (or given) precision can hold the
    value; strings we emit always satisfy this by construction.
    """
    bits = prec if prec is not None else mp.prec
    if "." in s:
        intpart, fracpart = s.split(".")
        shift = len(fracpart)
        num = int(intpart + fracpart)
        raw = mpmath.libmp.from_rational(num, 10**shift, bits, "n")
        return mpmath.make_mpf(raw)
    with mp.workprec(bits):
        return mpf(int(s))


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial in the Chebyshev basis of ``[lo, hi]``.

    ``coeffs`` are mpf; trailing (near-)zero coefficients are kept as given,
    and ``degree`` reports the index of the last nonzero one.
    """

    lo: mpf
    hi: mpf
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", as_mpf(self.lo))
        object.__setattr__(self, "hi", as_mpf(self.hi))
        object.__setattr__(self, "coeffs", tuple(as_mpf(c) for c in self.coeffs))
        if not self.coeffs:
            raise InvalidInputError("polynomial needs at least one coefficient")
        if not self.lo < self.hi:
            raise InvalidInputError("interval must satisfy lo < hi")
        for c in self.coeffs:
            if mpmath.isnan(c) or mpmath.isinf(c):
                raise InvalidInputError("non-finite coefficient")

    @property
    def degree(self) -> int:
        d = 0
        for k, c in enumerate(self.coeffs):
            if c != 0:
                d = k
        return d

    @property
    def interval(self) -> tuple[float, float]:
        return (float(self.lo), float(self.hi))

    @cached_property
    def _float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=np.float64)

    def map_to_unit(self, t):
        """Affine map of the basis interval onto [-1, 1]."""
        return (2 * as_mpf(t) - (self.hi + self.lo)) / (self.hi - self.lo)

    def __call__(self, t):
        """Clenshaw evaluation at a scalar, in the current mp precision."""
        t = as_mpf(t)
        if mpmath.isnan(t) or mpmath.isinf(t):
            raise InvalidInputError(f"non-finite evaluation point {t}")
        y = self.map_to_unit(t)
        y2 = 2 * y
        b1 = mpf(0)
        b2 = mpf(0)
        for c in self.coeffs[:0:-1]:
            b1, b2 = y2 * b1 - b2 + c, b1
        return y * b1 - b2 + self.coeffs[0]

    def eval_float(self, ts: np.ndarray) -> np.ndarray:
        """Vectorized float64 Clenshaw evaluation.

        Adequate whenever the mapped argument keeps T_d within float range;
        callers needing the growth range near |4t|^K use __call__ instead.
        """
        ts = np.asarray(ts, dtype=np.float64)
        lo, hi = float(self.lo), float(self.hi)
        y = (2.0 * ts - (hi + lo)) / (hi - lo)
        y2 = 2.0 * y
        c = self._float_coeffs
        b1 = np.zeros_like(y)
        b2 = np.zeros_like(y)
        for ck in c[:0:-1]:
            b1, b2 = y2 * b1 - b2 + ck, b1
        return y * b1 - b2 + c[0]

    def derivative(self) -> "UniPoly":
        """Derivative, in the same basis interval."""
        n = len(self.coeffs)
        if n == 1:
            return UniPoly(self.lo, self.hi, (mpf(0),))
        d = [mpf(0)] * n
        # standard recurrence for Chebyshev derivative coefficients on [-1,1]
        d[n - 1] = mpf(0)
        if n >= 2:
            d[n - 2] = 2 * (n - 1) * self.coeffs[n - 1]
        for k in range(n - 3, -1, -1):
            d[k] = d[k + 2] + 2 * (k + 1) * self.coeffs[k + 1]
        d[0] = d[0] / 2
        scale = 2 / (self.hi - self.lo)
        return UniPoly(self.lo, self.hi, tuple(scale * c for c in d[: n - 1]))

    def to_json(self) -> dict:
        return {
            "interval": [mpf_to_decimal_str(self.lo), mpf_to_decimal_str(self.hi)],
            "basis": "chebyshev",
            "coeffs": [mpf_to_decimal_str(c) for c in self.coeffs],
        }

    @staticmethod
    def from_json(obj: dict, prec: int | None = None) -> "UniPoly":
        if obj.get("basis") != "chebyshev":
            raise InvalidInputError("unsupported basis in polynomial JSON")
        lo = decimal_str_to_mpf(obj["interval"][0], prec)
        hi = decimal_str_to_mpf(obj["interval"][1], prec)
        coeffs = tuple(decimal_str_to_mpf(c, prec) for c in obj["coeffs"])
        return UniPoly(lo, hi, coeffs)


def cheb_gauss_nodes(lo, hi, n: int) -> list:
    """The n roots of T_n mapped to [lo, hi], in increasing order."""
    lo, hi = as_mpf(lo), as_mpf(hi)
    mid = (hi + lo) / 2
    half = (hi - lo) / 2
    nodes = []
    for j in range(n):
        theta = mp.pi * (2 * j + 1) / (2 * n)
        nodes.append(mid - half * mpmath.cos(theta))
    return nodes


def cheb_extrema_nodes(lo, hi, n: int) -> list:
    """The n+1 extrema of T_n mapped to [lo, hi], in increasing order."""
    lo, hi = as_mpf(lo), as_mpf(hi)
    mid = (hi + lo) / 2
    half = (hi - lo) / 2
    return [mid - half * mpmath.cos(mp.pi * j / n) for j in range(n + 1)]


def fit_through_values(lo, hi, values: Sequence) -> UniPoly:
    """Interpolate values sampled at the n Chebyshev-Gauss nodes of [lo, hi].

    Uses discrete Chebyshev orthogonality, exact (up to working precision)
    for any polynomial of degree < n.
    """
    n = len(values)
    vals = [as_mpf(v) for v in values]
    # thetas of the Gauss nodes, matching cheb_gauss_nodes ordering
    # node_j = mid - half*cos(theta_j)  =>  unit coordinate y_j = -cos(theta_j)
    coeffs = []
    cos_table = [
        [mpmath.cos(mp.pi * k * (2 * j + 1) / (2 * n)) for j in range(n)]
        for k in range(n)
    ]
    for k in range(n):
        acc = mpf(0)
        for j in range(n):
            # T_k(y_j) = T_k(-cos(theta_j)) = (-1)^k cos(k*theta_j)
            acc += vals[j] * cos_table[k][j]
        c = (2 if k else 1) * acc / n
        if k % 2 == 1:
            c = -c
        coeffs.append(c)
    return UniPoly(lo, hi, tuple(coeffs))


def fit_function(lo, hi, fun, degree: int) -> UniPoly:
    """Chebyshev interpolant of ``fun`` of the given exact degree."""
    nodes = cheb_gauss_nodes(lo, hi, degree + 1)
    return fit_through_values(lo, hi, [fun(x) for x in nodes])


def power_basis_to_cheb(power_coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Exact power-basis to Chebyshev-basis conversion on [-1, 1].

    Input and output are Fractions; uses x^n = 2^(1-n) * sum' C(n,(n-k)/2) T_k.
    """
    n = len(power_coeffs)
    out = [Fraction(0)] * n
    for deg, a in enumerate(power_coeffs):
        if a == 0:
            continue
        scale = a / Fraction(2 ** max(deg - 1, 0))
        for k in range(deg % 2, deg + 1, 2):
            binom = Fraction(math.comb(deg, (deg - k) // 2))
            if k == 0:
                binom = binom / 2 if deg > 0 else Fraction(1)
            out[k] += scale * binom
    return out
