"""Exact matrices over the Gaussian rationals.

Entries are stored as ``(re + i*im) / den`` with integer arrays ``re``, ``im``
and a single positive integer denominator shared by the whole matrix. With
``den == 1`` the matrix is a Gaussian-integer matrix. Arithmetic never rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class OddEntryError(ArithmeticError):
    """Raised when an exact halving would leave the Gaussian integers."""


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GaussianMatrix:
    re: np.ndarray
    im: np.ndarray
    den: int = 1

    def __post_init__(self):
        re = _frozen(self.re)
        im = _frozen(self.im)
        if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
            raise ValueError(f"expected matching square arrays, got {re.shape} and {im.shape}")
        den = int(self.den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = math.gcd(den, int(np.gcd.reduce(np.abs(np.concatenate([re.ravel(), im.ravel(), [0]])))))
        if g > 1:
            re = _frozen(re // g)
            im = _frozen(im // g)
            den //= g
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)
        object.__setattr__(self, "den", den)

    # construction

    @classmethod
    def zeros(cls, dim: int) -> GaussianMatrix:
        z = np.zeros((dim, dim), dtype=np.int64)
        return cls(z, z)

    @classmethod
    def identity(cls, dim: int) -> GaussianMatrix:
        return cls(np.eye(dim, dtype=np.int64), np.zeros((dim, dim), dtype=np.int64))

    @classmethod
    def from_complex(cls, a, den: int = 1) -> GaussianMatrix:
        """Build from a complex array whose entries, times ``den``, are Gaussian integers."""
        a = np.asarray(a, dtype=complex) * den
        re = np.rint(a.real)
        im = np.rint(a.imag)
        if not (np.array_equal(re, a.real) and np.array_equal(im, a.imag)):
            raise ValueError("entries are not Gaussian integers over the given denominator")
        return cls(re.astype(np.int64), im.astype(np.int64), den)

    # basic queries

    @property
    def dim(self) -> int:
        return self.re.shape[0]

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def is_zero(self) -> bool:
        return not self.re.any() and not self.im.any()

    def entry(self, i: int, j: int) -> complex:
        return complex(int(self.re[i, j]), int(self.im[i, j])) / self.den

    def nonzero_count(self) -> int:
        return int(np.count_nonzero((self.re != 0) | (self.im != 0)))

    def trace(self) -> tuple[Fraction, Fraction]:
        """Exact trace as a (real, imaginary) pair of fractions."""
        return (Fraction(int(np.trace(self.re)), self.den), Fraction(int(np.trace(self.im)), self.den))

    def to_complex(self) -> np.ndarray:
        return (self.re + 1j * self.im) / self.den

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.re.astype(float) ** 2 + self.im.astype(float) ** 2))) / self.den

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianMatrix):
            return NotImplemented
        return (
            self.den == other.den
            and np.array_equal(self.re, other.re)
            and np.array_equal(self.im, other.im)
        )

    def __hash__(self):
        return hash((self.den, self.re.tobytes(), self.im.tobytes()))

    def __repr__(self):
        return f"GaussianMatrix(dim={self.dim}, den={self.den}, nnz={self.nonzero_count()})"

    # arithmetic

    def _common(self, other: GaussianMatrix):
        den = math.lcm(self.den, other.den)
        a, b = den // self.den, den // other.den
        return self.re * a, self.im * a, other.re * b, other.im * b, den

    def __add__(self, other: GaussianMatrix) -> GaussianMatrix:
        r1, i1, r2, i2, den = self._common(other)
        return GaussianMatrix(r1 + r2, i1 + i2, den)

    def __sub__(self, other: GaussianMatrix) -> GaussianMatrix:
        r1, i1, r2, i2, den = self._common(other)
        return GaussianMatrix(r1 - r2, i1 - i2, den)

    def __neg__(self) -> GaussianMatrix:
        return GaussianMatrix(-self.re, -self.im, self.den)

    def __matmul__(self, other: GaussianMatrix) -> GaussianMatrix:
        re = self.re @ other.re - self.im @ other.im
        im = self.re @ other.im + self.im @ other.re
        return GaussianMatrix(re, im, self.den * other.den)

    def __mul__(self, c) -> GaussianMatrix:
        """Scale by a Gaussian integer (int, or complex with integral parts)."""
        c = complex(c)
        a, b = int(c.real), int(c.imag)
        if a != c.real or b != c.imag:
            raise ValueError(f"scalar {c} is not a Gaussian integer")
        return GaussianMatrix(a * self.re - b * self.im, a * self.im + b * self.re, self.den)

    __rmul__ = __mul__

    def over(self, n: int) -> GaussianMatrix:
        """Divide by a positive integer, staying exact."""
        return GaussianMatrix(self.re, self.im, self.den * n)

    def halve_integral(self) -> GaussianMatrix:
        """Halve, insisting that the result is still a Gaussian-integer matrix."""
        if not self.is_integral or (self.re % 2).any() or (self.im % 2).any():
            raise OddEntryError("matrix has entries that are not divisible by 2 in Z[i]")
        return GaussianMatrix(self.re // 2, self.im // 2)

    def conj_transpose(self) -> GaussianMatrix:
        return GaussianMatrix(self.re.T, -self.im.T, self.den)

    H = property(conj_transpose)

    def __pow__(self, n: int) -> GaussianMatrix:
        if n < 0:
            raise ValueError("only non-negative powers are supported")
        out = GaussianMatrix.identity(self.dim)
        for _ in range(n):
            out = out @ self
        return out


def commutator(a: GaussianMatrix, b: GaussianMatrix) -> GaussianMatrix:
    return a @ b - b @ a


def anticommutator(a: GaussianMatrix, b: GaussianMatrix) -> GaussianMatrix:
    return a @ b + b @ a


def format_entry(re: int, im: int, den: int = 1) -> str:
    body = f"{re}{'+' if im >= 0 else '-'}{abs(im)}i"
    return body if den == 1 else f"({body})/{den}"


def dump_matrix(m: GaussianMatrix) -> str:
    rows = []
    for i in range(m.dim):
        rows.append(" ".join(format_entry(int(m.re[i, j]), int(m.im[i, j]), m.den) for j in range(m.dim)))
    return "\n".join(rows)


def parse_entry(token: str) -> complex:
    """Inverse of :func:`format_entry` (returns a float complex)."""
    den = 1
    if token.startswith("("):
        body, den_s = token[1:].split(")/")
        den = int(den_s)
    else:
        body = token
    body = body.rstrip("i")
    # the sign of the imaginary part is the last '+' or '-' not at position 0
    k = max(body.rfind("+"), body.rfind("-"))
    if k <= 0:
        raise ValueError(f"malformed entry {token!r}")
    return complex(int(body[:k]), int(body[k:])) / den
