"""Exact and floating-point 4x4 spinor-space algebra.

All gamma-matrix objects used in the package live here, in the Dirac
(standard) representation::

    beta   = diag(1, 1, -1, -1)
    alpha_i = [[0, sigma_i], [sigma_i, 0]]
    gamma5 = [[0, 1], [1, 0]]
    Sigma_i = gamma5 alpha_i = diag(sigma_i, sigma_i)

Every entry of these matrices (and of every product of them) is a Gaussian
rational, so conditions such as ``{alpha_i, O} = 0`` can be certified with
zero tolerance. A numeric mode backed by numpy is provided for the solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError

NUMERIC_TOL = 1e-12

EXACT = "exact"
NUMERIC = "numeric"


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Complex number ``re + im*i`` with arbitrary-precision rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    @classmethod
    def _maybe(cls, x):
        try:
            return cls.coerce(x)
        except TypeError:
            return None

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact")
        return cls(_frac(x), Fraction(0))

    def __add__(self, other):
        o = GaussianRational._maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational._maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational._maybe(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational._maybe(other)
        if o is None:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by exact zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __str__(self):
        return f"{self.re}+{self.im}*i"


ZERO = GaussianRational()
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


class SpinorMatrix:
    """Immutable 4x4 complex matrix in exact or numeric mode.

    Exact matrices hold :class:`GaussianRational` entries; numeric matrices
    hold a read-only ``complex128`` array. Arithmetic never mixes modes.
    """

    __slots__ = ("_mode", "_rows", "_array")

    def __init__(self, entries, mode: str = EXACT):
        if mode == EXACT:
            rows = tuple(tuple(GaussianRational.coerce(x) for x in row) for row in entries)
            if len(rows) != 4 or any(len(r) != 4 for r in rows):
                raise UsageError("spinor matrices are 4x4")
            self._rows = rows
            self._array = None
        elif mode == NUMERIC:
            arr = np.array(entries, dtype=np.complex128)
            if arr.shape != (4, 4):
                raise UsageError("spinor matrices are 4x4")
            arr.setflags(write=False)
            self._array = arr
            self._rows = None
        else:
            raise UsageError(f"unknown mode {mode!r}")
        self._mode = mode

    # construction helpers -------------------------------------------------
    @classmethod
    def zeros(cls, mode: str = EXACT) -> "SpinorMatrix":
        return cls([[0] * 4 for _ in range(4)], mode)

    @classmethod
    def identity(cls, mode: str = EXACT) -> "SpinorMatrix":
        return cls([[int(i == j) for j in range(4)] for i in range(4)], mode)

    @property
    def mode(self) -> str:
        return self._mode

    @property
    def exact(self) -> bool:
        return self._mode == EXACT

    @property
    def rows(self):
        if not self.exact:
            raise UsageError("numeric matrices have no exact rows")
        return self._rows

    @property
    def array(self) -> np.ndarray:
        """Numeric view (converts exact entries to complex128)."""
        if self._array is not None:
            return self._array
        return np.array([[complex(x) for x in row] for row in self._rows])

    def numeric(self) -> "SpinorMatrix":
        return self if not self.exact else SpinorMatrix(self.array, NUMERIC)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j] if self.exact else self._array[i, j]

    # arithmetic ------------------------------------------------------------
    def _check(self, other) -> "SpinorMatrix":
        if not isinstance(other, SpinorMatrix):
            return NotImplemented
        if other._mode != self._mode:
            raise UsageError(f"mode mismatch: {self._mode} vs {other._mode}")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if self.exact:
            return SpinorMatrix([[a + b for a, b in zip(r, s)]
                                 for r, s in zip(self._rows, o._rows)])
        return SpinorMatrix(self._array + o._array, NUMERIC)

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if self.exact:
            return SpinorMatrix([[a - b for a, b in zip(r, s)]
                                 for r, s in zip(self._rows, o._rows)])
        return SpinorMatrix(self._array - o._array, NUMERIC)

    def __neg__(self):
        if self.exact:
            return SpinorMatrix([[-a for a in r] for r in self._rows])
        return SpinorMatrix(-self._array, NUMERIC)

    def __matmul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        if self.exact:
            cols = list(zip(*o._rows))
            out = []
            for r in self._rows:
                row = []
                for c in cols:
                    acc = ZERO
                    for a, b in zip(r, c):
                        if a and b:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return SpinorMatrix(out)
        return SpinorMatrix(self._array @ o._array, NUMERIC)

    def __mul__(self, scalar):
        if isinstance(scalar, SpinorMatrix):
            raise UsageError("use @ for matrix products")
        if self.exact:
            try:
                s = GaussianRational.coerce(scalar)
            except TypeError as exc:
                raise UsageError(f"exact matrix times inexact scalar {scalar!r}") from exc
            return SpinorMatrix([[s * a for a in r] for r in self._rows])
        return SpinorMatrix(complex(scalar) * self._array, NUMERIC)

    __rmul__ = __mul__

    def adjoint(self) -> "SpinorMatrix":
        if self.exact:
            return SpinorMatrix([[self._rows[j][i].conjugate() for j in range(4)]
                                 for i in range(4)])
        return SpinorMatrix(self._array.conj().T, NUMERIC)

    def __eq__(self, other):
        if not isinstance(other, SpinorMatrix) or other._mode != self._mode:
            return NotImplemented
        if self.exact:
            return self._rows == other._rows
        return bool(np.array_equal(self._array, other._array))

    def __hash__(self):
        return hash(self._rows) if self.exact else hash(self._array.tobytes())

    # predicates ------------------------------------------------------------
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.array)))

    def is_zero(self, tol: float = NUMERIC_TOL) -> bool:
        if self.exact:
            return not any(x for row in self._rows for x in row)
        return self.max_abs() < tol

    def is_identity(self, tol: float = NUMERIC_TOL) -> bool:
        return (self - SpinorMatrix.identity(self._mode)).is_zero(tol)

    def is_hermitian(self, tol: float = NUMERIC_TOL) -> bool:
        return (self - self.adjoint()).is_zero(tol)

    def first_nonzero(self, tol: float = NUMERIC_TOL):
        """Return ``(i, j, value)`` of the first nonzero entry, or None."""
        for i in range(4):
            for j in range(4):
                v = self[i, j]
                if (v if self.exact else abs(v) >= tol):
                    return (i, j, v)
        return None

    # output ----------------------------------------------------------------
    def dump(self) -> list[str]:
        """Row-major entries formatted as ``"a/b+c/d*i"``."""
        if self.exact:
            return [f"{x.re}+{x.im}*i" for row in self._rows for x in row]
        return [f"{v.real!r}+{v.imag!r}*i" for v in self._array.ravel()]

    def __repr__(self):
        return f"SpinorMatrix(mode={self._mode!r}, entries={self.dump()})"


def commutator(a: SpinorMatrix, b: SpinorMatrix) -> SpinorMatrix:
    return a @ b - b @ a


def anticommutator(a: SpinorMatrix, b: SpinorMatrix) -> SpinorMatrix:
    return a @ b + b @ a


def is_zero(a: SpinorMatrix, tol: float = NUMERIC_TOL) -> bool:
    return a.is_zero(tol)


def is_identity(a: SpinorMatrix, tol: float = NUMERIC_TOL) -> bool:
    return a.is_identity(tol)


def is_hermitian(a: SpinorMatrix, tol: float = NUMERIC_TOL) -> bool:
    return a.is_hermitian(tol)


def _block(top_left, top_right, bottom_left, bottom_right) -> SpinorMatrix:
    rows = []
    for a, b in ((top_left, top_right), (bottom_left, bottom_right)):
        for r in range(2):
            rows.append(list(a[r]) + list(b[r]))
    return SpinorMatrix(rows)


_I2 = ((ONE, ZERO), (ZERO, ONE))
_Z2 = ((ZERO, ZERO), (ZERO, ZERO))
PAULI = (
    ((ZERO, ONE), (ONE, ZERO)),
    ((ZERO, -I_UNIT), (I_UNIT, ZERO)),
    ((ONE, ZERO), (ZERO, -ONE)),
)


@dataclass(frozen=True)
class GammaBasis:
    identity: SpinorMatrix
    beta: SpinorMatrix
    alpha: tuple[SpinorMatrix, SpinorMatrix, SpinorMatrix]
    gamma5: SpinorMatrix
    sigma: tuple[SpinorMatrix, SpinorMatrix, SpinorMatrix]

    def elements(self) -> dict[str, SpinorMatrix]:
        out = {"I": self.identity, "beta": self.beta, "gamma5": self.gamma5}
        for i in range(3):
            out[f"alpha{i + 1}"] = self.alpha[i]
            out[f"Sigma{i + 1}"] = self.sigma[i]
        return out


def dirac_basis() -> GammaBasis:
    identity = SpinorMatrix.identity()
    beta = _block(_I2, _Z2, _Z2, tuple(tuple(-x for x in r) for r in _I2))
    alpha = tuple(_block(_Z2, s, s, _Z2) for s in PAULI)
    gamma5 = _block(_Z2, _I2, _I2, _Z2)
    sigma = tuple(gamma5 @ a for a in alpha)
    return GammaBasis(identity, beta, alpha, gamma5, sigma)


DIRAC = dirac_basis()


def sigma_from_cross(i: int, basis: GammaBasis = DIRAC) -> SpinorMatrix:
    """Component ``i`` of ``alpha x alpha / (2i)``."""
    j, k = (i + 1) % 3, (i + 2) % 3
    a = basis.alpha
    return (a[j] @ a[k] - a[k] @ a[j]) * (ONE / (2 * I_UNIT))


def dot_alpha(v: Sequence, basis: GammaBasis = DIRAC, mode: str | None = None) -> SpinorMatrix:
    """``v . alpha`` for a 3-vector; exact when all components are rational."""
    return _dot(v, basis.alpha, mode)


def dot_sigma(v: Sequence, basis: GammaBasis = DIRAC, mode: str | None = None) -> SpinorMatrix:
    return _dot(v, basis.sigma, mode)


def _dot(v, mats, mode):
    if mode is None:
        mode = EXACT if all(isinstance(x, (int, Rational, GaussianRational)) for x in v) else NUMERIC
    if mode == EXACT:
        acc = SpinorMatrix.zeros()
        for c, m in zip(v, mats):
            if c:
                acc = acc + m * c
        return acc
    arr = sum(complex(c) * m.array for c, m in zip(v, mats))
    return SpinorMatrix(arr, NUMERIC)


def as_numeric_stack(mats: Iterable[SpinorMatrix]) -> np.ndarray:
    return np.stack([m.array for m in mats])


# numeric constants used by the solvers
I4 = np.eye(4, dtype=np.complex128)
BETA = DIRAC.beta.array
GAMMA5 = DIRAC.gamma5.array
ALPHA = as_numeric_stack(DIRAC.alpha)
SIGMA = as_numeric_stack(DIRAC.sigma)
for _a in (BETA, GAMMA5, ALPHA, SIGMA):
    _a.setflags(write=False)
