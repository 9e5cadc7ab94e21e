"""Exact arithmetic over Q(sqrt 2) plus the small amount of linear algebra
needed for projectors, density operators and Born traces.

Nothing here touches floating point.  Comparisons are decided rationally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, NamedTuple, Sequence, Union

__all__ = [
    "Scalar",
    "Vec",
    "SymMatrix",
    "ScalarParseError",
    "DensityDiagnosis",
    "ZERO",
    "ONE",
    "SQRT2",
    "parse_scalar",
    "inner_product",
    "projector_from_ray",
    "trace_product",
    "is_density",
    "identity",
    "diag",
]

Number = Union[int, Fraction, "Scalar"]


class ScalarParseError(ValueError):
    """Raised for any text that is not in the exact scalar syntax."""


@total_ordering
class Scalar:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("_a", "_b")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0) -> None:
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("Scalar does not accept floats")
        object.__setattr__(self, "_a", Fraction(a))
        object.__setattr__(self, "_b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self._a, self._b))

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @classmethod
    def coerce(cls, x: Number) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")

    # -- field operations -------------------------------------------------

    def __add__(self, other: Number) -> Scalar:
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(self._a + o._a, self._b + o._b)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(-self._a, -self._b)

    def __pos__(self) -> Scalar:
        return self

    def __sub__(self, other: Number) -> Scalar:
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(self._a - o._a, self._b - o._b)

    def __rsub__(self, other: Number) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: Number) -> Scalar:
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return Scalar(
            self._a * o._a + 2 * self._b * o._b,
            self._a * o._b + self._b * o._a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> Scalar:
        """Galois conjugate ``a - b*sqrt(2)``."""
        return Scalar(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 2 b^2``; zero only for the zero element."""
        return self._a * self._a - 2 * self._b * self._b

    def inverse(self) -> Scalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        return Scalar(self._a / n, -self._b / n)

    def __truediv__(self, other: Number) -> Scalar:
        try:
            o = Scalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Number) -> Scalar:
        return Scalar.coerce(other) * self.inverse()

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        a, b = self._a, self._b
        if a >= 0 and b >= 0:
            return 0 if (a == 0 and b == 0) else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: whichever of a^2 and 2b^2 dominates wins
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def cmp(self, other: Number) -> int:
        """Return -1, 0 or 1 following the real order of the two values."""
        return (self - Scalar.coerce(other)).sign()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Scalar):
            return self._a == other._a and self._b == other._b
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._b == 0 and self._a == other
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        try:
            return self.cmp(other) < 0
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def is_rational(self) -> bool:
        return self._b == 0

    # -- text -------------------------------------------------------------

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        if self._b == 1:
            tail = "r2"
        elif self._b == -1:
            tail = "-r2"
        else:
            tail = f"{self._b}*r2"
        if self._a == 0:
            return tail
        return f"{self._a}{tail}" if tail.startswith("-") else f"{self._a}+{tail}"

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def to_decimal_string(self, digits: int = 30) -> str:
        """High-precision decimal rendering, for human-facing diagnostics only."""
        from decimal import Decimal, localcontext

        with localcontext() as ctx:
            ctx.prec = digits + 10
            val = Decimal(self._a.numerator) / Decimal(self._a.denominator)
            val += Decimal(self._b.numerator) / Decimal(self._b.denominator) * Decimal(2).sqrt()
            return str(+val)


ZERO = Scalar(0)
ONE = Scalar(1)
SQRT2 = Scalar(0, 1)

_UFRAC = r"[0-9]+(?:/[0-9]+)?"
_SCALAR_RE = re.compile(
    rf"(?:(?P<a>-?{_UFRAC})(?:(?P<sign>[+-])(?:(?P<b>{_UFRAC})\*)?r2)?"
    rf"|(?P<neg>-)?(?:(?P<b_only>{_UFRAC})\*)?r2)"
)


def _rational(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise ScalarParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def parse_scalar(text: str) -> Scalar:
    """Parse ``p``, ``p/q``, ``p/q+r/s*r2``, ``-r/s*r2``, ``r2`` and friends.

    Floats, exponents, whitespace and any other token raise ScalarParseError.
    """
    if not isinstance(text, str):
        raise ScalarParseError(f"expected a string, got {type(text).__name__}")
    m = _SCALAR_RE.fullmatch(text)
    if m is None:
        raise ScalarParseError(f"not an exact scalar: {text!r}")
    if m.group("a") is not None:
        a = _rational(m.group("a"))
        if m.group("sign") is None:
            return Scalar(a)
        b = _rational(m.group("b")) if m.group("b") else Fraction(1)
        return Scalar(a, -b if m.group("sign") == "-" else b)
    b = _rational(m.group("b_only")) if m.group("b_only") else Fraction(1)
    return Scalar(0, -b if m.group("neg") else b)


# -- vectors and matrices -------------------------------------------------


@dataclass(frozen=True)
class Vec:
    entries: tuple[Scalar, ...]

    def __init__(self, entries: Iterable[Number]) -> None:
        ents = tuple(Scalar.coerce(x) for x in entries)
        if len(ents) < 2:
            raise ValueError("vectors must have dimension >= 2")
        object.__setattr__(self, "entries", ents)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> Scalar:
        return self.entries[i]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def scale(self, c: Number) -> Vec:
        return Vec(c * x for x in self.entries)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.entries)


@dataclass(frozen=True)
class SymMatrix:
    rows: tuple[tuple[Scalar, ...], ...]

    def __init__(self, rows: Iterable[Iterable[Number]], check_symmetric: bool = True) -> None:
        rs = tuple(tuple(Scalar.coerce(x) for x in row) for row in rows)
        n = len(rs)
        if n < 2 or any(len(r) != n for r in rs):
            raise ValueError("matrix must be square with dimension >= 2")
        if check_symmetric:
            for i in range(n):
                for j in range(i + 1, n):
                    if rs[i][j] != rs[j][i]:
                        raise ValueError(f"matrix is not symmetric at ({i},{j})")
        object.__setattr__(self, "rows", rs)

    @classmethod
    def unchecked(cls, rows: Iterable[Iterable[Number]]) -> SymMatrix:
        """Build without the symmetry check, so is_density can diagnose it."""
        return cls(rows, check_symmetric=False)

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.rows[i][j]

    def is_symmetric(self) -> bool:
        n = self.dimension
        return all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i + 1, n))

    def trace(self) -> Scalar:
        return sum((self.rows[i][i] for i in range(self.dimension)), ZERO)

    def __add__(self, other: SymMatrix) -> SymMatrix:
        _same_dim(self.dimension, other.dimension)
        return SymMatrix.unchecked(
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)
        )

    def __sub__(self, other: SymMatrix) -> SymMatrix:
        _same_dim(self.dimension, other.dimension)
        return SymMatrix.unchecked(
            [a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)
        )

    def __matmul__(self, other: SymMatrix) -> SymMatrix:
        # products of symmetric matrices need not be symmetric
        _same_dim(self.dimension, other.dimension)
        n = self.dimension
        cols = list(zip(*other.rows))
        return SymMatrix.unchecked(
            [sum((x * y for x, y in zip(self.rows[i], cols[j])), ZERO) for j in range(n)]
            for i in range(n)
        )

    def scale(self, c: Number) -> SymMatrix:
        return SymMatrix.unchecked([c * x for x in row] for row in self.rows)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows)


def _same_dim(m: int, n: int) -> None:
    if m != n:
        raise ValueError(f"dimension mismatch: {m} vs {n}")


def identity(n: int) -> SymMatrix:
    return SymMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])


def diag(values: Sequence[Number]) -> SymMatrix:
    n = len(values)
    return SymMatrix(
        [[Scalar.coerce(values[i]) if i == j else ZERO for j in range(n)] for i in range(n)]
    )


def inner_product(u: Vec, v: Vec) -> Scalar:
    _same_dim(u.dimension, v.dimension)
    return sum((x * y for x, y in zip(u.entries, v.entries)), ZERO)


def projector_from_ray(v: Vec) -> SymMatrix:
    """Rank-one orthogonal projector ``v v^T / (v . v)`` onto span(v)."""
    nrm = inner_product(v, v)
    if not nrm:
        raise ValueError("cannot project onto the zero vector")
    inv = nrm.inverse()
    e = v.entries
    return SymMatrix([[e[i] * e[j] * inv for j in range(len(e))] for i in range(len(e))])


def trace_product(a: SymMatrix, b: SymMatrix) -> Scalar:
    """tr(A B), without forming the product."""
    _same_dim(a.dimension, b.dimension)
    n = a.dimension
    return sum((a.rows[i][k] * b.rows[k][i] for i in range(n) for k in range(n)), ZERO)


class DensityDiagnosis(NamedTuple):
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _is_psd(rows: list[list[Scalar]]) -> bool:
    # symmetric elimination: pivot on any positive diagonal entry and recurse
    # on the Schur complement; an all-zero diagonal forces the zero matrix.
    m = [list(r) for r in rows]
    while m:
        n = len(m)
        pivot = next((k for k in range(n) if m[k][k].sign() > 0), None)
        if pivot is None:
            if any(m[k][k].sign() < 0 for k in range(n)):
                return False
            return all(not x for row in m for x in row)
        p = m[pivot][pivot]
        rest = [k for k in range(n) if k != pivot]
        m = [
            [m[i][j] - m[i][pivot] * m[pivot][j] / p for j in rest]
            for i in rest
        ]
    return True


def is_density(d: SymMatrix) -> DensityDiagnosis:
    """Symmetric, unit trace and positive semidefinite, all decided exactly."""
    if not d.is_symmetric():
        return DensityDiagnosis(False, "not symmetric")
    tr = d.trace()
    if tr != ONE:
        return DensityDiagnosis(False, f"trace is {tr}, not 1")
    if not _is_psd([list(r) for r in d.rows]):
        return DensityDiagnosis(False, "not positive semidefinite")
    return DensityDiagnosis(True)
