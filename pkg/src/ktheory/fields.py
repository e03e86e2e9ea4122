"""Exact coefficient rings and dense matrix routines over them.

A ring handle is any object with ``zero``, ``one``, ``add``, ``sub``,
``neg``, ``mul``, ``is_zero``, ``coerce`` and ``to_json``; fields also have
``inv``. :data:`QQ` and :data:`ZZ` live here, finite fields in
:mod:`ktheory.kfinite`. Matrices are lists of row lists of ring elements.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .abelian import format_rational, parse_rational
from .errors import InputError

Matrix = list  # list of rows


class Rationals:
    name = "Q"
    is_field = True
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in Q")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def coerce(self, x):
        return parse_rational(x)

    def from_int(self, n: int):
        return Fraction(n)

    def to_json(self, a):
        return format_rational(a)

    def format(self, a) -> str:
        return format_rational(a)

    def random_element(self, rng, bound: int = 5):
        den = rng.randint(1, 3)
        return Fraction(rng.randint(-bound, bound), den)

    def __repr__(self):
        return "Q"


class Integers:
    name = "Z"
    is_field = False
    characteristic = 0
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a not in (1, -1):
            raise InputError(f"{a} is not a unit of Z")
        return a

    def is_zero(self, a):
        return a == 0

    def coerce(self, x):
        if isinstance(x, bool):
            raise InputError(f"not an integer: {x!r}")
        if isinstance(x, int):
            return x
        q = parse_rational(x)
        if q.denominator != 1:
            raise InputError(f"not an integer: {x!r}")
        return q.numerator

    def from_int(self, n: int):
        return n

    def to_json(self, a):
        return str(a)

    def format(self, a) -> str:
        return str(a)

    def random_element(self, rng, bound: int = 5):
        return rng.randint(-bound, bound)

    def __repr__(self):
        return "Z"


QQ = Rationals()
ZZ = Integers()


def ring_from_name(name: str):
    """``"Q"``, ``"Z"``, ``"F_7"``, ``"F_9"`` or ``"GF(9)"`` to a ring handle."""
    from .kfinite import GF

    key = str(name).strip().replace(" ", "")
    if key in ("Q", "QQ"):
        return QQ
    if key in ("Z", "ZZ"):
        return ZZ
    m = re.fullmatch(r"(?:F_?|GF\()(\d+)\)?", key)
    if m:
        return GF(int(m.group(1)))
    raise InputError(f"unknown ring or field {name!r}; expected Q, Z, F_q or GF(q)")


# --------------------------------------------------------------------------
# matrices


def coerce_matrix(ring, rows: Sequence[Sequence]) -> Matrix:
    rows = [list(r) for r in rows]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise InputError("ragged matrix rows")
    return [[ring.coerce(x) for x in r] for r in rows]


def identity(ring, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def zeros(ring, rows: int, cols: int) -> Matrix:
    return [[ring.zero] * cols for _ in range(rows)]


def mat_mul(ring, a: Matrix, b: Matrix) -> Matrix:
    if a and len(a[0]) != len(b):
        raise InputError("matrix shapes do not compose")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = ring.zero
            for k, x in enumerate(row):
                if not ring.is_zero(x):
                    acc = ring.add(acc, ring.mul(x, b[k][j]))
            new.append(acc)
        out.append(new)
    return out


def mat_sub(ring, a: Matrix, b: Matrix) -> Matrix:
    return [[ring.sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def is_square(m: Matrix) -> bool:
    return all(len(r) == len(m) for r in m)


def row_echelon(ring, m: Matrix) -> tuple[Matrix, int, object]:
    """Gaussian elimination over a field.

    Returns the echelon form, the rank and, for square input, the determinant.
    """
    a = [list(r) for r in m]
    rows = len(a)
    cols = len(a[0]) if a else 0
    det = ring.one
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if not ring.is_zero(a[i][c])), None)
        if piv is None:
            det = ring.zero
            continue
        if piv != rank:
            a[rank], a[piv] = a[piv], a[rank]
            det = ring.neg(det)
        p = a[rank][c]
        det = ring.mul(det, p)
        pinv = ring.inv(p)
        for i in range(rank + 1, rows):
            if not ring.is_zero(a[i][c]):
                f = ring.mul(a[i][c], pinv)
                a[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(a[i], a[rank])]
        rank += 1
    if rows != cols:
        det = None
    elif rank < rows:
        det = ring.zero
    return a, rank, det


def rank(ring, m: Matrix) -> int:
    return row_echelon(ring, m)[1]


def determinant(ring, m: Matrix):
    if not is_square(m):
        raise InputError("determinant of a non-square matrix")
    if not m:
        return ring.one
    if not ring.is_field:
        from .abelian import IntMatrix

        return IntMatrix.from_rows(m).det()
    return row_echelon(ring, m)[2]


def inverse(ring, m: Matrix) -> Matrix:
    """Gauss-Jordan inverse over a field."""
    n = len(m)
    a = [list(r) + e for r, e in zip(m, identity(ring, n))]
    for c in range(n):
        piv = next((i for i in range(c, n) if not ring.is_zero(a[i][c])), None)
        if piv is None:
            raise InputError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        pinv = ring.inv(a[c][c])
        a[c] = [ring.mul(pinv, x) for x in a[c]]
        for i in range(n):
            if i != c and not ring.is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(a[i], a[c])]
    return [r[n:] for r in a]


def matrix_to_json(ring, m: Matrix) -> list:
    return [[ring.to_json(x) for x in r] for r in m]
