"""Exact integer linear algebra and finitely generated abelian groups.

Every K-group the package produces is an :class:`FGAbelianGroup` in
invariant-factor form ``Z^r + Z/d1 + ... + Z/dt`` with ``d1 | d2 | ... | dt``.
Presentations are turned into that form with :func:`smith_normal_form`.

Rational numbers are plain :class:`fractions.Fraction` values, which already
keep ``gcd(num, den) = 1`` with a positive denominator and ``0 == 0/1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

BigRational = Fraction

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, ``"-3"`` or an int into an exact rational."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise InputError(f"not a rational number: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix stored row-major; zero rows or columns are allowed."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise InputError("matrix dimensions must be non-negative")
        entries = tuple(self.entries)
        if len(entries) != self.rows * self.cols:
            raise InputError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(entries)}"
            )
        for x in entries:
            if isinstance(x, bool) or not isinstance(x, int):
                raise InputError(f"integer matrix entry expected, got {x!r}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise InputError("ragged matrix rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, diag: Sequence[int], rows: int | None = None, cols: int | None = None) -> IntMatrix:
        rows = len(diag) if rows is None else rows
        cols = len(diag) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(diag):
            data[i][i] = d
        return cls.from_rows(data, cols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def column(self, j: int) -> list[int]:
        return [self[i, j] for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        a = self.to_rows()
        bt = other.transpose().to_rows()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(sum(x * y for x, y in zip(row, col)) for row in a for col in bt),
        )

    def apply(self, vector: Sequence[int]) -> list[int]:
        if len(vector) != self.cols:
            raise InputError("vector length does not match matrix columns")
        return [sum(self[i, j] * vector[j] for j in range(self.cols)) for i in range(self.rows)]

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise InputError("hstack needs equal row counts")
        a, b = self.to_rows(), other.to_rows()
        return IntMatrix.from_rows([ra + rb for ra, rb in zip(a, b)], self.cols + other.cols)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise InputError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    """``left @ m @ right`` is diagonal with entries ``diagonal``.

    ``left_inverse`` is kept because coordinates in a cokernel are read off
    through ``left`` and generators of the cokernel through its inverse.
    """

    diagonal: tuple[int, ...]
    left: IntMatrix
    right: IntMatrix
    left_inverse: IntMatrix


def smith_form(m: IntMatrix) -> SmithForm:
    r, c = m.rows, m.cols
    a = m.to_rows()
    left = IntMatrix.identity(r).to_rows()
    linv = IntMatrix.identity(r).to_rows()
    right = IntMatrix.identity(c).to_rows()

    def swap_rows(i, k):
        if i != k:
            a[i], a[k] = a[k], a[i]
            left[i], left[k] = left[k], left[i]
            for row in linv:
                row[i], row[k] = row[k], row[i]

    def swap_cols(j, k):
        if j != k:
            for row in a:
                row[j], row[k] = row[k], row[j]
            for row in right:
                row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        if q:
            a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
            left[dst] = [x + q * y for x, y in zip(left[dst], left[src])]
            for row in linv:
                row[src] -= q * row[dst]

    def add_col(dst, src, q):
        if q:
            for row in a:
                row[dst] += q * row[src]
            for row in right:
                row[dst] += q * row[src]

    t = 0
    while t < min(r, c):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = abs(a[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, pi, pj = best
        swap_rows(t, pi)
        swap_cols(t, pj)
        p = a[t][t]
        clean = True
        for i in range(t + 1, r):
            if a[i][t]:
                add_row(i, t, -(a[i][t] // p))
                clean = clean and a[i][t] == 0
        for j in range(t + 1, c):
            if a[t][j]:
                add_col(j, t, -(a[t][j] // p))
                clean = clean and a[t][j] == 0
        if not clean:
            continue
        bad = next(
            (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
            None,
        )
        if bad is not None:
            add_row(t, bad, 1)
            continue
        if p < 0:
            a[t] = [-x for x in a[t]]
            left[t] = [-x for x in left[t]]
            for row in linv:
                row[t] = -row[t]
        t += 1

    diag = tuple(a[i][i] for i in range(min(r, c)))
    return SmithForm(
        diag,
        IntMatrix.from_rows(left, r),
        IntMatrix.from_rows(right, c),
        IntMatrix.from_rows(linv, r),
    )


def smith_normal_form(m: IntMatrix) -> tuple[list[int], IntMatrix, IntMatrix]:
    """Return ``(d, left, right)`` with ``left @ m @ right = diag(d)``.

    Pivots are the smallest nonzero absolute value in the active block, ties
    broken by lowest (row, col). ``d`` is non-negative and forms a divisor
    chain, with zeros last.
    """
    sf = smith_form(m)
    return list(sf.diagonal), sf.left, sf.right


# --------------------------------------------------------------------------
# finitely generated abelian groups


def _invariant_factors(orders: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Canonicalize a direct sum of cyclic groups given by their orders.

    0 stands for Z, 1 for the trivial group.
    """
    free = 0
    finite = []
    for d in orders:
        if isinstance(d, bool) or not isinstance(d, int) or d < 0:
            raise InputError(f"cyclic order must be a non-negative integer, got {d!r}")
        if d == 0:
            free += 1
        elif d > 1:
            finite.append(d)
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            g = math.gcd(finite[i], finite[j])
            finite[i], finite[j] = g, finite[i] // g * finite[j]
    return free, tuple(d for d in finite if d > 1)


@dataclass(frozen=True)
class FGAbelianGroup:
    """``Z^free_rank`` plus cyclic factors ``Z/d`` forming a divisor chain.

    Two groups are isomorphic exactly when they compare equal.
    """

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        torsion = tuple(self.torsion)
        if isinstance(self.free_rank, bool) or not isinstance(self.free_rank, int) or self.free_rank < 0:
            raise InputError(f"free rank must be a non-negative integer, got {self.free_rank!r}")
        for d in torsion:
            if isinstance(d, bool) or not isinstance(d, int) or d <= 1:
                raise InputError(f"torsion coefficients must be integers > 1, got {d!r}")
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise InputError(f"torsion {list(torsion)} is not a divisor chain")
        object.__setattr__(self, "torsion", torsion)

    @classmethod
    def from_orders(cls, orders: Iterable[int], free_rank: int = 0) -> FGAbelianGroup:
        """Direct sum of ``Z^free_rank`` and ``Z/d`` for each ``d`` (0 meaning Z)."""
        free, torsion = _invariant_factors(orders)
        return cls(free + free_rank, torsion)

    @classmethod
    def cyclic(cls, n: int) -> FGAbelianGroup:
        return cls.from_orders([n])

    @classmethod
    def free(cls, rank: int) -> FGAbelianGroup:
        return cls(rank)

    @classmethod
    def trivial(cls) -> FGAbelianGroup:
        return cls()

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1

    @property
    def moduli(self) -> tuple[int, ...]:
        """Coordinate moduli in display order: 0 for each Z, then the torsion chain."""
        return (0,) * self.free_rank + self.torsion

    def order(self) -> int | float:
        return math.prod(self.torsion) if self.free_rank == 0 else math.inf

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Normalize a coordinate vector (free coordinates first)."""
        if len(coords) != len(self.moduli):
            raise InputError(f"expected {len(self.moduli)} coordinates for {self}, got {len(coords)}")
        return tuple(x % m if m else x for x, m in zip(coords, self.moduli))

    def primary_decomposition(self) -> list[int]:
        """Prime-power orders of the torsion part, sorted; the free part is omitted."""
        from sympy import factorint

        out = []
        for d in self.torsion:
            out.extend(p**e for p, e in factorint(d).items())
        return sorted(out)

    def pretty(self, ascii: bool = False) -> str:
        sep = " + " if ascii else " ⊕ "
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return sep.join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.pretty()

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> FGAbelianGroup:
        try:
            return cls.from_orders(list(data.get("torsion", [])), int(data["free_rank"]))
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError(f"malformed group JSON: {data!r}") from exc

    @classmethod
    def parse(cls, text: str) -> FGAbelianGroup:
        """Parse ``Z^2 ⊕ Z/2 ⊕ Z/6`` (or with ``+``); non-canonical sums are normalized."""
        src = re.sub("[⁰¹²³⁴⁵⁶⁷⁸⁹]+", lambda m: "^" + m.group(0).translate(_SUPERSCRIPTS), str(text))
        src = src.replace("⊕", "+").replace("ℤ", "Z")
        src = src.replace(" ", "")
        if not src:
            raise InputError("empty group expression")
        orders: list[int] = []
        for term in src.split("+"):
            m = re.fullmatch(r"(?:0|Z(?:\^(\d+))?|\(?Z/(\d+)(?:Z)?\)?(?:\^(\d+))?)", term)
            if not m:
                raise InputError(f"cannot parse group term {term!r} in {text!r}")
            if term == "0":
                continue
            if m.group(2) is not None:
                d = int(m.group(2))
                if d == 0:
                    raise InputError("Z/0 is ambiguous; write Z")
                orders.extend([d] * int(m.group(3) or 1))
            else:
                orders.extend([0] * int(m.group(1) or 1))
        return cls.from_orders(orders)


def parse_group(value: str | dict | FGAbelianGroup) -> FGAbelianGroup:
    if isinstance(value, FGAbelianGroup):
        return value
    if isinstance(value, dict):
        return FGAbelianGroup.from_json(value)
    return FGAbelianGroup.parse(value)


def cokernel(m: IntMatrix) -> FGAbelianGroup:
    """``Z^rows`` modulo the lattice spanned by the columns of ``m``."""
    d, _, _ = smith_normal_form(m)
    nonzero = [x for x in d if x]
    return FGAbelianGroup(m.rows - len(nonzero), tuple(x for x in nonzero if x > 1))


def direct_sum(*groups: FGAbelianGroup) -> FGAbelianGroup:
    free = sum(g.free_rank for g in groups)
    return FGAbelianGroup.from_orders([d for g in groups for d in g.torsion], free)


def order(g: FGAbelianGroup) -> int | float:
    """Group order, or ``math.inf`` when there is a free part."""
    return g.order()


def mult_by_n_kernel_cokernel(g: FGAbelianGroup, n: int) -> tuple[FGAbelianGroup, FGAbelianGroup]:
    """Kernel and cokernel of multiplication by ``n`` on ``g``."""
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    ker = [math.gcd(n, d) for d in g.torsion]
    coker = [n] * g.free_rank + ker
    return FGAbelianGroup.from_orders(ker), FGAbelianGroup.from_orders(coker)


def finite_group_structure(size: int, add, zero: int = 0) -> FGAbelianGroup:
    """Canonical form of a finite abelian group given by an addition function.

    Elements are ``0..size-1``. The structure is read off from how many
    elements each ``p^j`` kills, which needs no presentation at all.
    """
    if size < 1:
        raise InputError("a group has at least one element")

    def times(k, x):
        acc, base = zero, x
        while k:
            if k & 1:
                acc = add(acc, base)
            base = add(base, base)
            k >>= 1
        return acc

    orders = []
    n = size
    p = 2
    primes = []
    while p * p <= n:
        if n % p == 0:
            primes.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        primes.append(n)
    for p in primes:
        exps = []
        prev = 0
        j = 0
        while True:
            j += 1
            killed = sum(1 for x in range(size) if times(p**j, x) == zero)
            e = round(math.log(killed, p))
            if e == prev:
                break
            exps.append(e - prev)
            prev = e
        # exps[j-1] = number of cyclic p-factors of exponent >= j
        for j in range(len(exps)):
            at_least = exps[j]
            more = exps[j + 1] if j + 1 < len(exps) else 0
            orders.extend([p ** (j + 1)] * (at_least - more))
    return FGAbelianGroup.from_orders(orders)
