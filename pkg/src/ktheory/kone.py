"""K_1: Gauss reduction with replayable elementary certificates, the table of
known K_1 groups, cyclotomic units, the loop ring and the circle-ring example."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .abelian import FGAbelianGroup
from .errors import InputError, VerificationError
from .fields import QQ, ZZ, coerce_matrix, determinant, inverse, is_square, matrix_to_json, ring_from_name
from .kzero import KnownValue, RingDescriptor


@dataclass(frozen=True)
class AddMultiple:
    """row_i += lam * row_j; the path e_ij(t * lam) joins it to the identity."""

    i: int
    j: int
    lam: object

    def apply(self, ring, m: list[list]) -> None:
        m[self.i] = [ring.add(a, ring.mul(self.lam, b)) for a, b in zip(m[self.i], m[self.j])]

    def undo(self, ring, m: list[list]) -> None:
        m[self.i] = [ring.sub(a, ring.mul(self.lam, b)) for a, b in zip(m[self.i], m[self.j])]

    def to_json(self, ring) -> dict:
        return {"op": "add", "i": self.i, "j": self.j, "lambda": _scalar_json(ring, self.lam)}


def _scalar_json(ring, x):
    out = ring.to_json(x)
    return out if isinstance(out, (str, list)) else str(out)


@dataclass(frozen=True)
class ElementaryCertificate:
    """Row operations taking ``input`` to ``diag(diagonal)``, in order."""

    ring: object
    input: tuple[tuple, ...]
    ops: tuple[AddMultiple, ...]
    diagonal: tuple

    @property
    def n(self) -> int:
        return len(self.diagonal)

    def terminal(self) -> list[list]:
        r = self.ring
        return [[self.diagonal[i] if i == j else r.zero for j in range(self.n)] for i in range(self.n)]

    def apply(self) -> list[list]:
        """Run the operations forward on the input."""
        m = [list(row) for row in self.input]
        for op in self.ops:
            op.apply(self.ring, m)
        return m

    def replay(self) -> list[list]:
        """Rebuild the input from the terminal diagonal by undoing the operations."""
        m = self.terminal()
        for op in reversed(self.ops):
            op.undo(self.ring, m)
        return m

    def verify(self) -> None:
        if self.apply() != self.terminal():
            raise VerificationError("operations do not reduce the input to the stated diagonal", "forward")
        if self.replay() != [list(r) for r in self.input]:
            raise VerificationError("replaying the certificate does not rebuild the input", "replay")

    def to_json(self) -> dict:
        r = self.ring
        return {
            "ring": r.name,
            "input": matrix_to_json(r, [list(x) for x in self.input]),
            "ops": [op.to_json(r) for op in self.ops],
            "diagonal": [_scalar_json(r, d) for d in self.diagonal],
        }

    @classmethod
    def from_json(cls, data: dict) -> ElementaryCertificate:
        try:
            ring = ring_from_name(data["ring"])
            m = coerce_matrix(ring, data["input"])
            n = len(m)
            ops = []
            for op in data["ops"]:
                if op.get("op") != "add":
                    raise InputError(f"unknown certificate operation {op!r}")
                i, j = int(op["i"]), int(op["j"])
                if i == j or not (0 <= i < n and 0 <= j < n):
                    raise InputError(f"bad row indices in {op!r}")
                ops.append(AddMultiple(i, j, ring.coerce(op["lambda"])))
            diagonal = tuple(ring.coerce(d) for d in data["diagonal"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed certificate: {exc}") from exc
        if len(diagonal) != n:
            raise InputError("diagonal length does not match the input size")
        return cls(ring, tuple(tuple(r) for r in m), tuple(ops), diagonal)


@dataclass(frozen=True)
class K1Class:
    """Class in K_1: the determinant over a field, its sign over Z."""

    ring: str
    unit: object

    def to_json(self) -> dict:
        return {"ring": self.ring, "unit": self.unit if isinstance(self.unit, int) else str(self.unit)}


def _ring(ring):
    return ring_from_name(ring) if isinstance(ring, str) else ring


def reduce_to_diagonal(m: Sequence[Sequence], ring=QQ) -> tuple[K1Class, ElementaryCertificate]:
    """Reduce an invertible matrix to diag(u, 1, ..., 1) by row additions only.

    Columns are finished from the last one down: column j and row j become
    e_j using rows 0..j. Over Z the entry (j, j) is driven to 1 by Euclid on
    the active part of column j (smallest nonzero absolute value first,
    ties to the lowest row).
    """
    r = _ring(ring)
    a = coerce_matrix(r, m)
    if not a or not is_square(a):
        raise InputError("reduce_to_diagonal needs a non-empty square matrix")
    n = len(a)
    det = determinant(r, a)
    if r.is_field:
        if r.is_zero(det):
            raise InputError("matrix is singular")
    elif det not in (1, -1):
        raise InputError(f"integer matrix has determinant {det}; K_1(Z) needs det = ±1")
    start = tuple(tuple(row) for row in a)
    ops: list[AddMultiple] = []

    def do(i, j, lam):
        if r.is_zero(lam):
            return
        op = AddMultiple(i, j, lam)
        op.apply(r, a)
        ops.append(op)

    for j in range(n - 1, 0, -1):
        if a[j][j] != r.one:
            if r.is_field:
                _unit_pivot_field(r, a, j, do)
            else:
                _unit_pivot_integer(a, j, do)
        for i in range(j):
            do(i, j, r.neg(a[i][j]))
        _clear_row(r, a, j, do)

    diagonal = tuple(a[i][i] for i in range(n))
    cert = ElementaryCertificate(r, start, tuple(ops), diagonal)
    cert.verify()
    unit = diagonal[0]
    return K1Class(r.name, unit), cert


def _unit_pivot_field(r, a, j, do):
    i = next((i for i in range(j) if not r.is_zero(a[i][j])), None)
    if i is None:
        do(j - 1, j, r.one)
        i = j - 1
    do(j, i, r.mul(r.sub(r.one, a[j][j]), r.inv(a[i][j])))


def _unit_pivot_integer(a, j, do):
    rows = range(j + 1)
    unit_row = next((i for i in rows if abs(a[i][j]) == 1), None)
    while unit_row is None:
        live = [i for i in rows if a[i][j] != 0]
        p = min(live, key=lambda i: (abs(a[i][j]), i))
        for i in live:
            if i != p:
                do(i, p, -(a[i][j] // a[p][j]))
        unit_row = next((i for i in rows if abs(a[i][j]) == 1), None)
    if unit_row != j:
        do(j, unit_row, (1 - a[j][j]) * a[unit_row][j])
    elif a[j][j] == -1:
        for i in range(j):
            do(i, j, a[i][j])
        do(0, j, 1)
        do(j, 0, -2)


def _clear_row(r, a, j, do):
    """Zero row j left of the diagonal by subtracting rows 0..j-1."""
    target = a[j][:j]
    if all(r.is_zero(x) for x in target):
        return
    block = [row[:j] for row in a[:j]]
    if r.is_field:
        inv = inverse(r, block)
        coeffs = [sum_ring(r, (r.mul(target[k], inv[k][i]) for k in range(j))) for i in range(j)]
    else:
        inv = inverse(QQ, [[Fraction(x) for x in row] for row in block])
        coeffs = [sum(Fraction(target[k]) * inv[k][i] for k in range(j)) for i in range(j)]
        if any(c.denominator != 1 for c in coeffs):
            raise VerificationError("leading block is not unimodular", {"column": j})
        coeffs = [int(c) for c in coeffs]
    for i, c in enumerate(coeffs):
        do(j, i, r.neg(c))


def sum_ring(r, items):
    acc = r.zero
    for x in items:
        acc = r.add(acc, x)
    return acc


# --------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class FieldK1:
    group: FGAbelianGroup | None
    symbolic: str
    generator: object
    citation: str

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json() if self.group else None,
            "value": self.symbolic,
            "generator": self.generator,
            "citation": self.citation,
        }


def k1_of_field(f) -> FieldK1:
    """K_1 of a field is its unit group; Z is included as the Euclidean case."""
    from .kfinite import FiniteField, unit_group

    r = _ring(f)
    if r is QQ:
        return FieldK1(None, "Q*", None, "K_1(F) = F* by Gauss reduction")
    if r is ZZ:
        return FieldK1(FGAbelianGroup.cyclic(2), "Z/2", -1, "K_1 table, row Z: det = ±1 and SL(Z) is elementary")
    if isinstance(r, FiniteField):
        g, gen = unit_group(r)
        return FieldK1(g, str(g), r.to_json(gen), "K_1(F) = F* by Gauss reduction")
    raise InputError(f"no K_1 computation for {r!r}")


_COMMUTATIVE_BANACH = "K_1 table: commutative Banach algebra, K_1 = pi_0(SL(A)) ⊕ A*"

_K1_SYMBOLIC = {
    "C_C(S1)": ("Map(S^1, C*)", _COMMUTATIVE_BANACH),
    "C_R(S1)": ("Map(S^1, R*)", _COMMUTATIVE_BANACH),
    "C_C(S2)": ("Map(S^2, C*)", _COMMUTATIVE_BANACH),
    "C_R(S2)": ("Map(S^2, R*)", _COMMUTATIVE_BANACH),
}


def k1_known(r) -> KnownValue:
    r = RingDescriptor.coerce(r)
    if r.tag == "Z":
        g = FGAbelianGroup.cyclic(2)
        return KnownValue(g, str(g), "K_1 table, row Z: det = ±1 and SL(Z) is elementary")
    if r.tag == "Z(sqrt-5)":
        g = FGAbelianGroup.cyclic(2)
        return KnownValue(g, str(g), "K_1 table, row Z(sqrt-5): units of an imaginary quadratic ring")
    if r.tag == "C[G]":
        return KnownValue(None, f"(C*)^{r.N}", "K_1 table, row C[G]: C[G] is a product of N matrix algebras")
    if r.tag in _K1_SYMBOLIC:
        value, cite = _K1_SYMBOLIC[r.tag]
        return KnownValue(None, value, cite)
    if r.tag == "M_n":
        cite = "K_1 table, row M_n(A): Morita invariance, K_1(M_n(A)) = K_1(A)"
        if r.base is None:
            return KnownValue(None, "K_1(A)", cite)
        inner = k1_known(r.base)
        return KnownValue(inner.group, inner.symbolic, cite + f"; {inner.citation}")
    if r.tag == "compact":
        return KnownValue(FGAbelianGroup(), "0", "K_1 table, row compact operators")
    if r.tag == "cyclotomic":
        g = cyclotomic_k1(r.p)
        return KnownValue(g, str(g), "units of the cyclotomic ring: Z^((p-3)/2) ⊕ Z/p")
    raise InputError(f"K_1 of {r.label()} is not tabulated")


def cyclotomic_k1(p: int) -> FGAbelianGroup:
    """K_1 of Z[x]/(1 + x + ... + x^(p-1)) for an odd prime p."""
    from .kfinite import is_prime

    if isinstance(p, bool) or not isinstance(p, int) or p < 3 or not is_prime(p):
        raise InputError(f"p must be an odd prime, got {p!r}")
    return FGAbelianGroup((p - 3) // 2, (p,))


# --------------------------------------------------------------------------
# loop ring


def parse_polynomial(value, base=ZZ) -> tuple:
    """Coefficients (constant term first) from a list or an expression in x."""
    if isinstance(value, (list, tuple)):
        coeffs = [base.coerce(c) for c in value]
    else:
        import sympy

        from sympy.parsing.sympy_parser import (
            implicit_multiplication_application,
            parse_expr,
            standard_transformations,
        )

        x = sympy.Symbol("x")
        rules = standard_transformations + (implicit_multiplication_application,)
        try:
            expr = parse_expr(str(value).replace("^", "**"), local_dict={"x": x}, transformations=rules)
            if expr.free_symbols - {x}:
                raise TypeError("extra symbols")
            poly = sympy.Poly(expr, x, domain="QQ")
        except (sympy.SympifyError, sympy.PolynomialError, SyntaxError, TypeError, ValueError) as exc:
            raise InputError(f"cannot read {value!r} as a polynomial in x") from exc
        coeffs = [base.coerce(Fraction(int(c.p), int(c.q))) for c in reversed(poly.all_coeffs())]
    while len(coeffs) > 1 and base.is_zero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs) if coeffs else (base.zero,)


def poly_mul(base, a: Sequence, b: Sequence) -> tuple:
    out = [base.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = base.add(out[i + j], base.mul(x, y))
    return tuple(out)


def poly_eval(base, a: Sequence, t):
    acc = base.zero
    for c in reversed(a):
        acc = base.add(base.mul(acc, t), c)
    return acc


def format_polynomial(base, a: Sequence) -> str:
    terms = []
    for k, c in enumerate(a):
        if base.is_zero(c):
            continue
        s = base.format(c)
        mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
        if mono and s in ("1", "-1"):
            s = s[:-1]
        terms.append(f"{s}{mono}")
    if not terms:
        return "0"
    return " + ".join(reversed(terms)).replace("+ -", "- ")


@dataclass(frozen=True)
class LoopRingElement:
    """P in x(x-1)A[x], i.e. P(0) = P(1) = 0."""

    base: object
    coeffs: tuple

    def __post_init__(self):
        if not in_loop_ring(self.coeffs, self.base):
            raise InputError(f"{format_polynomial(self.base, self.coeffs)} does not vanish at 0 and 1")

    def __mul__(self, other: LoopRingElement) -> LoopRingElement:
        return LoopRingElement(self.base, poly_mul(self.base, self.coeffs, other.coeffs))


def in_loop_ring(coeffs: Sequence, base=ZZ) -> bool:
    return base.is_zero(poly_eval(base, coeffs, base.zero)) and base.is_zero(poly_eval(base, coeffs, base.one))


@dataclass(frozen=True)
class LoopRingReport:
    p: str
    q: str
    p_member: bool
    q_member: bool
    product: str
    product_member: bool
    ideal_checked: int
    ideal_closed: bool | None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def loop_ring_check(p, q="x^2 - x", base=ZZ, samples: int = 16, seed: int = 0) -> LoopRingReport:
    """Membership of p, q in the loop ring and closure of products.

    The two-sided ideal property is sampled on ``samples`` random r in A[x]:
    r*p and p*r must lie in the loop ring whenever p does.
    """
    base = _ring(base)
    pc, qc = parse_polynomial(p, base), parse_polynomial(q, base)
    prod = poly_mul(base, pc, qc)
    p_in, q_in = in_loop_ring(pc, base), in_loop_ring(qc, base)
    closed = None
    if p_in:
        rng = random.Random(seed)
        closed = True
        for _ in range(samples):
            rc = tuple(base.random_element(rng) for _ in range(rng.randint(1, 4)))
            if not (in_loop_ring(poly_mul(base, rc, pc), base) and in_loop_ring(poly_mul(base, pc, rc), base)):
                closed = False
                break
    return LoopRingReport(
        format_polynomial(base, pc),
        format_polynomial(base, qc),
        p_in,
        q_in,
        format_polynomial(base, prod),
        in_loop_ring(prod, base),
        samples if p_in else 0,
        closed,
    )


# --------------------------------------------------------------------------
# the circle ring Z[x, y]/(x^2 + y^2 - 1)

_CIRCLE_MATRICES = {
    "rotation": (({(1, 0): 1}, {(0, 1): -1}), ({(0, 1): 1}, {(1, 0): 1})),
    "inverse": (({(1, 0): 1}, {(0, 1): 1}), ({(0, 1): -1}, {(1, 0): 1})),
    "identity": (({(0, 0): 1}, {}), ({}, {(0, 0): 1})),
}


def _bivariate_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + c * d
    return {k: v for k, v in out.items() if v}


def _bivariate_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def reduce_circle(a: dict) -> dict:
    """Normal form modulo x^2 + y^2 - 1: y-degree at most 1."""
    out: dict = {}
    todo = list(a.items())
    while todo:
        (i, j), c = todo.pop()
        if j >= 2:
            todo.append(((i, j - 2), c))
            todo.append(((i + 2, j - 2), -c))
        else:
            out[(i, j)] = out.get((i, j), 0) + c
    return {k: v for k, v in out.items() if v}


def _format_bivariate(a: dict) -> str:
    if not a:
        return "0"
    terms = []
    for (i, j), c in sorted(a.items(), reverse=True):
        mono = ("x" if i == 1 else f"x^{i}" if i else "") + ("y" if j == 1 else f"y^{j}" if j else "")
        s = str(c)
        if mono and c in (1, -1):
            s = s[:-1]
        terms.append(f"{s}{mono}")
    return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class CircleRingReport:
    variant: str
    matrix: tuple[tuple[str, str], tuple[str, str]]
    determinant: str
    samples: int
    winding: int
    verdict: str

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "matrix": [list(r) for r in self.matrix],
            "determinant": self.determinant,
            "samples": self.samples,
            "winding": self.winding,
            "verdict": self.verdict,
        }


def circle_ring_example(variant: str = "rotation", samples: int = 1024) -> CircleRingReport:
    """Winding number of [[x, -y], [y, x]] after x -> cos t, y -> sin t.

    The rotation loop in SO(2) is read as the complex loop m00 + i m10.
    """
    from .bott import winding_number

    if variant not in _CIRCLE_MATRICES:
        raise InputError(f"unknown variant {variant!r}; expected one of {sorted(_CIRCLE_MATRICES)}")
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 8:
        raise InputError("need at least 8 samples on the circle")
    (a, b), (c, d) = _CIRCLE_MATRICES[variant]
    det = reduce_circle(_bivariate_sub(_bivariate_mul(a, d), _bivariate_mul(b, c)))
    if det != {(0, 0): 1}:
        raise VerificationError(f"determinant reduces to {_format_bivariate(det)}, not 1")
    t = 2 * math.pi * np.arange(samples) / samples
    x, y = np.cos(t), np.sin(t)

    def ev(poly):
        return sum((coef * x**i * y**j for (i, j), coef in poly.items()), np.zeros(samples))

    m00, m01, m10, m11 = ev(a), ev(b), ev(c), ev(d)
    if np.max(np.abs(m00 - m11)) > 1e-12 or np.max(np.abs(m01 + m10)) > 1e-12:
        raise VerificationError("embedded matrices are not rotations")
    w = winding_number(m00 + 1j * m10)
    return CircleRingReport(
        variant,
        ((_format_bivariate(a), _format_bivariate(b)), (_format_bivariate(c), _format_bivariate(d))),
        _format_bivariate(det),
        samples,
        w,
        "nontrivial K1 class" if w else "trivial",
    )


def random_elementary_product(n: int, ring, rng: random.Random, steps: int = 8) -> list[list]:
    """Product of random elementary matrices (det 1), used to sample SL_n."""
    m = [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]
    if n < 2:
        return m
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        AddMultiple(i, j, ring.random_element(rng)).apply(ring, m)
    return m

