"""K_0: idempotent matrices over exact fields, the rank completion, Morita
transport, unitalization and the table of known K_0 groups."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .abelian import FGAbelianGroup
from .errors import InputError, VerificationError
from .fields import QQ, ZZ, coerce_matrix, identity, is_square, mat_mul, mat_sub, matrix_to_json, rank, ring_from_name
from .grothendieck import GroupCompletion, PresentedMonoid, symmetrize_presented


def _field(f):
    ring = ring_from_name(f) if isinstance(f, str) else f
    if not getattr(ring, "is_field", False):
        raise InputError(f"{ring!r} is not a field")
    return ring


@dataclass(frozen=True)
class IdempotentMatrix:
    """Square Q with Q^2 = Q exactly; build through :func:`verify_idempotent`."""

    field: object
    n: int
    entries: tuple[tuple, ...]

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def to_json(self) -> dict:
        return {"field": self.field.name, "n": self.n, "entries": matrix_to_json(self.field, self.rows())}


def verify_idempotent(q: Sequence[Sequence], field=QQ) -> IdempotentMatrix:
    f = _field(field)
    m = coerce_matrix(f, q)
    if not is_square(m):
        raise InputError("an idempotent must be a square matrix")
    sq = mat_mul(f, m, m)
    for i, (row, srow) in enumerate(zip(m, sq)):
        for j, (x, y) in enumerate(zip(row, srow)):
            if y != x:
                raise VerificationError(
                    f"Q^2 != Q at entry ({i}, {j}): Q has {f.format(x)}, Q^2 has {f.format(y)}",
                    {"entry": [i, j], "q": f.to_json(x), "q_squared": f.to_json(y)},
                )
    return IdempotentMatrix(f, len(m), tuple(tuple(r) for r in m))


def rank_class(q: IdempotentMatrix) -> int:
    """Dimension of Im(Q); over a field this is the full isomorphism invariant."""
    return rank(q.field, q.rows())


def complement(q: IdempotentMatrix) -> IdempotentMatrix:
    """1 - Q, the projector onto the complementary summand."""
    f = q.field
    return verify_idempotent(mat_sub(f, identity(f, q.n), q.rows()), f)


def block_sum(a: IdempotentMatrix, b: IdempotentMatrix) -> IdempotentMatrix:
    """Q ⊕ Q' as a block-diagonal matrix; represents the direct sum of modules."""
    if a.field != b.field:
        raise InputError("block sum of idempotents over different fields")
    f = a.field
    rows = [list(r) + [f.zero] * b.n for r in a.entries]
    rows += [[f.zero] * a.n + list(r) for r in b.entries]
    return IdempotentMatrix(f, a.n + b.n, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class FieldK0:
    """K_0 of a field: completion of the rank monoid N, generated by the line F."""

    field: object
    completion: GroupCompletion

    @property
    def group(self) -> FGAbelianGroup:
        return self.completion.group

    def class_of(self, q: IdempotentMatrix) -> tuple[int, ...]:
        if q.field != self.field:
            raise InputError(f"idempotent lives over {q.field!r}, not {self.field!r}")
        return self.completion.image({"line": rank_class(q)})


def k0_of_field(f=QQ) -> FieldK0:
    ring = _field(f)
    rank_monoid = PresentedMonoid(("line",), ())
    return FieldK0(ring, symmetrize_presented(rank_monoid))


def k0_class(q: IdempotentMatrix) -> tuple[int, ...]:
    return k0_of_field(q.field).class_of(q)


# --------------------------------------------------------------------------
# table rings

_TAG_ALIASES = {
    "z": "Z",
    "z(sqrt-5)": "Z(sqrt-5)",
    "z[sqrt-5]": "Z(sqrt-5)",
    "z(√−5)": "Z(sqrt-5)",
    "z(√-5)": "Z(sqrt-5)",
    "c[g]": "C[G]",
    "cg": "C[G]",
    "c_c(s1)": "C_C(S1)",
    "c_c(s^1)": "C_C(S1)",
    "c_r(s1)": "C_R(S1)",
    "c_r(s^1)": "C_R(S1)",
    "c_c(s2)": "C_C(S2)",
    "c_c(s^2)": "C_C(S2)",
    "c_r(s2)": "C_R(S2)",
    "c_r(s^2)": "C_R(S2)",
    "m_n": "M_n",
    "m_n(a)": "M_n",
    "compact": "compact",
    "k(h)": "compact",
    "bounded": "bounded",
    "b(h)": "bounded",
    "cyclotomic": "cyclotomic",
}

RING_TAGS = ("Z", "Z(sqrt-5)", "C[G]", "C_C(S1)", "C_R(S1)", "C_C(S2)", "C_R(S2)", "M_n", "compact", "bounded", "cyclotomic")


@dataclass(frozen=True)
class RingDescriptor:
    """One of the tabulated rings, with its parameter where it has one."""

    tag: str
    N: int | None = None  # number of irreducible representations, for C[G]
    n: int | None = None  # matrix size, for M_n
    p: int | None = None  # odd prime, for the cyclotomic ring
    base: RingDescriptor | None = None  # coefficient ring of M_n(A)

    def __post_init__(self):
        tag = _TAG_ALIASES.get(str(self.tag).strip().lower().replace(" ", ""))
        if tag is None:
            raise InputError(f"unknown ring {self.tag!r}; expected one of {', '.join(RING_TAGS)}")
        object.__setattr__(self, "tag", tag)
        if tag == "C[G]" and not _positive(self.N):
            raise InputError("C[G] needs N >= 1 (number of irreducible representations)")
        if tag == "M_n":
            if not _positive(self.n):
                raise InputError("M_n(A) needs n >= 1")
            if isinstance(self.base, (str, dict)):
                object.__setattr__(self, "base", RingDescriptor.coerce(self.base))
        if tag == "cyclotomic":
            from .kfinite import is_prime

            if not (isinstance(self.p, int) and self.p > 2 and is_prime(self.p)):
                raise InputError(f"cyclotomic ring needs an odd prime p, got {self.p!r}")

    @classmethod
    def coerce(cls, value) -> RingDescriptor:
        if isinstance(value, RingDescriptor):
            return value
        if isinstance(value, str):
            return cls(value)
        if isinstance(value, dict):
            try:
                return cls(value["tag"], value.get("N"), value.get("n"), value.get("p"), value.get("base"))
            except KeyError as exc:
                raise InputError(f"ring descriptor needs a 'tag': {value!r}") from exc
        raise InputError(f"cannot read a ring descriptor from {value!r}")

    def label(self) -> str:
        if self.tag == "C[G]":
            return f"C[G] (N={self.N})"
        if self.tag == "M_n":
            inner = self.base.label() if self.base else "A"
            return f"M_{self.n}({inner})"
        if self.tag == "cyclotomic":
            return f"Z[x]/(1+x+...+x^{self.p - 1})"
        return self.tag

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        for key in ("N", "n", "p"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.base is not None:
            out["base"] = self.base.to_json()
        return out


def _positive(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 1


@dataclass(frozen=True)
class KnownValue:
    """A tabulated K-group: an exact group when one exists, else a symbolic value."""

    group: FGAbelianGroup | None
    symbolic: str
    citation: str

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json() if self.group else None,
            "value": self.symbolic,
            "citation": self.citation,
        }


_K0_TABLE = {
    "Z": ("Z", "K_0 table, row Z: direct summands of Z^n are free"),
    "Z(sqrt-5)": ("Z/2 ⊕ Z", "K_0 table, row Z(sqrt-5): the Z/2 comes from a non-principal ideal class"),
    "C_C(S1)": ("Z", "K_0 table, row C_C(S^1): complex bundles on the circle are trivial"),
    "C_R(S1)": ("Z/2 ⊕ Z", "K_0 table, row C_R(S^1): the Z/2 is the Moebius band"),
    "C_C(S2)": ("Z ⊕ Z", "K_0 table, row C_C(S^2): one Z is the canonical line bundle L"),
    "C_R(S2)": ("Z/2 ⊕ Z", "K_0 table, row C_R(S^2): the Z/2 is the real bundle underlying L"),
    "compact": ("Z", "K_0 table, row compact operators"),
    "bounded": ("0", "K_0 table, row bounded operators: projective modules are Hilbert spaces"),
}


def k0_known(r) -> KnownValue:
    """Tabulated K_0 value with its provenance."""
    r = RingDescriptor.coerce(r)
    if r.tag in _K0_TABLE:
        text, cite = _K0_TABLE[r.tag]
        g = FGAbelianGroup.parse(text)
        return KnownValue(g, str(g), cite)
    if r.tag == "C[G]":
        g = FGAbelianGroup.free(r.N)
        return KnownValue(g, str(g), "K_0 table, row C[G]: Z^N, N the number of irreducible representations")
    if r.tag == "M_n":
        cite = "K_0 table, row M_n(A): Morita invariance, K(M_n(A)) = K(A)"
        if r.base is None:
            return KnownValue(None, "K(A)", cite)
        inner = k0_known(r.base)
        return KnownValue(inner.group, inner.symbolic, cite + f"; {inner.citation}")
    raise InputError(f"K_0 of {r.label()} is not tabulated")


# --------------------------------------------------------------------------
# Morita transport


@dataclass(frozen=True)
class MoritaTransport:
    """An idempotent over M_n(F), flattened to an (nk)x(nk) idempotent over F."""

    expanded: IdempotentMatrix
    n: int
    k: int

    @property
    def base_rank(self) -> int:
        return rank_class(self.expanded)

    @property
    def matrix_ring_rank(self) -> Fraction:
        """Rank over M_n(F) in units of the free module M_n(F); base rank / n."""
        return Fraction(self.base_rank, self.n)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "expanded": self.expanded.to_json(),
            "base_rank": self.base_rank,
            "matrix_ring_rank": str(self.matrix_ring_rank),
        }


def morita_transport(q, n: int, field=QQ) -> MoritaTransport:
    """Reinterpret a k x k matrix of n x n blocks as an nk x nk matrix over the field.

    ``q`` is either already flat (rows of length nk) or nested as
    ``q[i][j]`` = the (i, j) block given as n rows of n entries.
    """
    if not _positive(n):
        raise InputError(f"block size must be a positive integer, got {n!r}")
    f = _field(field)
    rows = [list(r) for r in q]
    if rows and all(isinstance(b, (list, tuple)) for r in rows for b in r):
        k = len(rows)
        flat = []
        for i, brow in enumerate(rows):
            if len(brow) != k:
                raise InputError(f"block row {i} has {len(brow)} blocks, expected {k}")
            for bi in range(n):
                line = []
                for j, block in enumerate(brow):
                    if len(block) != n or any(not isinstance(r, (list, tuple)) or len(r) != n for r in block):
                        raise InputError(f"block ({i}, {j}) is not {n}x{n}")
                    line.extend(block[bi])
                flat.append(line)
    else:
        flat = rows
        size = len(flat)
        if size % n or any(len(r) != size for r in flat):
            raise InputError(f"a {size}x{len(flat[0]) if flat else 0} matrix has no {n}x{n} block structure")
        k = size // n
    return MoritaTransport(verify_idempotent(flat, f), n, k)


# --------------------------------------------------------------------------
# unitalization


@dataclass(frozen=True)
class Unitalization:
    """A+ = A x k with (a, l)(a', l') = (aa' + l a' + l' a, l l')."""

    add: Callable = field(default=lambda a, b: a + b)
    mul: Callable = field(default=lambda a, b: a * b)
    scale: Callable = field(default=lambda lam, a: lam * a)
    zero: object = 0
    scalar_one: object = 1
    scalar_zero: object = 0

    @property
    def one(self) -> tuple:
        return (self.zero, self.scalar_one)

    def multiply(self, x: tuple, y: tuple) -> tuple:
        (a, lam), (b, mu) = x, y
        first = self.add(self.add(self.mul(a, b), self.scale(lam, b)), self.scale(mu, a))
        return (first, lam * mu)

    def plus(self, x: tuple, y: tuple) -> tuple:
        return (self.add(x[0], y[0]), x[1] + y[1])


def unitalize(base=ZZ) -> Unitalization:
    """A+ for a ring handle acting on itself, i.e. k = A as in the integer example."""
    return Unitalization(base.add, base.mul, base.mul, base.zero, base.one, base.zero)


def reduced_k0(value: FGAbelianGroup, unit_image_rank: int = 1) -> FGAbelianGroup:
    """Cokernel of K(Z) -> K(A) when its image is ``unit_image_rank`` free summands."""
    if isinstance(unit_image_rank, bool) or not isinstance(unit_image_rank, int) or unit_image_rank < 0:
        raise InputError("unit_image_rank must be a non-negative integer")
    if value.free_rank < unit_image_rank:
        raise InputError(f"{value} has no free summand of rank {unit_image_rank} to split off")
    return FGAbelianGroup(value.free_rank - unit_image_rank, value.torsion)
