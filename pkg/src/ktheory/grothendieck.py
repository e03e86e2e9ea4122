"""Group completion of commutative monoids.

Two independent routes:

* :func:`symmetrize_presented` takes generators and relations and returns
  the abelian group with the same presentation (cokernel of the matrix of
  relation differences).
* :func:`symmetrize_finite` takes a full addition table and works with
  pairs ``(a, b)`` of elements directly: ``(a, b) ~ (c, d)`` iff some ``e``
  has ``a + d + e = b + c + e``. No presentation is used, so the two
  routes check each other.

Both return a :class:`GroupCompletion` whose ``canonical_map`` sends each
generator to its coordinates in the canonical form of the group.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .abelian import FGAbelianGroup, IntMatrix, finite_group_structure, smith_form
from .errors import InputError, VerificationError

MAX_FINITE_SIZE = 64

Vector = tuple[int, ...]

_NAME = r"[A-Za-z_][A-Za-z0-9_']*"


@dataclass(frozen=True)
class PresentedMonoid:
    """Commutative monoid ``<generators | u_j = v_j>``; sides are count vectors."""

    generators: tuple[str, ...]
    relations: tuple[tuple[Vector, Vector], ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            raise InputError(f"duplicate generator names in {list(gens)}")
        rels = []
        for rel in self.relations:
            try:
                u, v = rel
            except (TypeError, ValueError) as exc:
                raise InputError(f"relation must be a pair, got {rel!r}") from exc
            sides = []
            for side in (u, v):
                side = tuple(side)
                if len(side) != len(gens) or any(
                    isinstance(c, bool) or not isinstance(c, int) or c < 0 for c in side
                ):
                    raise InputError(f"relation side {side!r} is not a count vector over {list(gens)}")
                sides.append(side)
            rels.append(tuple(sides))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", tuple(rels))

    @classmethod
    def build(cls, generators: Sequence[str], relations: Sequence = ()) -> PresentedMonoid:
        """Relations may be given as ``"a+a = a"`` strings or pairs of expressions/mappings."""
        gens = tuple(generators)
        out = []
        for rel in relations:
            if isinstance(rel, str):
                if rel.count("=") != 1:
                    raise InputError(f"relation {rel!r} needs exactly one '='")
                rel = rel.split("=")
            try:
                u, v = rel
            except (TypeError, ValueError) as exc:
                raise InputError(f"relation must be a pair, got {rel!r}") from exc
            out.append((combination(gens, u), combination(gens, v)))
        return cls(gens, tuple(out))

    def relation_matrix(self) -> IntMatrix:
        cols = [[a - b for a, b in zip(u, v)] for u, v in self.relations]
        r = len(self.generators)
        return IntMatrix.from_rows([[c[i] for c in cols] for i in range(r)], len(cols))

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [[format_combination(self.generators, u), format_combination(self.generators, v)]
                          for u, v in self.relations],
        }


def combination(generators: Sequence[str], expr) -> Vector:
    """Count vector of a formal sum: ``"2a + b"``, ``{"a": 2, "b": 1}`` or a vector."""
    gens = list(generators)
    counts = [0] * len(gens)
    if isinstance(expr, Mapping):
        items = expr.items()
    elif isinstance(expr, (list, tuple)):
        if len(expr) != len(gens):
            raise InputError(f"vector {list(expr)} has the wrong length for generators {gens}")
        items = zip(gens, expr)
    elif isinstance(expr, str):
        items = []
        text = expr.strip()
        if text and text != "0":
            for term in text.split("+"):
                term = term.strip()
                m = re.fullmatch(rf"(\d+)?\s*\*?\s*({_NAME})", term)
                if not m:
                    raise InputError(f"cannot parse term {term!r} in {expr!r}")
                items.append((m.group(2), int(m.group(1) or 1)))
    else:
        raise InputError(f"cannot interpret {expr!r} as a formal sum")
    for name, c in items:
        if name not in gens:
            raise InputError(f"unknown generator {name!r}; declared: {gens}")
        if isinstance(c, bool) or not isinstance(c, int):
            raise InputError(f"coefficient of {name!r} must be an integer")
        counts[gens.index(name)] += c
    return tuple(counts)


def format_combination(generators: Sequence[str], vec: Sequence[int]) -> str:
    terms = [(f"{c}{g}" if c != 1 else g) for g, c in zip(generators, vec) if c]
    return " + ".join(terms) if terms else "0"


def parse_presentation(text: str) -> PresentedMonoid:
    """Parse ``generators: a b; relations: a+a = a, a+b = b+a`` or its JSON equivalent."""
    text = text.strip()
    if text.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad monoid JSON: {exc}") from exc
        return presentation_from_json(data)
    sections = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        key, sep, value = part.partition(":")
        if not sep:
            raise InputError(f"expected 'key: value' in {part!r}")
        sections[key.strip().lower()] = value.strip()
    if "generators" not in sections:
        raise InputError("presentation needs a 'generators:' section")
    gens = sections["generators"].replace(",", " ").split()
    rels = [r for r in sections.get("relations", "").split(",") if r.strip()]
    return PresentedMonoid.build(gens, rels)


def presentation_from_json(data: dict) -> PresentedMonoid:
    try:
        return PresentedMonoid.build(data["generators"], data.get("relations", []))
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed monoid JSON: {data!r}") from exc


# --------------------------------------------------------------------------
# finite monoids


@dataclass(frozen=True)
class FiniteMonoid:
    """Commutative monoid on ``0..size-1`` given by its full addition table."""

    size: int
    add_table: tuple[tuple[int, ...], ...]
    zero: int = 0
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        n = self.size
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise InputError("a monoid has at least one element")
        table = tuple(tuple(row) for row in self.add_table)
        if len(table) != n or any(len(row) != n for row in table):
            raise InputError(f"addition table must be {n}x{n}")
        if any(not isinstance(x, int) or not 0 <= x < n for row in table for x in row):
            raise InputError("addition table entries must be element indices")
        if not 0 <= self.zero < n:
            raise InputError("zero is not an element")
        names = tuple(self.names) if self.names else tuple(f"m{i}" for i in range(n))
        if len(names) != n or len(set(names)) != n:
            raise InputError("names must be distinct and one per element")
        object.__setattr__(self, "add_table", table)
        object.__setattr__(self, "names", names)
        for i in range(n):
            if table[self.zero][i] != i:
                raise InputError(f"{names[self.zero]} is not neutral for {names[i]}")
            for j in range(i + 1, n):
                if table[i][j] != table[j][i]:
                    raise InputError(f"table is not commutative at ({i}, {j})")
        for a, b, c in itertools.product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise InputError(f"table is not associative at ({a}, {b}, {c})")

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    @classmethod
    def from_json(cls, data: dict) -> FiniteMonoid:
        try:
            table = data["table"]
            return cls(len(table), table, int(data.get("zero", 0)), tuple(data.get("names", ())))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed finite monoid JSON: {data!r}") from exc

    def to_json(self) -> dict:
        return {"table": [list(r) for r in self.add_table], "zero": self.zero, "names": list(self.names)}

    @classmethod
    def from_operation(cls, elements: Sequence, op, zero, names: Sequence[str] | None = None) -> FiniteMonoid:
        index = {e: i for i, e in enumerate(elements)}
        table = [[index[op(a, b)] for b in elements] for a in elements]
        names = names or [str(e) for e in elements]
        return cls(len(elements), table, index[zero], tuple(names))


def table_presentation(m: FiniteMonoid) -> PresentedMonoid:
    """One generator per element, one relation per table entry, and ``zero = 0``."""
    n = m.size

    def unit(i):
        return tuple(int(k == i) for k in range(n))

    rels = [(unit(m.zero), (0,) * n)]
    for i in range(n):
        for j in range(i, n):
            lhs = tuple(int(k == i) + int(k == j) for k in range(n))
            rels.append((lhs, unit(m.add_table[i][j])))
    return PresentedMonoid(m.names, tuple(rels))


# --------------------------------------------------------------------------
# completions


@dataclass(frozen=True)
class GroupCompletion:
    """The group S(M) with the canonical monoid map M -> S(M).

    ``basis_preimages[j]`` is an integer combination of generators (entries
    may be negative, i.e. a difference of monoid elements) whose image is
    the j-th basis vector of ``group``.
    """

    group: FGAbelianGroup
    generators: tuple[str, ...]
    canonical_map: dict[str, Vector]
    basis_preimages: tuple[Vector, ...]
    relations: tuple[tuple[Vector, Vector], ...]
    backend: str

    def image(self, expr) -> Vector:
        vec = combination(self.generators, expr) if not _is_int_vector(expr, len(self.generators)) else tuple(expr)
        return self.image_of_vector(vec)

    def image_of_vector(self, vec: Sequence[int]) -> Vector:
        width = len(self.group.moduli)
        acc = [0] * width
        for g, c in zip(self.generators, vec):
            if c:
                acc = [x + c * y for x, y in zip(acc, self.canonical_map[g])]
        return self.group.reduce(acc)

    def same_class(self, x, y) -> bool:
        return self.image(x) == self.image(y)

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "pretty": str(self.group),
            "backend": self.backend,
            "canonical_map": {g: list(v) for g, v in self.canonical_map.items()},
        }


def _is_int_vector(expr, length: int) -> bool:
    return (
        isinstance(expr, (list, tuple))
        and len(expr) == length
        and all(isinstance(c, int) and not isinstance(c, bool) for c in expr)
    )


def symmetrize_presented(m: PresentedMonoid) -> GroupCompletion:
    """Group completion of a presented monoid via Smith normal form."""
    r = len(m.generators)
    rel = m.relation_matrix()
    sf = smith_form(rel)
    d = list(sf.diagonal) + [0] * (r - len(sf.diagonal))
    free_rows = [i for i in range(r) if d[i] == 0]
    torsion_rows = [i for i in range(r) if d[i] > 1]
    rows = free_rows + torsion_rows
    group = FGAbelianGroup(len(free_rows), tuple(d[i] for i in torsion_rows))
    canonical = {g: group.reduce([sf.left[i, k] for i in rows]) for k, g in enumerate(m.generators)}
    basis = tuple(tuple(sf.left_inverse[k, i] for k in range(r)) for i in rows)
    return GroupCompletion(group, m.generators, canonical, basis, m.relations, "presented")


def _cancellation(m: FiniteMonoid) -> list[list[bool]]:
    n, t = m.size, m.add_table
    return [[any(t[x][e] == t[y][e] for e in range(n)) for y in range(n)] for x in range(n)]


def _basis_of_finite_group(size: int, add, zero: int, invariants: Sequence[int]) -> list[int]:
    """Elements ``g_j`` of order ``invariants[j]`` with G the internal direct sum of the ``<g_j>``.

    Built from the largest invariant down: an element of maximal order in
    G/H is corrected by an element of H so that its order in G equals its
    order in the quotient.
    """
    neg = {}
    for x in range(size):
        neg[x] = next(y for y in range(size) if add(x, y) == zero)

    def times(k, x):
        acc = zero
        for _ in range(k):
            acc = add(acc, x)
        return acc

    subgroup = {zero}
    chosen = []
    for d in sorted(invariants, reverse=True):
        found = None
        for x in range(size):
            k, y = 1, x
            while y not in subgroup:
                y = add(y, x)
                k += 1
            if k != d:
                continue
            target = times(d, x)
            h = next((h for h in subgroup if times(d, h) == target), None)
            if h is not None:
                found = add(x, neg[h])
                break
        if found is None:
            raise VerificationError(f"could not split off a cyclic factor of order {d}")
        chosen.append(found)
        new = set(subgroup)
        y = found
        for _ in range(d - 1):
            new |= {add(s, y) for s in subgroup}
            y = add(y, found)
        subgroup = new
    if len(subgroup) != size:
        raise VerificationError("chosen cyclic factors do not generate the group")
    return list(reversed(chosen))


def symmetrize_finite(m: FiniteMonoid) -> GroupCompletion:
    """Group completion of a finite monoid straight from the pair definition."""
    from .env import guard

    limit = guard("KTHEORY_MAX_FINITE_MONOID", MAX_FINITE_SIZE)
    if m.size > limit:
        raise InputError(f"finite monoid has {m.size} elements; exhaustive search is limited to {limit}")
    n, t = m.size, m.add_table
    cancel = _cancellation(m)

    reps: list[tuple[int, int]] = []
    cls: dict[tuple[int, int], int] = {}
    # pairs (a, 0) first so basis elements come out as images of monoid elements when possible
    order = [(a, m.zero) for a in range(n)] + [(a, b) for a in range(n) for b in range(n) if b != m.zero]
    for a, b in order:
        for idx, (c, d) in enumerate(reps):
            if cancel[t[a][d]][t[b][c]]:
                cls[(a, b)] = idx
                break
        else:
            cls[(a, b)] = len(reps)
            reps.append((a, b))
    size = len(reps)

    def pair_add(p, q):
        return (t[p[0]][q[0]], t[p[1]][q[1]])

    table = [[cls[pair_add(reps[i], reps[j])] for j in range(size)] for i in range(size)]
    # the class of a sum must not depend on the representative
    for pair, i in cls.items():
        for j in range(size):
            if cls[pair_add(pair, reps[j])] != table[i][j]:
                raise VerificationError("pair addition is not well defined on classes", {"pair": pair})
    zero = cls[(m.zero, m.zero)]
    for i, (a, b) in enumerate(reps):
        if table[i][cls[(b, a)]] != zero:
            raise VerificationError("class of (b, a) is not inverse to (a, b)", {"pair": (a, b)})

    def add(i, j):
        return table[i][j]

    group = finite_group_structure(size, add, zero)
    basis = _basis_of_finite_group(size, add, zero, group.torsion)
    coords: dict[int, Vector] = {}
    for combo in itertools.product(*(range(d) for d in group.torsion)):
        x = zero
        for c, g in zip(combo, basis):
            for _ in range(c):
                x = add(x, g)
        coords[x] = combo
    if len(coords) != size:
        raise VerificationError("basis coordinates are not a bijection")

    canonical = {m.names[x]: coords[cls[(x, m.zero)]] for x in range(n)}
    preimages = []
    for g in basis:
        a, b = reps[g]
        vec = [0] * n
        vec[a] += 1
        vec[b] -= 1
        preimages.append(tuple(vec))
    return GroupCompletion(group, m.names, canonical, tuple(preimages), table_presentation(m).relations, "finite")


def map_to_completion(completion: GroupCompletion, element) -> Vector:
    """Image of a monoid element: an index or name (finite backend) or a formal sum."""
    if completion.backend == "finite" and isinstance(element, int) and not isinstance(element, bool):
        if not 0 <= element < len(completion.generators):
            raise InputError(f"element index {element} out of range")
        element = completion.generators[element]
    if isinstance(element, str) and element in completion.canonical_map:
        return completion.canonical_map[element]
    return completion.image(element)


@dataclass(frozen=True)
class GroupHom:
    source: FGAbelianGroup
    target: FGAbelianGroup
    matrix: IntMatrix  # target coordinates x source coordinates

    def __call__(self, coords: Sequence[int]) -> Vector:
        return self.target.reduce(self.matrix.apply(list(coords)))


def induced_map(source: GroupCompletion, target: GroupCompletion, assignment: Mapping[str, object]) -> GroupHom:
    """Group map S(M) -> S(N) induced by sending each generator of M to an element of N."""
    missing = [g for g in source.generators if g not in assignment]
    if missing:
        raise InputError(f"assignment misses generators {missing}")
    images = {g: target.image(assignment[g]) for g in source.generators}

    def on_vector(vec):
        acc = [0] * len(target.group.moduli)
        for g, c in zip(source.generators, vec):
            acc = [x + c * y for x, y in zip(acc, images[g])]
        return target.group.reduce(acc)

    for u, v in source.relations:
        if on_vector(u) != on_vector(v):
            raise InputError("assignment does not respect the relations of the source monoid")
    columns = [on_vector(w) for w in source.basis_preimages]
    rows = len(target.group.moduli)
    mat = IntMatrix.from_rows([[col[i] for col in columns] for i in range(rows)], len(columns))
    return GroupHom(source.group, target.group, mat)


def completion_isomorphism(a: GroupCompletion, b: GroupCompletion) -> GroupHom:
    """The isomorphism S(M) -> S(M) between two completions of the same monoid.

    Raises :class:`VerificationError` if the identity assignment does not
    induce mutually inverse maps, i.e. the canonical maps are incompatible.
    """
    if a.generators != b.generators:
        raise InputError("completions are over different generator sets")
    ident = {g: {g: 1} for g in a.generators}
    h = induced_map(a, b, ident)
    k = induced_map(b, a, ident)
    for src, fwd, back in ((a, h, k), (b, k, h)):
        for j in range(len(src.group.moduli)):
            e = [int(i == j) for i in range(len(src.group.moduli))]
            if back(fwd(e)) != src.group.reduce(e):
                raise VerificationError("canonical maps are not compatible", {"basis_index": j})
    return h
