"""Finite fields and the K-groups of F_q that can be checked by brute force.

Quillen's values are evaluated by formula; K_2 is recomputed independently
from Matsumoto's presentation (Steinberg relations over the cyclic unit
group), and K_1 with Z/n coefficients by enumerating cosets of n-th powers.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass

from .abelian import (
    FGAbelianGroup,
    IntMatrix,
    cokernel,
    finite_group_structure,
    mult_by_n_kernel_cokernel,
)
from .errors import InputError, VerificationError

MAX_BRUTE_FORCE_Q = 64
MAX_EXTENSION_DEGREE = 6


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, bound + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, e)`` with ``q = p**e``, or None if q is not a prime power."""
    if isinstance(q, bool) or not isinstance(q, int) or q < 2:
        return None
    p = next(d for d in itertools.count(2) if q % d == 0)
    if not is_prime(p):
        return None
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


def prime_powers_up_to(bound: int) -> list[int]:
    return [q for q in range(2, bound + 1) if prime_power(q)]


# --------------------------------------------------------------------------
# polynomials over F_p, coefficient lists low degree first


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    a = _poly_trim(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p: int, degree: int):
    """Monic polynomials of a degree, ordered by (c0, c1, ...) lexicographically."""
    for coeffs in itertools.product(range(p), repeat=degree):
        yield list(coeffs) + [1]


def is_irreducible(poly, p: int) -> bool:
    """Exhaustive search for a monic factor of degree <= deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not _poly_mod(poly, f, p):
                return False
    return True


def least_irreducible(p: int, degree: int) -> tuple[int, ...]:
    for f in _monic_polys(p, degree):
        if is_irreducible(f, p):
            return tuple(f)
    raise VerificationError(f"no irreducible polynomial of degree {degree} over F_{p}")


# --------------------------------------------------------------------------
# finite fields


class FiniteField:
    """F_q with elements encoded as integers ``0..q-1``.

    The integer ``sum(c_i * p**i)`` stands for the residue of
    ``c_0 + c_1 x + ...`` modulo :attr:`modulus`, the lexicographically least
    monic irreducible polynomial of degree ``e`` (coefficients compared from
    the constant term up). For prime fields this is the usual residue.
    """

    is_field = True

    def __init__(self, q: int):
        pe = prime_power(q)
        if pe is None:
            raise InputError(f"{q!r} is not a prime power")
        self.p, self.e = pe
        self.q = q
        if self.e > 1 and (q > MAX_BRUTE_FORCE_Q or self.e > MAX_EXTENSION_DEGREE):
            raise InputError(f"extension fields are limited to q <= {MAX_BRUTE_FORCE_Q}")
        self.modulus = least_irreducible(self.p, self.e) if self.e > 1 else (0, 1)
        self.zero = 0
        self.one = 1
        self.characteristic = self.p
        self.name = f"F_{q}"
        self._mul = None
        self._inv = None
        if self.e > 1:
            self._mul = [[self._poly_mul(a, b) for b in range(q)] for a in range(q)]
            self._inv = [0] * q
            for a in range(1, q):
                self._inv[a] = next(b for b in range(1, q) if self._mul[a][b] == 1)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, FiniteField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    # encoding
    def vector(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_vector(self, v) -> int:
        v = list(v)
        if len(v) > self.e:
            raise InputError(f"{self.name} elements have {self.e} coordinates, got {v!r}")
        return sum((int(c) % self.p) * self.p**i for i, c in enumerate(v))

    def _poly_mul(self, a: int, b: int) -> int:
        va, vb = self.vector(a), self.vector(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(va):
            for j, y in enumerate(vb):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        return self.from_vector(_poly_mod(prod, self.modulus, self.p))

    # arithmetic
    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        return self.from_vector([(x + y) for x, y in zip(self.vector(a), self.vector(b))])

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        return self.from_vector([-x for x in self.vector(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self.name}")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv[a]

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        acc = 1
        while k:
            if k & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            k >>= 1
        return acc

    def is_zero(self, a) -> bool:
        return a == 0

    def from_int(self, n: int) -> int:
        return n % self.p

    def coerce(self, x) -> int:
        if isinstance(x, bool):
            raise InputError(f"not an element of {self.name}: {x!r}")
        if isinstance(x, (list, tuple)):
            return self.from_vector(x)
        if isinstance(x, str):
            x = x.strip()
            if not re.fullmatch(r"-?\d+", x):
                raise InputError(f"not an element of {self.name}: {x!r}")
            x = int(x)
        if not isinstance(x, int):
            raise InputError(f"not an element of {self.name}: {x!r}")
        if self.e == 1:
            return x % self.p
        if not 0 <= x < self.q:
            raise InputError(f"element code {x} out of range for {self.name}")
        return x

    def to_json(self, a: int):
        return a if self.e == 1 else self.vector(a)

    def format(self, a: int) -> str:
        return str(self.to_json(a))

    def random_element(self, rng, bound: int = 0) -> int:
        return rng.randrange(self.q)

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise InputError("0 is not a unit")
        k, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k



@functools.lru_cache(maxsize=None)
def GF(q: int) -> FiniteField:
    return FiniteField(q)


def _require_small(f: FiniteField):
    from .env import guard

    limit = guard("KTHEORY_MAX_Q", MAX_BRUTE_FORCE_Q)
    if f.q > limit:
        raise InputError(f"brute-force operations are limited to q <= {limit}, got {f.q}")


def unit_group(f: FiniteField) -> tuple[FGAbelianGroup, int]:
    """F* as ``Z/(q-1)`` together with the least generator, both verified by enumeration."""
    _require_small(f)
    units = list(f.units())
    generator = next((a for a in units if f.multiplicative_order(a) == len(units)), None)
    if generator is None:
        raise VerificationError(f"{f.name}* has no element of order {len(units)}; not a field?")
    powers = {f.pow(generator, k) for k in range(len(units))}
    if powers != set(units):
        raise VerificationError(f"powers of {generator} do not exhaust {f.name}*")
    return FGAbelianGroup.cyclic(len(units)), generator


def discrete_logs(f: FiniteField, generator: int) -> dict[int, int]:
    logs = {}
    x = 1
    for k in range(f.q - 1):
        logs[x] = k
        x = f.mul(x, generator)
    return logs


def quillen_k(q: int, index: int) -> FGAbelianGroup:
    """K_index(F_q): Z for index 0, Z/(q^i - 1) for index 2i-1, 0 for index 2i > 0."""
    if prime_power(q) is None:
        raise InputError(f"{q!r} is not a prime power")
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise InputError(f"K-group index must be a non-negative integer, got {index!r}")
    if index == 0:
        return FGAbelianGroup.free(1)
    if index % 2 == 0:
        return FGAbelianGroup()
    i = (index + 1) // 2
    return FGAbelianGroup.cyclic(q**i - 1)


def quillen_k_i(q: int, i: int, odd: bool) -> FGAbelianGroup:
    """Same as :func:`quillen_k` addressed by ``i``: K_{2i-1} if ``odd`` else K_{2i}."""
    if isinstance(i, bool) or not isinstance(i, int) or i < 1:
        raise InputError(f"i must be a positive integer, got {i!r}")
    return quillen_k(q, 2 * i - 1 if odd else 2 * i)


@dataclass(frozen=True)
class SymbolGroup:
    """F* (x) F* collapsed to Z/m, m = q - 1, modulo the Steinberg relations.

    ``{g^a, g^b}`` sits at ``a*b mod m``. Column 0 of ``relations`` is the
    modulus m, the rest are ``log(x) * log(1 - x)`` for x in F - {0, 1}.
    """

    field: FiniteField
    generator: int
    steinberg: tuple[tuple[int, int], ...]  # (x, class of x (x) (1-x))
    relations: IntMatrix
    quotient: FGAbelianGroup

    @property
    def m(self) -> int:
        return self.field.q - 1

    def symbol(self, x: int, y: int) -> int:
        """Coordinate of {x, y} in Z/m before quotienting."""
        logs = discrete_logs(self.field, self.generator)
        if self.m == 1:
            return 0
        return logs[x] * logs[y] % self.m

    def vanishes(self, value: int) -> bool:
        """Membership of a Z/m coordinate in the Steinberg relation lattice."""
        lattice = math.gcd(*self.relations.entries) if self.relations.entries else 0
        return value % lattice == 0 if lattice else value == 0


def steinberg_symbol_group(f: FiniteField) -> SymbolGroup:
    _require_small(f)
    _, g = unit_group(f)
    m = f.q - 1
    logs = discrete_logs(f, g)
    steinberg = []
    for x in range(f.q):
        if x in (0, 1):
            continue
        y = f.sub(1, x)
        steinberg.append((x, logs[x] * logs[y] % m if m > 1 else 0))
    relations = IntMatrix(1, 1 + len(steinberg), tuple([m] + [v for _, v in steinberg]))
    return SymbolGroup(f, g, tuple(steinberg), relations, cokernel(relations))


def milnor_k2(f: FiniteField) -> FGAbelianGroup:
    """K_2(F_q) from Matsumoto's presentation; always 0 for a finite field."""
    sg = steinberg_symbol_group(f)
    expected = quillen_k(f.q, 2)
    if sg.quotient != expected:
        raise VerificationError(
            f"symbol presentation of K_2({f.name}) gives {sg.quotient}, expected {expected}",
            "milnor_k2 != quillen_k(q, 2)",
        )
    return sg.quotient


def k1_mod_n(f: FiniteField, n: int) -> FGAbelianGroup:
    """F*/(F*)^n by enumerating cosets; checked against Z/gcd(n, q-1)."""
    _require_small(f)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    units = list(f.units())
    powers = frozenset(f.pow(a, n) for a in units)
    cosets: list[frozenset] = []
    coset_of = {}
    for a in units:
        if a in coset_of:
            continue
        c = frozenset(f.mul(a, h) for h in powers)
        for x in c:
            coset_of[x] = len(cosets)
        cosets.append(c)
    reps = [min(c) for c in cosets]
    ident = coset_of[1]

    def add(i, j):
        return coset_of[f.mul(reps[i], reps[j])]

    group = finite_group_structure(len(cosets), add, ident)
    expected = FGAbelianGroup.cyclic(math.gcd(n, f.q - 1))
    if group != expected:
        raise VerificationError(f"F*/(F*)^n came out {group}, expected {expected}")
    return group


@dataclass(frozen=True)
class SuslinValue:
    group: FGAbelianGroup
    twist: str | None

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "pretty": str(self.group), "twist": self.twist}


def suslin_mod_n(index: int, n: int) -> SuslinValue:
    """K_index(F; Z/n) for F algebraically closed of characteristic prime to n."""
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise InputError(f"index must be a non-negative integer, got {index!r}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    if index % 2:
        return SuslinValue(FGAbelianGroup(), None)
    return SuslinValue(FGAbelianGroup.cyclic(n), f"mu_{n}^(x){index // 2}")


@dataclass(frozen=True)
class CoefficientBounds:
    """What the Z/n exact sequence pins down about K_i(A; Z/n).

    The group is an extension of ``kernel_part`` by ``quotient_part``; which
    extension is not decided.
    """

    quotient_part: FGAbelianGroup
    kernel_part: FGAbelianGroup
    order: int

    @property
    def extension_determined(self) -> bool:
        return self.quotient_part.is_trivial or self.kernel_part.is_trivial

    def to_json(self) -> dict:
        return {
            "quotient_part": self.quotient_part.to_json(),
            "kernel_part": self.kernel_part.to_json(),
            "order": self.order,
            "extension_determined": self.extension_determined,
        }


def coeff_from_sequence(k_i: FGAbelianGroup, k_im1: FGAbelianGroup, n: int) -> CoefficientBounds:
    _, quotient_part = mult_by_n_kernel_cokernel(k_i, n)
    kernel_part, _ = mult_by_n_kernel_cokernel(k_im1, n)
    # both parts are finite: coker(n) on Z^r is (Z/n)^r, ker(n) only sees torsion
    return CoefficientBounds(quotient_part, kernel_part, quotient_part.order() * kernel_part.order())
