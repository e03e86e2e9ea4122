"""Bernoulli numbers, the conjectural K_n(Z) table, K_2(Q) and the rational
pseudo-isotopy groups.

Indexing: ``bernoulli(k)`` is the positive number B_k with

    x / (1 - e^(-x)) = 1 + x/2 + sum_k (-1)^(k-1) B_k x^(2k) / (2k)!

so B_k = |B_2k| in the classical signed convention (B_1 = 1/6, B_2 = 1/30,
B_6 = 691/2730).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .abelian import FGAbelianGroup
from .env import guard
from .errors import InputError

MAX_BERNOULLI_K = 200
MAX_KZ_INDEX = 2000
MAX_PRIME_BOUND = 100_000


def _check_index(value, name: str, low: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < low:
        raise InputError(f"{name} must be an integer >= {low}, got {value!r}")
    return value


class _GrowingTable:
    """Append-only cache; ``extend(upto)`` runs under a lock so readers see whole prefixes."""

    def __init__(self, step):
        self._values: list = []
        self._step = step
        self._lock = threading.Lock()

    def get(self, index: int):
        if index < len(self._values):
            return self._values[index]
        with self._lock:
            self._step(self._values, index)
            return self._values[index]


def _series_step(q: list, upto: int) -> None:
    # x/(1 - e^-x) - x/2 = t cosh t / sinh t with t = x/2, a series in y = x^2;
    # q_n are its coefficients, found by dividing the two series in y
    num = lambda j: Fraction(1, 4**j * math.factorial(2 * j))  # noqa: E731
    den = lambda j: Fraction(1, 4**j * math.factorial(2 * j + 1))  # noqa: E731
    for n in range(len(q), upto + 1):
        q.append(num(n) - sum(den(j) * q[n - j] for j in range(1, n + 1)))


_SERIES = _GrowingTable(_series_step)


def bernoulli_series(k: int) -> Fraction:
    """B_k by exact power-series inversion, no guard."""
    _check_index(k, "k", 1)
    return _SERIES.get(k) * math.factorial(2 * k) * (-1) ** (k - 1)


def bernoulli_recurrence(k: int) -> Fraction:
    """Independent oracle: b_n = n! h_n from (1 - e^-x) * sum h_n x^n = x.

    Comparing coefficients of x^n gives sum_{j=1..n} (-1)^(j+1) C(n, j) b_(n-j) = [n = 1].
    """
    _check_index(k, "k", 1)
    top = 2 * k
    b = [Fraction(1)]
    for n in range(2, top + 2):
        rest = sum((-1) ** (j + 1) * math.comb(n, j) * b[n - j] for j in range(2, n + 1))
        b.append(-rest / n)
    return b[top] * (-1) ** (k - 1)


def _tangent_step(t: list, upto: int) -> None:
    # tangent numbers T_1..T_upto (index 0 unused); recomputed from scratch on growth
    n = max(upto, 2 * len(t), 8)
    row = [0] * (n + 1)
    row[1] = 1
    for k in range(2, n + 1):
        row[k] = (k - 1) * row[k - 1]
    for k in range(2, n + 1):
        for j in range(k, n + 1):
            row[j] = (j - k) * row[j - 1] + (j - k + 2) * row[j]
    t[:] = row


_TANGENT = _GrowingTable(_tangent_step)


def bernoulli_tangent(k: int) -> Fraction:
    """B_k = 2k T_k / (4^k (4^k - 1)) from the integer tangent numbers T_k; fast for large k."""
    _check_index(k, "k", 1)
    return Fraction(2 * k * _TANGENT.get(k), 4**k * (4**k - 1))


@dataclass(frozen=True)
class BernoulliEntry:
    k: int
    value: Fraction

    @property
    def c(self) -> int:
        return self.value.numerator

    @property
    def d(self) -> int:
        return self.value.denominator

    def to_json(self) -> dict:
        return {"k": self.k, "value": f"{self.c}/{self.d}", "c": self.c, "d": self.d}


def bernoulli(k: int) -> BernoulliEntry:
    limit = guard("KTHEORY_MAX_BERNOULLI_K", MAX_BERNOULLI_K)
    _check_index(k, "k", 1)
    if k > limit:
        raise InputError(f"bernoulli is limited to k <= {limit}, got {k}")
    return BernoulliEntry(k, bernoulli_series(k))


# --------------------------------------------------------------------------
# K_n(Z)


@dataclass(frozen=True)
class KZTableRow:
    n: int
    group: FGAbelianGroup
    source: str  # conjecture-formula | tabulated | verified-note
    formula_tag: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "group": self.group.to_json(),
            "pretty": str(self.group),
            "source": self.source,
            "formula": self.formula_tag,
        }


def kz_conjecture(n: int) -> KZTableRow:
    """K_n(Z) from the eight residue-class formulas, with the two tabulated rows n = 0, 1."""
    limit = guard("KTHEORY_MAX_KZ_INDEX", MAX_KZ_INDEX)
    _check_index(n, "n", 0)
    if n > limit:
        raise InputError(f"kz_conjecture is limited to n <= {limit}, got {n}")
    if n == 0:
        return KZTableRow(0, FGAbelianGroup.free(1), "tabulated", "K_0 table")
    if n == 1:
        return KZTableRow(1, FGAbelianGroup.cyclic(2), "tabulated", "K_1 table")
    m, r = divmod(n, 8)
    if r in (2, 3):
        k = 2 * m + 1
    elif r in (6, 7):
        k = 2 * m + 2
    else:
        k = None
    if k is not None:
        b = bernoulli_tangent(k)
        c, d = b.numerator, b.denominator
    if r == 0:
        group = FGAbelianGroup()
    elif r == 1:
        group = FGAbelianGroup(1, (2,))
    elif r == 2:
        group = FGAbelianGroup.from_orders([2, c])
    elif r == 3:
        group = FGAbelianGroup.cyclic(8 * k * d)
    elif r == 4:
        group = FGAbelianGroup()
    elif r == 5:
        group = FGAbelianGroup.free(1)
    elif r == 6:
        group = FGAbelianGroup.cyclic(c)
    else:
        group = FGAbelianGroup.cyclic(4 * k * d)
    tag = f"r={r}" if k is None else f"r={r},k={k}"
    source = "verified-note" if n <= 6 else "conjecture-formula"
    return KZTableRow(n, group, source, tag)


# --------------------------------------------------------------------------
# K_2(Q)


@dataclass(frozen=True)
class K2QTorsion:
    bound: int
    group: FGAbelianGroup
    factors: tuple[tuple[str, FGAbelianGroup], ...]

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "group": self.group.to_json(),
            "pretty": str(self.group),
            "factors": [{"label": label, "group": str(g)} for label, g in self.factors],
        }


def _unit_count(p: int) -> int:
    return sum(1 for a in range(1, p) if math.gcd(a, p) == 1)


def k2_of_Q_torsion(bound: int) -> K2QTorsion:
    """Z/2 ⊕ (Z/p)* over odd primes p <= bound; each (Z/p)* is cyclic of order p - 1."""
    from .kfinite import GF, MAX_BRUTE_FORCE_Q, primes_up_to, unit_group

    _check_index(bound, "bound", 3)
    limit = guard("KTHEORY_MAX_PRIME_BOUND", MAX_PRIME_BOUND)
    if bound > limit:
        raise InputError(f"prime bound is limited to {limit}, got {bound}")
    factors = [("Z/2", FGAbelianGroup.cyclic(2))]
    for p in primes_up_to(bound):
        if p == 2:
            continue
        if p <= MAX_BRUTE_FORCE_Q:
            g, _ = unit_group(GF(p))
        else:
            g = FGAbelianGroup.cyclic(_unit_count(p))
        factors.append((f"(Z/{p})*", g))
    orders = [g.torsion[0] for _, g in factors]
    return K2QTorsion(bound, FGAbelianGroup.from_orders(orders), tuple(factors))


# --------------------------------------------------------------------------
# pseudo-isotopy


@dataclass(frozen=True)
class PseudoisotopyRow:
    i: int
    value: str  # "Q" or "0", the displayed period-4 sequence
    cross_check: str  # K_(i+2)(Z) ⊗ Q from the conjectural table
    agrees: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def pseudoisotopy_rational(i: int) -> PseudoisotopyRow:
    """pi_i(P(M)) ⊗ Q as displayed (Q exactly when i = 2 mod 4), with the K_(i+2)(Z) comparison.

    The two disagree (the table puts Q at i = 3 mod 4); the row reports
    both and never overrides the displayed value.
    """
    _check_index(i, "i", 0)
    value = "Q" if i % 4 == 2 else "0"
    rational = "Q" if kz_conjecture(i + 2).group.free_rank else "0"
    return PseudoisotopyRow(i, value, rational, value == rational)
