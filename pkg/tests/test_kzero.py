from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from ktheory import bott
from ktheory.abelian import FGAbelianGroup, parse_group
from ktheory.errors import InputError, VerificationError
from ktheory.fields import QQ, ZZ, identity, inverse, mat_mul, rank
from ktheory.kfinite import GF
from ktheory.kzero import (
    RingDescriptor,
    Unitalization,
    block_sum,
    complement,
    k0_class,
    k0_known,
    k0_of_field,
    morita_transport,
    rank_class,
    reduced_k0,
    unitalize,
    verify_idempotent,
)


def random_idempotent(field, n, r, rng):
    """P diag(1^r, 0^(n-r)) P^-1 for a random invertible P."""
    while True:
        p = [[field.random_element(rng) for _ in range(n)] for _ in range(n)]
        if rank(field, p) == n:
            break
    d = [[field.one if i == j and i < r else field.zero for j in range(n)] for i in range(n)]
    return mat_mul(field, mat_mul(field, p, d), inverse(field, p))


class TestIdempotents:
    def test_identity_over_q(self):
        q = verify_idempotent([[1, 0], [0, 1]])
        assert rank_class(q) == 2

    def test_diag_over_f5(self):
        assert rank_class(verify_idempotent([[1, 0], [0, 0]], GF(5))) == 1

    def test_rejects_non_idempotent(self):
        with pytest.raises(VerificationError) as err:
            verify_idempotent([[1, 1], [0, 1]])
        assert err.value.diagnostic["entry"] == [0, 1]

    def test_rejects_non_square(self):
        with pytest.raises(InputError):
            verify_idempotent([[1, 0]])

    def test_zero(self):
        assert rank_class(verify_idempotent([[0, 0, 0]] * 3)) == 0

    def test_clutching_point_is_rank_one(self):
        # alpha = (3/7, 4/7) normalizes to beta = (3/5, 4/5); f~ = 1 at the point
        q = verify_idempotent([["9/25", "12/25"], ["12/25", "16/25"]])
        assert rank_class(q) == 1
        # the same matrix assembled numerically by the clutching module
        bp, bm = bott.partition_of_unity(-1 / 14)
        assert (bp, bm) == pytest.approx((0.6, 0.8))
        numeric = np.array([[bp * bp, bp * bm], [bp * bm, bm * bm]])
        assert np.linalg.matrix_rank(numeric) == 1

    @pytest.mark.parametrize("field", [QQ, GF(5), GF(4), GF(9)], ids=str)
    def test_rank_plus_complement(self, field):
        rng = random.Random(7)
        for _ in range(40):
            n = rng.randint(1, 5)
            r = rng.randint(0, n)
            q = verify_idempotent(random_idempotent(field, n, r, rng), field)
            assert rank_class(q) == r
            assert rank_class(q) + rank_class(complement(q)) == n

    def test_conjugation_invariance(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(1, 4)
            q = verify_idempotent(random_idempotent(QQ, n, rng.randint(0, n), rng))
            while True:
                p = [[QQ.random_element(rng) for _ in range(n)] for _ in range(n)]
                if rank(QQ, p) == n:
                    break
            conj = mat_mul(QQ, mat_mul(QQ, p, q.rows()), inverse(QQ, p))
            assert rank_class(verify_idempotent(conj)) == rank_class(q)


class TestFieldK0:
    @pytest.mark.parametrize("f", ["Q", "F_7", "F_9"])
    def test_is_z(self, f):
        assert k0_of_field(f).group == FGAbelianGroup.free(1)

    def test_class_is_rank(self):
        k0 = k0_of_field(GF(7))
        q = verify_idempotent([[1, 0, 0], [0, 1, 0], [0, 0, 0]], GF(7))
        assert k0.class_of(q) == (2,)
        assert k0.completion.canonical_map == {"line": (1,)}

    def test_block_sum_adds_ranks(self):
        a = verify_idempotent([["1/2", "1/2"], ["1/2", "1/2"]])
        b = verify_idempotent([[1, 0], [0, 1]])
        s = block_sum(a, b)
        assert rank_class(s) == rank_class(a) + rank_class(b) == 3
        assert k0_class(s)[0] == k0_class(a)[0] + k0_class(b)[0]

    def test_field_mismatch(self):
        with pytest.raises(InputError):
            k0_of_field(QQ).class_of(verify_idempotent([[1]], GF(5)))

    def test_not_a_field(self):
        with pytest.raises(InputError):
            k0_of_field(ZZ)


class TestTable:
    @pytest.mark.parametrize(
        "ring, expected",
        [
            ("Z", "Z"),
            ("Z(sqrt-5)", "Z/2 ⊕ Z"),
            ({"tag": "C[G]", "N": 4}, "Z^4"),
            ("C_C(S1)", "Z"),
            ("C_R(S1)", "Z/2 ⊕ Z"),
            ("C_C(S2)", "Z ⊕ Z"),
            ("C_R(S2)", "Z/2 ⊕ Z"),
            ({"tag": "M_n", "n": 3, "base": "Z(sqrt-5)"}, "Z/2 ⊕ Z"),
            ("compact", "Z"),
            ("bounded", "0"),
        ],
    )
    def test_rows(self, ring, expected):
        value = k0_known(ring)
        assert value.group == parse_group(expected)
        assert value.citation

    def test_symbolic_morita(self):
        v = k0_known({"tag": "M_n", "n": 2})
        assert v.group is None and v.symbolic == "K(A)"

    def test_untabulated(self):
        with pytest.raises(InputError):
            k0_known({"tag": "cyclotomic", "p": 5})
        with pytest.raises(InputError):
            k0_known("Z[i]")

    @pytest.mark.parametrize(
        "bad",
        [{"tag": "C[G]"}, {"tag": "C[G]", "N": 0}, {"tag": "M_n"}, {"tag": "cyclotomic", "p": 4}, {"tag": "cyclotomic", "p": 2}],
    )
    def test_descriptor_validation(self, bad):
        with pytest.raises(InputError):
            RingDescriptor.coerce(bad)

    def test_descriptor_json(self):
        d = RingDescriptor.coerce({"tag": "M_n", "n": 2, "base": {"tag": "C[G]", "N": 3}})
        assert RingDescriptor.coerce(d.to_json()) == d
        assert RingDescriptor("z(√−5)").tag == "Z(sqrt-5)"


class TestMorita:
    def test_block_identity(self):
        mt = morita_transport([[[[1, 0], [0, 1]]]], 2)
        assert mt.expanded.rows() == identity(QQ, 2)
        assert mt.base_rank == 2 and mt.matrix_ring_rank == 1

    def test_diag_blocks(self):
        for n in range(1, 5):
            one = [[int(i == j) for j in range(n)] for i in range(n)]
            zero = [[0] * n for _ in range(n)]
            mt = morita_transport([[one, zero], [zero, zero]], n)
            assert mt.base_rank == n

    def test_zero(self):
        assert morita_transport([[0] * 4] * 4, 2).base_rank == 0

    def test_inconsistent_blocks(self):
        with pytest.raises(InputError):
            morita_transport([[0] * 3] * 3, 2)
        with pytest.raises(InputError):
            morita_transport([[[[1, 0], [0, 1]], [[0]]]], 2)

    def test_rank_correspondence(self):
        rng = random.Random(11)
        for n in range(1, 5):
            for k in range(1, 3):
                r = rng.randint(0, k)
                # an idempotent over M_n(Q)^k of M_n-rank r, conjugated over Q
                q = random_idempotent(QQ, n * k, n * r, rng)
                mt = morita_transport(q, n)
                assert mt.base_rank == n * r
                assert mt.matrix_ring_rank == r


class TestUnitalization:
    def test_example(self):
        assert unitalize().multiply((2, 3), (5, 7)) == (39, 21)

    def test_unit(self):
        u = unitalize()
        for a in (-3, 0, 4):
            assert u.multiply((a, 0), u.one) == (a, 0)
            assert u.multiply(u.one, (a, 5)) == (a, 5)

    def test_associative_and_distributive(self):
        rng = random.Random(5)
        u = Unitalization(scalar_one=Fraction(1))
        for _ in range(100):
            x, y, z = [(Fraction(rng.randint(-9, 9), rng.randint(1, 4)), Fraction(rng.randint(-9, 9))) for _ in range(3)]
            assert u.multiply(u.multiply(x, y), z) == u.multiply(x, u.multiply(y, z))
            assert u.multiply(x, u.plus(y, z)) == u.plus(u.multiply(x, y), u.multiply(x, z))

    def test_matrix_algebra_base(self):
        # the non-unital algebra of strictly upper triangular 2x2 matrices over Q
        rng = np.random.default_rng(0)
        u = Unitalization(zero=np.zeros((2, 2)))
        for _ in range(20):
            x, y, z = [(np.triu(rng.integers(-3, 4, (2, 2)), 1).astype(float), float(rng.integers(-3, 4))) for _ in range(3)]
            lhs, rhs = u.multiply(u.multiply(x, y), z), u.multiply(x, u.multiply(y, z))
            assert np.array_equal(lhs[0], rhs[0]) and lhs[1] == rhs[1]


class TestReduced:
    def test_examples(self):
        assert reduced_k0(parse_group("Z ⊕ Z")) == parse_group("Z")
        assert reduced_k0(parse_group("Z/2 ⊕ Z")) == parse_group("Z/2")
        assert reduced_k0(parse_group("Z")) == FGAbelianGroup()

    def test_needs_free_summand(self):
        with pytest.raises(InputError):
            reduced_k0(parse_group("Z/2"))
        assert reduced_k0(parse_group("Z/2"), unit_image_rank=0) == parse_group("Z/2")
