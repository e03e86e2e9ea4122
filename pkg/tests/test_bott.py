from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ktheory.abelian import FGAbelianGroup
from ktheory.bott import (
    LOOP_CHAIN,
    ClutchingInput,
    SphereGrid,
    build_clutching,
    chern_number,
    clutch,
    global_frame,
    k_top_complex,
    loop_chain_step,
    meridian_extend,
    parse_table_csv,
    partition_of_unity,
    pi_gl_c,
    reduced_k_sphere_complex,
    rho,
    sample_loop,
    vector_field_params,
    winding_number,
)
from ktheory.errors import InputError, ResolutionError, VerificationError

# measured once on the counterclockwise-from-north orientation
SIGN = -1

# OEIS A053381 (Radon-Hurwitz numbers, rho(t) + 1) for t = 1..32
RADON_HURWITZ = [1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 9, 1, 2, 1, 4, 1, 2, 1, 8, 1, 2, 1, 4, 1, 2, 1, 10]


def radon_hurwitz(t):
    """Independent oracle: the largest n such that t x t has n-1 anticommuting orthogonal complex structures."""
    b = (t & -t).bit_length() - 1
    c, d = divmod(b, 4)
    return 8 * c + 2**d


class TestPartition:
    def test_examples(self):
        assert partition_of_unity(1.0) == (1.0, 0.0)
        assert partition_of_unity(-1.0) == (0.0, 1.0)
        bp, bm = partition_of_unity(0.0)
        assert bp == pytest.approx(1 / math.sqrt(2)) and bm == pytest.approx(1 / math.sqrt(2))

    @given(st.floats(-1, 1), st.sampled_from(["linear", "cosine"]))
    def test_normalized(self, x, kind):
        bp, bm = partition_of_unity(x, kind)
        assert abs(bp * bp + bm * bm - 1) < 1e-12
        if x >= 0.5:
            assert bm == 0
        if x <= -0.5:
            assert bp == 0

    def test_errors(self):
        with pytest.raises(InputError):
            partition_of_unity(1.5)
        with pytest.raises(InputError):
            partition_of_unity(0.0, "smooth")


class TestGrid:
    @pytest.mark.parametrize("p", [1, 2])
    def test_nodes_on_sphere(self, p):
        g = SphereGrid.build(p, 32)
        assert np.max(np.abs(np.sum(g.nodes**2, axis=-1) - 1)) < 1e-12

    def test_polar_caps_covered(self):
        g = SphereGrid.build(2, 16)
        assert g.x_last.max() > 0.5 and g.x_last.min() < -0.5

    def test_bad(self):
        with pytest.raises(InputError):
            SphereGrid.build(3, 32)
        with pytest.raises(InputError):
            SphereGrid.build(2, 4)


class TestMeridian:
    def test_equator_node(self):
        f = ClutchingInput.power(2)
        phi = 0.7
        val = meridian_extend(f, [math.cos(phi), math.sin(phi), 0.0])
        assert val[0, 0] == pytest.approx(np.exp(2j * phi))

    def test_off_equator(self):
        f = ClutchingInput.power(1)
        phi, x3 = 2.1, 0.4
        r = math.sqrt(1 - x3 * x3)
        val = meridian_extend(f, [r * math.cos(phi), r * math.sin(phi), x3])
        assert val[0, 0] == pytest.approx(np.exp(1j * phi))

    def test_constant(self):
        f = ClutchingInput.power(0)
        assert meridian_extend(f, [0.0, -1.0, 0.2])[0, 0] == 1

    def test_s1(self):
        f = ClutchingInput.from_table([0, math.pi], [[[2]], [[3j]]])
        assert meridian_extend(f, [-0.9, 0.3])[0, 0] == 3j

    def test_outside_band(self):
        with pytest.raises(InputError):
            meridian_extend(ClutchingInput.power(1), [0.0, 0.0, 1.0])


class TestClutching:
    def test_identity(self):
        cf = clutch(ClutchingInput.power(0))
        assert cf.idempotency_residual < 1e-12
        assert chern_number(cf).rounded == 0
        rank = np.linalg.matrix_rank(cf.Q.reshape(-1, 2, 2)[::97])
        assert set(rank.tolist()) == {1}

    @pytest.mark.parametrize("k", range(-3, 4))
    def test_power_gives_sign_times_k(self, k):
        cf = clutch(ClutchingInput.power(k), resolution=64)
        assert cf.idempotency_residual < 1e-9 and cf.trace_deviation < 1e-9
        c = chern_number(cf)
        assert c.rounded == SIGN * k
        assert c.defect < 0.05
        assert abs(c.imaginary) < 1e-9

    def test_frozen_sign_constant(self):
        from ktheory import bott

        assert bott.SIGN == SIGN

    def test_hermitian_for_unitary_samples(self):
        cf = clutch(ClutchingInput.power(2), resolution=32)
        q = cf.Q
        assert np.max(np.abs(q - np.conj(np.swapaxes(q, -1, -2)))) < 1e-12

    def test_diag_example(self):
        cf = clutch(ClutchingInput.diagonal_powers([1, 2]))
        assert cf.idempotency_residual < 1e-10 and cf.trace_deviation < 1e-10
        assert cf.n == 2 and cf.Q.shape[-1] == 4

    @pytest.mark.parametrize("a", range(-2, 3))
    @pytest.mark.parametrize("b", range(-2, 3))
    def test_additivity(self, a, b):
        total = chern_number(clutch(ClutchingInput.diagonal_powers([a, b]))).value
        parts = chern_number(clutch(ClutchingInput.power(a))).value + chern_number(clutch(ClutchingInput.power(b))).value
        assert abs(total - parts) < 0.1
        assert round(total) == SIGN * (a + b)

    def test_convergence(self):
        defects = [chern_number(clutch(ClutchingInput.power(2), resolution=r)).defect for r in (32, 64, 128)]
        assert defects[0] > defects[1] > defects[2]

    @pytest.mark.parametrize("k", range(-2, 3))
    def test_partition_invariance(self, k):
        a = chern_number(clutch(ClutchingInput.power(k))).value
        b = chern_number(clutch(ClutchingInput.power(k), partition="cosine")).value
        assert abs(a - b) < 0.05

    def test_workers_bit_identical(self):
        f = ClutchingInput.diagonal_powers([1, -2])
        one = clutch(f, workers=1)
        for w in (2, 3, 4, 7):
            other = clutch(f, workers=w)
            assert np.array_equal(one.Q, other.Q)
            assert chern_number(one, workers=1) == chern_number(other, workers=w)

    def test_tolerance_failure_reports_node(self):
        with pytest.raises(VerificationError) as err:
            clutch(ClutchingInput.power(1), tol=1e-30)
        assert "worst_node" in err.value.diagnostic

    def test_non_invertible_table(self):
        with pytest.raises(InputError):
            ClutchingInput.from_table([0, 1], [[[1]], [[0]]])

    def test_chern_needs_s2(self):
        with pytest.raises(InputError):
            chern_number(clutch(ClutchingInput.power(1), p=1))

    def test_custom_function(self):
        f = ClutchingInput.from_function(1, lambda z: [[z**2]])
        assert chern_number(clutch(f, resolution=32)).rounded == SIGN * 2


class TestTableInput:
    def csv(self, k, samples=64):
        lines = ["theta,re00,im00"]
        for i in range(samples):
            t = 2 * math.pi * i / samples
            z = complex(math.cos(k * t), math.sin(k * t))
            lines.append(f"{t!r},{z.real!r},{z.imag!r}")
        return "\n".join(lines)

    def test_sampled_power(self):
        for k in (-1, 1, 2):
            f = parse_table_csv(self.csv(k))
            # interpolated samples are not unitary; the field is still an idempotent
            assert chern_number(clutch(f)).rounded == SIGN * k

    def test_matrix_table(self):
        text = "0,1,0\n3.141592653589793,-1,0\n"
        with pytest.raises(InputError):
            clutch(parse_table_csv(text))  # 1 and -1 interpolate through 0 at the node phi = pi/2
        text = "0,1,0,0,0,0,0,1,0\n2,2,0,0,0,0,0,1,0\n4,1,0,0,0,0,0,3,0\n"
        assert parse_table_csv(text).n == 2

    @pytest.mark.parametrize(
        "text",
        ["", "0,1,0\n1,1\n", "0,1,0\nx,1,0\n", "0,1,0,0,0,0,0,1,0\n1,1,0\n", "0,1,0\n0,1,0\n"],
    )
    def test_malformed(self, text):
        with pytest.raises(InputError):
            clutch(parse_table_csv(text))


class TestCircleClutching:
    @pytest.mark.parametrize("values", [([[1]], [[1]]), ([[2j]], [[-3]]), ([[1, 0], [0, 1]], [[0, 1], [1, 0]])])
    def test_always_trivial(self, values):
        f = ClutchingInput.from_table([0, math.pi], values)
        cf = clutch(f, p=1)
        frame = global_frame(cf)
        assert frame is not None and frame.vectors.shape == (2 * f.n, f.n)
        assert frame.min_singular_value > 1e-3
        # transition data det at the two points of S^0 has winding 0 along its (constant) path
        assert winding_number(np.full(16, np.linalg.det(f.evaluate(np.array([0.0]))[0]))) == 0


class TestWinding:
    def test_examples(self):
        assert winding_number(sample_loop(lambda z: z**3)) == 3
        assert winding_number(sample_loop(lambda z: 2.0)) == 0
        assert winding_number(sample_loop(lambda z: z.conjugate())) == -1

    @given(st.integers(-6, 6), st.integers(-6, 6))
    def test_product_is_sum(self, a, b):
        f = sample_loop(lambda z: z**a)
        g = sample_loop(lambda z: 3 * z**b)
        assert winding_number(f * g) == winding_number(f) + winding_number(g) == a + b

    def test_agrees_with_chern(self):
        for k in (-2, 1, 3):
            assert SIGN * winding_number(sample_loop(lambda z: z**k)) == chern_number(clutch(ClutchingInput.power(k))).rounded

    def test_errors(self):
        with pytest.raises(ResolutionError):
            winding_number(sample_loop(lambda z: z**128, samples=256))
        with pytest.raises(InputError):
            winding_number([1, 0, 1])
        with pytest.raises(InputError):
            winding_number([1])


class TestTables:
    def test_pi_gl_c(self):
        assert pi_gl_c(0) == FGAbelianGroup()
        assert pi_gl_c(1) == FGAbelianGroup.free(1)
        assert pi_gl_c(7) == FGAbelianGroup.free(1)
        for p in range(40):
            assert pi_gl_c(p) == pi_gl_c(p + 2)
        with pytest.raises(InputError):
            pi_gl_c(-1)

    def test_reduced_k_spheres(self):
        assert reduced_k_sphere_complex(1) == FGAbelianGroup()
        assert reduced_k_sphere_complex(2) == FGAbelianGroup.free(1)
        assert k_top_complex(0) == FGAbelianGroup.free(1) and k_top_complex(1) == FGAbelianGroup()

    def test_loop_chain(self):
        assert loop_chain_step("Z×BGL(R)") == "GL(R)"
        assert loop_chain_step("GL(C)/GL(H)") == "Z×BGL(H)"
        assert loop_chain_step("GL(C)/GL(R)") == "Z×BGL(R)"
        assert loop_chain_step("z x bgl(r)") == "GL(R)"
        for start in LOOP_CHAIN:
            s = start
            for _ in range(8):
                s = loop_chain_step(s)
            assert s == start
        with pytest.raises(InputError):
            loop_chain_step("BU")


class TestRho:
    def test_examples(self):
        assert rho(7) == 0
        assert rho(16) == 8
        assert rho(2) == 1
        assert (rho(2), rho(4), rho(8), rho(16)) == (1, 3, 7, 8)

    def test_oeis(self):
        assert [rho(t) + 1 for t in range(1, 33)] == RADON_HURWITZ

    def test_formula_oracle(self):
        for t in range(1, 257):
            assert rho(t) + 1 == radon_hurwitz(t)
            if t % 2 == 0:
                assert rho(t) >= 1
            v = vector_field_params(t)
            assert v.odd_part * 2**v.beta == t and v.odd_part % 2 == 1
            assert 0 <= v.gamma <= 3 and v.beta == v.gamma + 4 * v.delta

    def test_mod_16_and_valuation(self):
        for t in range(2, 257, 2):
            for s in range(t, 1025, 2 ** ((t & -t).bit_length() + 4)):
                if s & -s == t & -t:
                    assert rho(s) == rho(t)

    def test_bad(self):
        with pytest.raises(InputError):
            rho(0)
