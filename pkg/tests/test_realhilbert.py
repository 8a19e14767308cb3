import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qdf.errors import InvariantError, ShapeError
from qdf.realhilbert import (
    RealStateVerdict,
    as_real_symmetric,
    dimension_gap,
    real_basis_count,
    real_product_span_residual,
    real_symmetric_basis,
    spin_y_mixture,
    validate_real_state,
)
from qdf.states_povm import ID2, SIGMA_2

import helpers

RNG = np.random.default_rng(13)


def random_real_symmetric(d):
    g = RNG.standard_normal((d, d))
    return 0.5 * (g + g.T)


def random_real_density(d):
    g = RNG.standard_normal((d, d))
    m = g @ g.T
    return m / np.trace(m)


class TestDimensionGap:
    def test_two_qubits(self):
        assert dimension_gap(2, 2) == (10, 9, True)

    def test_single_system_no_gap(self):
        assert dimension_gap(2, 1) == (3, 3, False)

    def test_qutrit_pair(self):
        assert dimension_gap(3, 2) == (45, 36, True)

    def test_sweep(self):
        for d in range(2, 6):
            for n in range(2, 6):
                _, _, positive = dimension_gap(d, n)
                assert positive
            assert not dimension_gap(d, 1)[2]

    def test_bad_arguments(self):
        with pytest.raises(ShapeError):
            dimension_gap(1, 2)


class TestRealBasis:
    def test_counts(self):
        assert real_basis_count(2) == 3
        assert real_basis_count(1) == 1
        assert real_basis_count(4) == 10

    def test_orthonormal(self):
        for d in (2, 3):
            basis = real_symmetric_basis(d)
            assert len(basis) == real_basis_count(d)
            for a, b in itertools.product(basis, repeat=2):
                want = 1.0 if a is b else 0.0
                assert np.tensordot(a, b, axes=2) == pytest.approx(want, abs=1e-12)


class TestValidateRealState:
    def test_spin_y_pair_mixture_valid(self):
        m = spin_y_mixture(2)
        analytic = 0.25 * (np.kron(ID2, ID2) + np.kron(SIGMA_2, SIGMA_2)).real
        assert_allclose(m, analytic, atol=1e-14)
        verdict = validate_real_state(m)
        assert verdict.valid and verdict.trace_ok and verdict.psd_ok

    def test_wrong_trace(self):
        verdict = validate_real_state(0.5 * np.kron(np.eye(2), np.eye(2)))
        assert not verdict.trace_ok
        assert verdict.trace == pytest.approx(2.0)
        assert not verdict.valid

    def test_negative_eigenvalue(self):
        verdict = validate_real_state(np.diag([1.1, -0.1]))
        assert verdict.trace_ok and not verdict.psd_ok
        assert verdict.min_eigenvalue == pytest.approx(-0.1)

    def test_rejects_complex_input(self):
        with pytest.raises(InvariantError):
            as_real_symmetric(SIGMA_2)


class TestSpanResidual:
    def test_spin_y_mixture_residual_half(self):
        m = spin_y_mixture(2)
        projection, residual = real_product_span_residual(m, 2)
        assert residual == pytest.approx(0.5, abs=1e-12)
        # The removed part is exactly kron(sigma_y, sigma_y)/4, Frobenius norm 1/2.
        removed = m - projection
        assert_allclose(removed, 0.25 * np.kron(SIGMA_2, SIGMA_2).real, atol=1e-12)
        # Gram-projection oracle through least squares over the product span.
        span = [
            np.kron(a, b)
            for a in real_symmetric_basis(2)
            for b in real_symmetric_basis(2)
        ]
        oracle = helpers.project_onto_span(m, span)
        assert_allclose(projection, oracle, atol=1e-12)

    def test_real_product_states_in_span(self):
        for d in (2, 3):
            a, b = random_real_density(d), random_real_density(d)
            _, residual = real_product_span_residual(np.kron(a, b), d)
            assert residual < 1e-12

    def test_mixtures_of_products_in_span(self):
        pieces = [
            np.kron(random_real_density(2), random_real_density(2)) for _ in range(4)
        ]
        w = RNG.random(4)
        w /= w.sum()
        mixture = sum(wi * p for wi, p in zip(w, pieces))
        _, residual = real_product_span_residual(mixture, 2)
        assert residual < 1e-12

    def test_projection_idempotent_and_orthogonal(self):
        m = random_real_symmetric(4)
        projection, residual = real_product_span_residual(m, 2)
        again, _ = real_product_span_residual(projection, 2)
        assert np.max(np.abs(again - projection)) < 1e-12
        leftover = m - projection
        for a in real_symmetric_basis(2):
            for b in real_symmetric_basis(2):
                overlap = np.tensordot(np.kron(a, b), leftover, axes=2)
                assert abs(overlap) < 1e-12

    def test_shape_checked(self):
        with pytest.raises(ShapeError):
            real_product_span_residual(np.eye(3), 2)


class TestComplexPipelineContrast:
    def test_complex_roundtrip_recovers_the_state(self):
        # The same matrix that escapes every real product span is recovered
        # exactly by the complex measurement pipeline.
        from qdf.definetti import (
            MixingEnsemble,
            induced_sequence_distribution,
            mix_product_states,
            reconstruct_multisystem,
        )
        from qdf.states_povm import DensityOperator, dual_frame, tetrahedron_povm

        plus = DensityOperator(0.5 * (ID2 + SIGMA_2))
        minus = DensityOperator(0.5 * (ID2 - SIGMA_2))
        state = mix_product_states(MixingEnsemble([0.5, 0.5], [plus, minus]), 2)
        assert_allclose(state.matrix.real, spin_y_mixture(2), atol=1e-14)
        frame = dual_frame(tetrahedron_povm())
        recon = reconstruct_multisystem(
            induced_sequence_distribution(state, frame.povm), frame
        )
        assert np.max(np.abs(recon.matrix - state.matrix)) < 1e-8
