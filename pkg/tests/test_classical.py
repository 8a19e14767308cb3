import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qdf.classical import (
    FEASIBLE,
    INFEASIBLE,
    CountDistribution,
    InfeasibilityCertificate,
    JointDistribution,
    enumerate_marginal_counts,
    extension_feasible_classical,
    falling_factorial,
    finite_representation,
    iid_joint,
    is_symmetric_dist,
    limit_convergence_demo,
    point_mass_count_family,
    uniform_count_family,
    urn_conditional,
)
from qdf.errors import ShapeError

import helpers

RNG = np.random.default_rng(31)

ANTICORRELATED = JointDistribution(2, 2, np.array([0.0, 0.5, 0.5, 0.0]))


class TestIidJoint:
    def test_deterministic_marginal(self):
        j = iid_joint([1.0, 0.0], 3)
        assert j.prob((0, 0, 0)) == 1.0
        assert j.probs.sum() == pytest.approx(1.0)

    def test_fair_coin_uniform(self):
        j = iid_joint([0.5, 0.5], 2)
        assert_allclose(j.probs, [0.25] * 4)

    def test_occupation_number_identity(self):
        p = RNG.random(3)
        p /= p.sum()
        j = iid_joint(p, 4)
        for x in itertools.product(range(3), repeat=4):
            direct = math.prod(p[v] for v in x)  # product oracle
            assert j.prob(x) == pytest.approx(direct, abs=1e-15)
        counts_form = {
            x: math.prod(p[v] ** list(x).count(v) for v in range(3))
            for x in itertools.product(range(3), repeat=4)
        }
        for x, want in counts_form.items():
            assert j.prob(x) == pytest.approx(want, abs=1e-15)


class TestSymmetry:
    def test_anticorrelated_symmetric(self):
        assert is_symmetric_dist(ANTICORRELATED)

    def test_iid_symmetric(self):
        assert is_symmetric_dist(iid_joint([0.3, 0.7], 3))

    def test_asymmetric_table(self):
        j = JointDistribution(2, 2, np.array([0.0, 0.7, 0.3, 0.0]))
        assert not is_symmetric_dist(j)


class TestClassicalExtension:
    def test_anticorrelated_infeasible_with_certificate(self):
        verdict, cert = extension_feasible_classical(ANTICORRELATED, 1)
        assert verdict == INFEASIBLE
        assert isinstance(cert, InfeasibilityCertificate)
        # The marginal at (0,1) demands q011 = 1/2 once q001 = 0, while the
        # marginal at (1,1) forces q011 + q111 = 0.
        assert cert.violated_assignment == (0, 1)
        assert cert.required_mass == pytest.approx(0.5)
        assert cert.forced_types[(0, 1, 1)] == (1, 1)
        assert cert.forced_types[(0, 0, 1)] == (0, 0)

    def test_iid_tables_feasible(self):
        j = iid_joint([0.3, 0.7], 2)
        for extra in (1, 2, 3):
            verdict, cert = extension_feasible_classical(j, extra)
            assert verdict == FEASIBLE
            assert isinstance(cert, JointDistribution)
            assert is_symmetric_dist(cert, tol=1e-9)
            # Marginalization oracle: sum the certificate over the added vars.
            table = cert.table()
            marg = table.reshape(4, -1).sum(axis=1)
            assert_allclose(marg, j.probs, atol=1e-9)

    def test_mixture_of_iid_feasible(self):
        a = iid_joint([0.2, 0.8], 2).probs
        b = iid_joint([0.9, 0.1], 2).probs
        j = JointDistribution(2, 2, 0.4 * a + 0.6 * b)
        assert is_symmetric_dist(j)
        for extra in (1, 2, 3):
            verdict, _ = extension_feasible_classical(j, extra)
            assert verdict == FEASIBLE

    def test_three_outcome_alphabet(self):
        j = iid_joint([0.2, 0.3, 0.5], 2)
        verdict, cert = extension_feasible_classical(j, 1)
        assert verdict == FEASIBLE
        marg = cert.table().reshape(9, -1).sum(axis=1)
        assert_allclose(marg, j.probs, atol=1e-9)


class TestUrnConditional:
    def test_half(self):
        assert urn_conditional(1, 1, 1, 2) == pytest.approx(0.5)

    def test_all_ones(self):
        assert urn_conditional(3, 3, 3, 3) == pytest.approx(1.0)

    def test_impossible_draw(self):
        assert urn_conditional(1, 1, 0, 2) == 0.0
        assert urn_conditional(0, 2, 3, 3) == 0.0

    def test_argument_validation(self):
        with pytest.raises(ShapeError):
            urn_conditional(2, 1, 1, 3)
        with pytest.raises(ShapeError):
            urn_conditional(0, 1, 4, 3)

    def test_hypergeometric_normalization(self):
        for m_trials, m, n_trials in ((6, 2, 3), (8, 5, 4), (40, 17, 9)):
            total = sum(
                math.comb(n_trials, n) * urn_conditional(n, n_trials, m, m_trials)
                for n in range(n_trials + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_log_space_matches_exact(self):
        # Values straddling the exact/log-space switch agree.
        exact = (
            falling_factorial(20, 5) * falling_factorial(20, 4) / falling_factorial(40, 9)
        )
        assert urn_conditional(5, 9, 20, 40) == pytest.approx(exact, rel=1e-12)


class TestFiniteRepresentation:
    def test_n_equals_m_identity(self):
        dist = uniform_count_family(5)
        assert_allclose(finite_representation(dist, 5), dist.probs, atol=1e-12)

    def test_uniform_m4_matches_enumeration(self):
        dist = uniform_count_family(4)
        got = finite_representation(dist, 2)
        want = helpers.urn_marginal_by_enumeration(dist.probs, 4, 2)
        assert_allclose(got, want, atol=1e-12)

    def test_point_mass_all_ones(self):
        m = 6
        probs = np.zeros(m + 1)
        probs[m] = 1.0
        dist = CountDistribution(m, probs)
        for n in (1, 3, 6):
            got = finite_representation(dist, n)
            want = np.zeros(n + 1)
            want[n] = 1.0
            assert_allclose(got, want, atol=1e-12)

    def test_matches_enumeration_small_m(self):
        rng = np.random.default_rng(0)
        for m in range(2, 9):
            probs = rng.random(m + 1)
            probs /= probs.sum()
            dist = CountDistribution(m, probs)
            for n in range(1, m + 1):
                assert_allclose(
                    finite_representation(dist, n),
                    helpers.urn_marginal_by_enumeration(dist.probs, m, n),
                    atol=1e-12,
                )

    def test_enumeration_helper_agrees(self):
        dist = uniform_count_family(6)
        assert_allclose(
            enumerate_marginal_counts(dist, 3), finite_representation(dist, 3), atol=1e-12
        )

    def test_n_above_m_rejected(self):
        with pytest.raises(ShapeError):
            finite_representation(uniform_count_family(3), 4)


class TestLimitConvergence:
    def test_uniform_family_approaches_bayes_laplace(self):
        # The uniform count family hits 1/(N+1) exactly at every M, so the
        # gaps sit at machine noise from the start.
        rows = limit_convergence_demo(uniform_count_family, 2, [8, 64, 512])
        gaps = [np.max(np.abs(probs - 1.0 / 3.0)) for _, probs in rows]
        assert gaps[-1] <= 2e-3
        assert max(gaps) < 1e-12
        # Exact integral oracle: binom(2, n) * int z^n (1-z)^(2-n) dz = 1/3.
        from scipy.integrate import quad

        for n in range(3):
            val, _ = quad(lambda z, n=n: math.comb(2, n) * z**n * (1 - z) ** (2 - n), 0, 1)
            assert val == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_point_mass_family_gap_decreases(self):
        # A point mass at frequency 1/2 (even M, so no rounding drift) keeps
        # the genuine hypergeometric-to-binomial O(1/M) gap, which shrinks
        # strictly with M.
        family = point_mass_count_family(0.5)
        limit = np.array([0.25, 0.5, 0.25])
        rows = limit_convergence_demo(family, 2, [4, 16, 64, 256])
        gaps = [np.max(np.abs(probs - limit)) for _, probs in rows]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 5e-3
        # Closed form of the leading correction: 1 / (2 (M - 1)) at n = 1.
        for (m, probs), gap in zip(rows, gaps):
            assert gap == pytest.approx(0.5 / (m - 1), abs=1e-12)

    def test_point_mass_family(self):
        family = point_mass_count_family(1.0)
        rows = limit_convergence_demo(family, 3, [4, 16])
        for _, probs in rows:
            assert probs[-1] == pytest.approx(1.0, abs=1e-12)

    def test_single_trial_symmetric(self):
        rows = limit_convergence_demo(uniform_count_family, 1, [2, 8, 32])
        for _, probs in rows:
            assert_allclose(probs, [0.5, 0.5], atol=1e-12)

    def test_requires_increasing_m(self):
        with pytest.raises(ShapeError):
            limit_convergence_demo(uniform_count_family, 2, [8, 8])
