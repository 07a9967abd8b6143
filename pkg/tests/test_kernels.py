"""Gramian closed forms, stationary-phase bounds, oscillation sweeps."""

import numpy as np
import pytest

from warpft import (CapabilityError, ConfigError, DomainError,
                    NonConvergenceError, UnsupportedOrderError,
                    alpha_like_warp, bump_prototype, erb_warp,
                    gaussian_prototype, hann_prototype, linear_warp, log_warp,
                    power_law_warp)
from warpft.kernels import (KernelEvalSpec, _gramian_batch, gramian,
                            kernel_norm_I, osc_norm_estimate, oscillation,
                            stationary_phase_check, weight_m)
from warpft.prototype import normalized
from warpft.quadrature import QuadratureSpec
from warpft.warping import polynomial_weight

LIN = linear_warp(1.0)
LOG = log_warp()
GAUSS = normalized(gaussian_prototype(1.0))
BUMP = normalized(bump_prototype(0.9))

ETA_FULL = np.concatenate([-np.arange(1, 65)[::-1],
                           np.arange(1, 65)]).astype(float)


class TestGramian:
    def test_coincident_is_one(self):
        assert gramian(LIN, GAUSS, 0.7, 0.3, 0.7, 0.3) == pytest.approx(1.0,
                                                                        abs=1e-12)

    def test_coincident_independent_of_theta_scale(self):
        # the normalization A = ||theta||^2 makes the diagonal 1 even for
        # an unnormalized prototype
        val = gramian(LIN, gaussian_prototype(1.0), 0.7, 0.3, 0.7, 0.3)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_disjoint_compact_supports(self):
        assert gramian(LIN, BUMP, 0.0, 0.0, 5.0, 0.0) == 0.0

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_gaussian_ambiguity_modulus(self, sigma):
        # oracle: |<M_om T_y g, M_xi T_x g>| for a normalized Gaussian is
        # exp(-(x-y)^2/(4 sigma^2) - pi^2 sigma^2 (xi-om)^2)
        g = normalized(gaussian_prototype(sigma))
        rng = np.random.default_rng(7)
        for _ in range(8):
            x, y = rng.uniform(-2.5, 2.5, 2)
            xi, om = rng.uniform(-1.2, 1.2, 2)
            expected = np.exp(-(x - y) ** 2 / (4 * sigma ** 2)
                              - np.pi ** 2 * sigma ** 2 * (xi - om) ** 2)
            assert abs(gramian(LIN, g, x, xi, y, om)) == pytest.approx(
                expected, abs=2e-9)

    def test_hermitian_symmetry(self):
        rng = np.random.default_rng(11)
        for warp, lo, hi, tmax in ((LIN, -3.0, 3.0, 1.0),
                                   (erb_warp(), 200.0, 600.0, 0.02)):
            for _ in range(6):
                x, y = rng.uniform(lo, hi, 2)
                xi, om = rng.uniform(0.0, tmax, 2)
                a = gramian(warp, GAUSS, x, xi, y, om)
                b = gramian(warp, GAUSS, y, om, x, xi)
                assert abs(a - np.conj(b)) < 1e-10

    def test_erb_coincident(self):
        assert gramian(erb_warp(), BUMP, 400.0, 0.01, 400.0, 0.01) == \
            pytest.approx(1.0, abs=1e-12)

    def test_power_law_rejected(self):
        with pytest.raises(CapabilityError):
            gramian(power_law_warp(1.0, 1.0, 0.5), GAUSS, 1.0, 0.0, 1.0, 0.0)

    def test_half_line_center_validated(self):
        with pytest.raises(DomainError):
            gramian(LOG, GAUSS, -1.0, 0.0, 2.0, 0.0)

    def test_nonconvergence_reports_last_refinements(self):
        # a hopeless depth budget against a fast phase forces the error path
        shallow = QuadratureSpec(panel_tol=1e-14, max_depth=2)
        with pytest.raises(NonConvergenceError, match="refinements"):
            gramian(LIN, GAUSS, 0.0, 0.0, 0.3, 5e4, quad=shallow)

    def test_batch_matches_adaptive(self):
        rng = np.random.default_rng(5)
        ys = rng.uniform(-2, 2, 8)
        oms = rng.uniform(-1, 1, 8)
        batch = _gramian_batch(LIN, GAUSS, 0.3, 0.2, ys, oms)
        single = np.array([gramian(LIN, GAUSS, 0.3, 0.2, y, o)
                           for y, o in zip(ys, oms)])
        assert np.max(np.abs(batch - single)) < 1e-10


class TestStationaryPhase:
    def test_order_zero_linear_is_fourier_bound(self):
        # oracle: for w = 1 the integral is the Fourier transform of
        # f = theta . T_z theta, and c_0 = ||f'||_1
        rep = stationary_phase_check(LIN, GAUSS, 0, 0.0, ETA_FULL, z=0.3)
        r = GAUSS.support_radius(1e-10)
        s = np.linspace(max(-r, 0.3 - r), min(r, 0.3 + r), 8193)
        f = GAUSS.eval(s) * GAUSS.eval(s - 0.3)
        for eta in (1.0, 2.0, 3.0):
            fhat = abs(np.trapezoid(f * np.exp(-2j * np.pi * eta * s), s))
            i = int(np.argmin(np.abs(rep.eta - eta)))
            assert rep.lhs[i] == pytest.approx(fhat, abs=1e-12)
        fprime = (GAUSS.eval(s, order=1) * GAUSS.eval(s - 0.3)
                  + GAUSS.eval(s) * GAUSS.eval(s - 0.3, order=1))
        assert rep.c_n == pytest.approx(np.trapezoid(np.abs(fprime), s),
                                        rel=1e-5)
        assert rep.passed

    def test_order_one_log_bump_all_points_pass(self):
        rep = stationary_phase_check(LOG, BUMP, 1, 0.0, ETA_FULL, z=0.3)
        assert rep.decay_ok and rep.flat_ok
        inband = np.abs(rep.eta) >= 1.0
        assert np.all(rep.lhs[inband] <= rep.rhs_decay[inband])

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_log_bump_slope(self, n):
        rep = stationary_phase_check(LOG, BUMP, n, 0.0, ETA_FULL, z=0.3)
        assert rep.passed
        assert rep.slope <= -(n + 1) + 0.1

    def test_all_eligible_builtins_pointwise(self):
        etas = np.array([-16.0, -8.0, -4.0, -2.0, -1.0,
                         1.0, 2.0, 4.0, 8.0, 16.0])
        hann = normalized(hann_prototype(0.9))
        for warp in (LIN, LOG, erb_warp(), alpha_like_warp(0.5)):
            for theta in (GAUSS, BUMP, hann):
                top = 1 if theta.kind == "hann_bump" else 2
                for n in range(top + 1):
                    rep = stationary_phase_check(warp, theta, n, 0.4, etas,
                                                 z=0.3)
                    assert rep.decay_ok, (warp.kind, theta.kind, n)
                    assert rep.flat_ok, (warp.kind, theta.kind, n)

    def test_hann_order_two_unsupported(self):
        with pytest.raises(UnsupportedOrderError):
            stationary_phase_check(LOG, normalized(hann_prototype(0.9)), 2,
                                   0.0, [1.0, 2.0])

    def test_order_out_of_range(self):
        with pytest.raises(UnsupportedOrderError):
            stationary_phase_check(LOG, BUMP, 3, 0.0, [1.0])

    def test_power_law_rejected(self):
        with pytest.raises(CapabilityError):
            stationary_phase_check(power_law_warp(1.0, 1.0, 0.5), BUMP, 0,
                                   1.0, [1.0])

    def test_disjoint_translation_rejected(self):
        with pytest.raises(ConfigError):
            stationary_phase_check(LOG, BUMP, 0, 0.0, [1.0], z=5.0)


class TestKernelNormI:
    def test_linear_gaussian_closed_form(self):
        # oracle: double integral of the Gaussian ambiguity modulus
        # separates: int e^{-z^2/4} dz . int e^{-pi^2 eta^2} deta
        #          = 2 sqrt(pi) . 1/sqrt(pi) = 2
        rep = kernel_norm_I(LIN, GAUSS, KernelEvalSpec(8.0, 8.0, 128), x=0.0)
        assert rep.value == pytest.approx(2.0, rel=0.02)
        assert not rep.inconclusive

    def test_translation_invariance_linear(self):
        spec = KernelEvalSpec(8.0, 8.0, 64)
        vals = [kernel_norm_I(LIN, GAUSS, spec, x=x).value
                for x in (0.0, 3.0, -5.0)]
        assert max(vals) - min(vals) < 1e-6

    def test_xi_invariance(self):
        spec = KernelEvalSpec(8.0, 8.0, 64)
        a = kernel_norm_I(LIN, GAUSS, spec, x=0.0, xi=0.0).value
        b = kernel_norm_I(LIN, GAUSS, spec, x=0.0, xi=7.0).value
        assert a == pytest.approx(b, abs=1e-8)

    def test_box_doubling_monotone_cauchy(self):
        vals = []
        for half, res in ((6.0, 96), (12.0, 192), (24.0, 384)):
            vals.append(kernel_norm_I(LIN, GAUSS,
                                      KernelEvalSpec(half, half, res),
                                      x=0.0).value)
        assert vals[0] <= vals[1] <= vals[2]
        assert abs(vals[1] - vals[0]) < 1e-3
        assert abs(vals[2] - vals[1]) < 1e-3

    def test_log_bump_growth_and_tail_flag(self):
        small = kernel_norm_I(LOG, BUMP, KernelEvalSpec(4.0, 4.0, 64), x=0.0)
        big = kernel_norm_I(LOG, BUMP, KernelEvalSpec(8.0, 8.0, 128), x=0.0)
        assert small.value < big.value
        # the undersized box leaves more than 10% in the estimated tail
        assert small.inconclusive
        assert not big.inconclusive

    def test_spec_validation(self):
        with pytest.raises(ConfigError):
            KernelEvalSpec(z_half_width=0.0)
        with pytest.raises(ConfigError):
            KernelEvalSpec(resolution=8)
        with pytest.raises(ConfigError):
            KernelEvalSpec(p=-1)


class TestOscillation:
    def test_zero_radius_is_zero(self):
        val = oscillation(LIN, GAUSS, 0.25, True, 1.0, 0.5, 1.3, 0.7,
                          q_resolution=1)
        assert val == 0.0

    def test_gamma_on_decreases_with_delta(self):
        vals = [oscillation(LIN, GAUSS, d, True, 1.0, 0.5, 1.05, 0.55,
                            q_resolution=3)
                for d in (0.5, 0.25, 0.125)]
        assert vals[0] > vals[1] > vals[2]

    def test_gamma_off_phase_obstruction(self):
        # with the phase correction disabled the oscillation at modulation
        # omega = 1/(2 delta) does not die out as the cover refines
        vals = []
        for d in (0.5, 0.25, 0.125):
            c = 1.0 / (2.0 * d)
            vals.append(oscillation(LIN, GAUSS, d, False, c, c, c, c,
                                    q_resolution=3))
        assert vals[2] >= 0.5 * vals[0]

    def test_gamma_on_below_gamma_off(self):
        on = oscillation(LIN, GAUSS, 0.25, True, 1.0, 0.5, 1.05, 0.55,
                         q_resolution=3)
        off = oscillation(LIN, GAUSS, 0.25, False, 1.0, 0.5, 1.05, 0.55,
                          q_resolution=3)
        assert on < off

    def test_q_resolution_validated(self):
        with pytest.raises(ConfigError):
            oscillation(LIN, GAUSS, 0.25, True, 0.0, 0.0, 0.0, 0.0,
                        q_resolution=0)


class TestOscNormEstimate:
    def test_erb_sweep_strictly_decreasing(self):
        spec = KernelEvalSpec(30.0, 0.02, 16)
        vals = [osc_norm_estimate(erb_warp(), BUMP, d, spec, gamma_on=True,
                                  q_resolution=2, box_resolution=10).value
                for d in (0.5, 0.25, 0.125)]
        assert vals[0] > vals[1] > vals[2]

    def test_weighted_at_least_unweighted(self):
        plain = KernelEvalSpec(4.0, 4.0, 16)
        weighted = KernelEvalSpec(4.0, 4.0, 16, m1=polynomial_weight(1))
        a = osc_norm_estimate(LIN, GAUSS, 0.25, plain,
                              q_resolution=2, box_resolution=8).value
        b = osc_norm_estimate(LIN, GAUSS, 0.25, weighted,
                              q_resolution=2, box_resolution=8).value
        assert b >= a

    def test_gamma_on_below_gamma_off(self):
        spec = KernelEvalSpec(4.0, 4.0, 16)
        on = osc_norm_estimate(LIN, GAUSS, 0.25, spec, gamma_on=True,
                               q_resolution=2, box_resolution=8).value
        off = osc_norm_estimate(LIN, GAUSS, 0.25, spec, gamma_on=False,
                                q_resolution=2, box_resolution=8).value
        assert on < off


class TestWeightM:
    def test_diagonal_is_one(self):
        assert weight_m(polynomial_weight(2), polynomial_weight(1),
                        1.3, 1.3, 0.4, 0.4) == 1.0

    def test_polynomial_example(self):
        assert weight_m(polynomial_weight(1), None, 0.0, 1.0, 0.0, 0.0) == 2.0

    def test_random_tuples_swap_symmetric_and_bounded(self):
        rng = np.random.default_rng(23)
        m1, m2 = polynomial_weight(2), polynomial_weight(1)
        for _ in range(1000):
            x, y, xi, om = rng.uniform(-5, 5, 4)
            a = weight_m(m1, m2, x, y, xi, om)
            b = weight_m(m1, m2, y, x, om, xi)
            assert a == b
            assert a >= 1.0
