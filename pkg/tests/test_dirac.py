import math

import numpy as np
import pytest

from qmbh_lab import dirac


def mixed_packet(sigma=10.0):
    return dirac.build_gaussian(sigma_x=sigma, x0=0.0, p0=0.0, seed=(1, 1))


def zbw_trace(packet, periods=6.0, samples=768):
    t_max = periods * 2 * math.pi / packet.zbw_omega
    return dirac.mean_position_trace(packet, t_max, samples)


class TestPacketConstruction:
    def test_normalization(self):
        p = dirac.build_gaussian(sigma_x=3.0, x0=1.0, p0=0.5, seed=(0.3, 1j))
        assert abs(p.norm() - 1.0) <= 1e-12

    def test_initial_position(self):
        p = dirac.build_gaussian(sigma_x=5.0, x0=3.0, p0=0.0, seed=(1, 0))
        assert dirac.mean_position(p) == pytest.approx(3.0, abs=1e-10)

    def test_degenerate_width_rejected(self):
        with pytest.raises(ValueError, match="sigma_x"):
            dirac.build_gaussian(sigma_x=0.0, x0=0.0, p0=0.0, seed=(1, 0))

    def test_zero_seed_rejected(self):
        with pytest.raises(ValueError, match="seed"):
            dirac.build_gaussian(sigma_x=1.0, x0=0.0, p0=0.0, seed=(0, 0))

    def test_grid_invariants(self):
        with pytest.raises(ValueError, match="power of two"):
            dirac.DiracPacket1D(np.linspace(-1, 1, 200),
                                np.ones((2, 200), complex))
        with pytest.raises(ValueError, match="uniform"):
            dirac.DiracPacket1D(np.geomspace(1, 2, 256),
                                np.ones((2, 256), complex))


class TestVelocityOperator:
    def test_eigenvalues_are_luminal(self):
        # direct 2x2 diagonalization of c sigma_x
        c = 2.99792458e10
        vals = np.linalg.eigvalsh(c * dirac.SIGMA_X)
        assert vals == pytest.approx([-c, c], rel=1e-15)


class TestEnergyFractions:
    def test_weights_sum_to_one(self):
        split = dirac.energy_fractions(mixed_packet(2.0))
        assert abs(split.w_plus + split.w_minus - 1.0) <= 1e-12

    def test_wide_packet_small_k_oracle(self):
        # oracle: integrated small-k projector weight, (hbar k / 2 m c)^2
        # against the Gaussian gives sigma_k^2 / 4 = 1/(16 sigma_x^2)
        sigma = 100.0
        p = dirac.build_gaussian(sigma_x=sigma, x0=0.0, p0=0.0, seed=(1, 0))
        split = dirac.energy_fractions(p)
        assert split.w_minus <= 1e-4
        assert split.w_minus == pytest.approx(1 / (16 * sigma**2), rel=1e-2)

    def test_compton_width_against_quadrature_oracle(self):
        p = dirac.build_gaussian(sigma_x=1.0, x0=0.0, p0=0.0, seed=(1, 0))
        split = dirac.energy_fractions(p)
        # independent quadrature: eigendecompose H(k) mode by mode
        w_minus = 0.0
        for j, k in enumerate(p.k):
            h = np.array([[1.0, k], [k, -1.0]])
            vals, vecs = np.linalg.eigh(h)
            minus = vecs[:, int(np.argmin(vals))]
            amp = p.a[:, j]
            w_minus += abs(np.vdot(minus, amp)) ** 2 * p.dk
        assert split.w_minus == pytest.approx(w_minus, abs=1e-12)
        assert split.w_minus >= 1e-2

    def test_projected_packet_is_single_branch(self):
        p = dirac.project_branch(mixed_packet(1.0), +1)
        assert dirac.energy_fractions(p).w_minus <= 1e-14

    def test_monotone_in_width(self):
        widths = [0.5, 1.0, 2.0, 5.0, 10.0, 100.0]
        fractions = []
        for w in widths:
            p = dirac.build_gaussian(sigma_x=w, x0=0.0, p0=0.0, seed=(1, 0))
            fractions.append(dirac.energy_fractions(p).w_minus)
        assert all(b <= a for a, b in zip(fractions, fractions[1:]))

    def test_balanced_seed_splits_evenly(self):
        p = dirac.build_gaussian(sigma_x=50.0, x0=0.0, p0=0.0, seed=(1, 1))
        split = dirac.energy_fractions(p)
        assert split.w_plus == pytest.approx(0.5, abs=1e-3)
        assert split.w_minus == pytest.approx(0.5, abs=1e-3)


class TestEvolution:
    def test_unitary(self):
        p = mixed_packet(3.0)
        out = dirac.evolved(p, 37.5)
        assert abs(out.norm() - p.norm()) <= 1e-12

    def test_position_grid_oracle(self):
        # brute force: transform to a position grid and integrate x |psi|^2
        p = mixed_packet(10.0)
        for t in (0.0, 0.9, 2.3):
            moved = dirac.evolved(p, t)
            x, psi = dirac.to_position(moved)
            rho = (np.abs(psi) ** 2).sum(axis=0)
            dx = x[1] - x[0]
            assert rho.sum() * dx == pytest.approx(1.0, rel=1e-10)
            oracle = float((x * rho).sum() / rho.sum())
            assert dirac.mean_position(moved) == pytest.approx(oracle, abs=1e-9)


class TestZitterbewegung:
    def setup_method(self):
        self.packet = mixed_packet(10.0)
        self.trace = zbw_trace(self.packet)

    def test_frequency(self):
        assert self.trace.fit.omega == pytest.approx(self.packet.zbw_omega, rel=0.05)
        assert self.trace.fit.ok

    def test_amplitude(self):
        lam = self.packet.compton_length
        assert self.trace.fit.amplitude <= 1.1 * lam / 2
        assert self.trace.fit.amplitude >= 0.8 * lam / 2

    def test_pure_branch_has_no_oscillation(self):
        pure = dirac.project_branch(self.packet, +1)
        trace = zbw_trace(pure)
        assert trace.fit.amplitude <= 1e-6 * pure.compton_length

    def test_velocity_oscillates_at_same_frequency(self):
        t_max = 6 * 2 * math.pi / self.packet.zbw_omega
        vtrace = dirac.velocity_trace(self.packet, t_max, 768)
        assert vtrace.fit.omega == pytest.approx(self.trace.fit.omega, rel=0.05)

    def test_interference_term_integrates_to_zero(self):
        for t in (0.0, 0.4, 1.7, 5.0):
            assert abs(dirac.interference_overlap(self.packet, t)) <= 1e-10

    def test_interference_term_is_pointwise_nonzero(self):
        # the cross density is visibly nonzero pointwise even though its
        # integral vanishes to 1e-10 and better
        plus = dirac.project_branch(self.packet, +1)
        minus = dirac.project_branch(self.packet, -1)
        _, psi_p = dirac.to_position(plus)
        _, psi_m = dirac.to_position(minus)
        cross = 2 * np.real((psi_p * np.conj(psi_m)).sum(axis=0))
        assert np.max(np.abs(cross)) > 1e-5
        assert abs(dirac.interference_overlap(self.packet, 0.0)) <= 1e-10


class TestTimeAverage:
    def setup_method(self):
        self.packet = mixed_packet(10.0)
        self.trace = zbw_trace(self.packet)

    def test_compton_window_suppression(self):
        window = math.pi * self.packet.hbar / (self.packet.mass * self.packet.c**2)
        averaged = dirac.time_average(self.trace, window)
        assert averaged.fit.amplitude <= 0.1 * self.trace.fit.amplitude

    def test_full_period_window(self):
        window = 2 * math.pi / self.trace.fit.omega
        averaged = dirac.time_average(self.trace, window)
        assert averaged.fit.amplitude <= 0.02 * self.trace.fit.amplitude

    def test_tiny_window_is_identity(self):
        dt = float(self.trace.times[1] - self.trace.times[0])
        averaged = dirac.time_average(self.trace, 0.3 * dt)
        assert np.array_equal(averaged.x_mean, self.trace.x_mean)
        assert np.array_equal(averaged.times, self.trace.times)

    def test_window_bound(self):
        span = float(self.trace.times[-1] - self.trace.times[0])
        with pytest.raises(ValueError, match="quarter"):
            dirac.time_average(self.trace, span / 2)


class TestDiscRadius:
    def test_electron_spin_half(self):
        hbar, c = 1.054571817e-27, 2.99792458e10
        m = 9.1093837015e-28
        assert dirac.disc_radius(hbar / 2, m, c) == pytest.approx(
            1.930796338621417e-11, rel=1e-12)

    def test_zero_angular_momentum(self):
        assert dirac.disc_radius(0.0, 1.0, 1.0) == 0.0

    def test_full_hbar_gives_compton(self):
        hbar, c = 1.054571817e-27, 2.99792458e10
        m = 9.1093837015e-28
        assert dirac.disc_radius(hbar, m, c) == pytest.approx(hbar / (m * c),
                                                              rel=1e-15)

    def test_validation(self):
        with pytest.raises(ValueError, match="mass"):
            dirac.disc_radius(1.0, 0.0, 1.0)
        with pytest.raises(ValueError, match="angular momentum"):
            dirac.disc_radius(-1.0, 1.0, 1.0)
