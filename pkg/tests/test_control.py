import itertools

import numpy as np
import pytest

from vorocover.control import (
    Gains,
    SingularityError,
    lyapunov,
    merge_status,
    repulsive_potential,
    total_control,
    u_avoid,
    u_centroid,
    update_inspection,
)
from vorocover.dynamics import AgentKinematics
from vorocover.field import DensityField, MassCentroid, QuadratureGrid, grad_H
from vorocover.geometry import InspectionRegion

GAINS = Gains(k_p=0.32, k_d=0.86, mu_o=1000.0, d_o=12.0, r=10.0)


def state(p=(0, 0, 0), v=(0, 0, 0)):
    return AgentKinematics(p=np.array(p, dtype=float), v=np.array(v, dtype=float))


class TestUCentroid:
    def test_equilibrium(self):
        mc = MassCentroid(mass=5.0, centroid=np.array([1.0, 2.0, 3.0]), valid=True)
        u = u_centroid(state(p=(1, 2, 3)), mc, GAINS)
        assert np.allclose(u, 0.0)

    def test_arithmetic(self):
        g = Gains(k_p=0.5, k_d=0.86, mu_o=1.0, d_o=1.0, r=1.0)
        mc = MassCentroid(mass=2.0, centroid=np.array([1.0, 0.0, 0.0]), valid=True)
        u = u_centroid(state(), mc, g)
        assert np.allclose(u, [1.0, 0.0, 0.0])

    def test_damping_fallback_when_invalid(self):
        mc = MassCentroid(mass=0.0, centroid=np.zeros(3), valid=False)
        u = u_centroid(state(v=(1, 1, 0)), mc, GAINS)
        assert np.allclose(u, [-0.86, -0.86, 0.0])

    def test_equals_minus_gradient_minus_damping(self, tmp_path):
        # algebraic identity: u_c = -k_p * grad_H - k_d * v for valid cells
        region = InspectionRegion(np.zeros(3), np.array([40.0, 40.0, 40.0]))
        grid = QuadratureGrid(region, 2.0)
        f = DensityField(np.array([[20.0, 18.0, 22.0]]),
                         np.array([1], dtype=np.uint8), 1.0, 0.02)
        positions = np.array([[12.0, 9.0, 14.0]])
        from vorocover.field import mass_centroid
        mc = mass_centroid(0, positions, f, grid)
        v = np.array([0.4, -0.2, 0.1])
        u = u_centroid(AgentKinematics(p=positions[0], v=v), mc, GAINS)
        expected = -GAINS.k_p * grad_H(0, positions, f, grid) - GAINS.k_d * v
        assert np.allclose(u, expected, rtol=0, atol=1e-12)


class TestUAvoid:
    def test_all_far(self):
        targets = np.array([[100.0, 0, 0], [0, 100.0, 0]])
        assert np.allclose(u_avoid(np.zeros(3), targets, GAINS), 0.0)

    def test_boundary_distance_exactly_d_o(self):
        targets = np.array([[12.0, 0.0, 0.0]])
        u = u_avoid(np.zeros(3), targets, GAINS)
        assert np.allclose(u, 0.0)

    def test_arithmetic(self):
        targets = np.array([[0.0, 0.0, 0.0]])
        u = u_avoid(np.array([6.0, 0.0, 0.0]), targets, GAINS)
        assert np.allclose(u, [1000.0 * (1 / 6 - 1 / 12) * 6 / 36, 0, 0])
        assert u[0] == pytest.approx(13.888888888888888)

    def test_continuity_across_boundary(self):
        targets = np.array([[0.0, 0.0, 0.0]])
        eps = 1e-9
        inside = u_avoid(np.array([12.0 - eps, 0, 0]), targets, GAINS)
        outside = u_avoid(np.array([12.0 + eps, 0, 0]), targets, GAINS)
        assert np.linalg.norm(inside - outside) < 1e-6

    def test_singularity(self):
        targets = np.array([[0.0, 0.0, 0.0]])
        with pytest.raises(SingularityError):
            u_avoid(np.array([1e-9, 0.0, 0.0]), targets, GAINS)


class TestTotalControl:
    def test_sum(self):
        assert np.allclose(total_control(np.array([1.0, 2, 3]), np.zeros(3)), [1, 2, 3])
        assert np.allclose(total_control(np.array([1.0, 0, 0]), np.array([-1.0, 0, 0])), 0)
        assert np.allclose(total_control(np.array([0.5, 0.5, 0]), np.array([13.9, 0, 0])),
                           [14.4, 0.5, 0])


class TestUpdateInspection:
    def test_clears_within_range(self):
        projected = np.array([[4.0, 0.0, 0.0]])
        status = np.array([1], dtype=np.uint8)
        out = update_inspection(np.zeros(3), projected, status, GAINS)
        assert out[0] == 0  # 4 m <= r = 10 m

    def test_clears_at_mid_range(self):
        projected = np.array([[5.0, 0.0, 0.0]])
        status = np.array([1], dtype=np.uint8)
        out = update_inspection(np.zeros(3), projected, status, GAINS)
        assert out[0] == 0  # 5 m <= r = 10 m

    def test_keeps_outside_range(self):
        projected = np.array([[10.5, 0.0, 0.0]])
        status = np.array([1], dtype=np.uint8)
        out = update_inspection(np.zeros(3), projected, status, GAINS)
        assert out[0] == 1  # 10.5 m > r = 10 m

    def test_boundary_inclusive(self):
        projected = np.array([[10.0, 0.0, 0.0]])
        status = np.array([1], dtype=np.uint8)
        out = update_inspection(np.zeros(3), projected, status, GAINS)
        assert out[0] == 0  # exactly at range

    def test_cleared_bit_stays_cleared(self):
        projected = np.array([[1.0, 0.0, 0.0]])
        status = np.array([0], dtype=np.uint8)
        out = update_inspection(np.zeros(3), projected, status, GAINS)
        assert out[0] == 0

    def test_monotone_and_idempotent(self):
        rng = np.random.default_rng(4)
        projected = rng.uniform(-10, 10, size=(40, 3))
        status = (rng.random(40) < 0.7).astype(np.uint8)
        p = np.zeros(3)
        once = update_inspection(p, projected, status, GAINS)
        assert int(once.sum()) <= int(status.sum())
        assert np.all(once <= status)
        twice = update_inspection(p, projected, once, GAINS)
        assert np.array_equal(once, twice)


class TestMergeStatus:
    def test_examples(self):
        a = np.array([1, 1, 0, 1], dtype=np.uint8)
        b = np.array([1, 0, 1, 1], dtype=np.uint8)
        assert np.array_equal(merge_status(a, b), [1, 0, 0, 1])
        assert np.array_equal(merge_status(a, a), a)
        ones = np.ones(4, dtype=np.uint8)
        zeros = np.zeros(4, dtype=np.uint8)
        assert np.array_equal(merge_status(ones, zeros), zeros)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            merge_status(np.ones(3, dtype=np.uint8), np.ones(4, dtype=np.uint8))

    def test_semilattice_exhaustive_length4(self):
        vectors = [np.array(bits, dtype=np.uint8)
                   for bits in itertools.product((0, 1), repeat=4)]
        for a in vectors:
            assert np.array_equal(merge_status(a, a), a)  # idempotent
            for b in vectors:
                ab = merge_status(a, b)
                assert np.array_equal(ab, merge_status(b, a))  # commutative
                for c in vectors:
                    left = merge_status(ab, c)
                    right = merge_status(a, merge_status(b, c))
                    assert np.array_equal(left, right)  # associative


class TestLyapunov:
    def test_all_terms_vanish(self):
        region = InspectionRegion(np.zeros(3), np.array([40.0, 40.0, 40.0]))
        grid = QuadratureGrid(region, 2.0)
        f = DensityField(np.array([[20.0, 20.0, 20.0]]),
                         np.array([0], dtype=np.uint8), 1.0, 0.02)
        targets = np.array([[20.0, 20.0, 10.0]])
        states = [state(p=(35, 35, 35))]
        assert lyapunov(states, f, grid, targets, GAINS) == 0.0

    def test_pure_kinetic(self):
        region = InspectionRegion(np.zeros(3), np.array([40.0, 40.0, 40.0]))
        grid = QuadratureGrid(region, 2.0)
        f = DensityField(np.array([[20.0, 20.0, 20.0]]),
                         np.array([0], dtype=np.uint8), 1.0, 0.02)
        targets = np.array([[20.0, 20.0, 10.0]])
        states = [state(p=(35, 35, 35), v=(2, 0, 0))]
        assert lyapunov(states, f, grid, targets, GAINS) == pytest.approx(2.0)

    def test_barrier_term(self):
        g = Gains(k_p=0.32, k_d=0.86, mu_o=1000.0, d_o=12.0, r=10.0, eps=500.0)
        targets = np.array([[0.0, 0.0, 0.0]])
        p = np.array([6.0, 0.0, 0.0])
        expected = 0.5 * 500.0 * (1 / 6 - 1 / 12) ** 2
        assert repulsive_potential(p, targets, g) == pytest.approx(expected)

    def test_eps_defaults_to_mu_o(self):
        assert GAINS.eps == GAINS.mu_o


class TestGains:
    def test_positive_required(self):
        with pytest.raises(ValueError):
            Gains(k_p=0.0, k_d=1.0, mu_o=1.0, d_o=1.0, r=1.0)
        with pytest.raises(ValueError):
            Gains(k_p=1.0, k_d=1.0, mu_o=1.0, d_o=1.0, r=1.0, eps=-2.0)
