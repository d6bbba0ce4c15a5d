"""Backend agreement: the compiled kernels and the numpy fallback must match
to rounding error on identical inputs."""

import numpy as np
import pytest

from vorocover._kernels import _py

try:
    from vorocover._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def random_problem(seed=0, m=5000, n=4, L=12):
    rng = np.random.default_rng(seed)
    nodes = np.ascontiguousarray(rng.uniform(0, 100, size=(m, 3)))
    positions = np.ascontiguousarray(rng.uniform(0, 100, size=(n, 3)))
    centers = np.ascontiguousarray(rng.uniform(10, 90, size=(L, 3)))
    return nodes, positions, centers


@needs_core
class TestBackendAgreement:
    def test_ownership_identical(self):
        nodes, positions, _ = random_problem(1)
        a = _py.ownership(nodes, positions)
        b = _core.ownership(nodes, positions)
        assert np.array_equal(a, b)

    def test_ownership_tie_rule(self):
        nodes = np.array([[0.0, 0.0, 0.0]])
        positions = np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
        assert _py.ownership(nodes, positions)[0] == 0
        assert _core.ownership(nodes, positions)[0] == 0

    def test_gaussian_mixture_close(self):
        nodes, _, centers = random_problem(2)
        a = _py.gaussian_mixture(nodes, centers, 1.3, 0.01)
        b = _core.gaussian_mixture(nodes, centers, 1.3, 0.01)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-300)

    def test_gaussian_mixture_empty_centers(self):
        nodes, _, _ = random_problem(3, m=100)
        empty = np.zeros((0, 3))
        assert np.array_equal(_py.gaussian_mixture(nodes, empty, 1.0, 0.01),
                              np.zeros(100))
        assert np.array_equal(_core.gaussian_mixture(nodes, empty, 1.0, 0.01),
                              np.zeros(100))

    def test_owned_moments_close(self):
        nodes, positions, centers = random_problem(4)
        phi = _py.gaussian_mixture(nodes, centers, 1.0, 0.01)
        owner = _py.ownership(nodes, positions)
        for i in range(positions.shape[0]):
            a = _py.owned_moments(nodes, owner, phi, i, positions[i].copy())
            b = _core.owned_moments(nodes, owner, phi, i, positions[i].copy())
            assert np.allclose(a, b, rtol=1e-10)


class TestFallbackDeterminism:
    def test_repeat_calls_bit_identical(self):
        nodes, positions, centers = random_problem(5)
        a1 = _py.gaussian_mixture(nodes, centers, 1.0, 0.02)
        a2 = _py.gaussian_mixture(nodes, centers, 1.0, 0.02)
        assert np.array_equal(a1, a2)
        o1 = _py.ownership(nodes, positions)
        o2 = _py.ownership(nodes, positions)
        assert np.array_equal(o1, o2)
