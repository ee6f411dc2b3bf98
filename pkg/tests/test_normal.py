import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from gsd.normal import (
    NormalParams,
    discretization_map,
    mean_curve,
    qnormal_pmf,
    variance_ceiling_map,
)


def quadrature_pmf(psi_o, sigma_o, M):
    density = lambda x: math.exp(-0.5 * ((x - psi_o) / sigma_o) ** 2) / (sigma_o * math.sqrt(2 * math.pi))
    edges = [-math.inf] + [s + 0.5 for s in range(1, M)] + [math.inf]
    return np.array([integrate.quad(density, a, b, epsabs=1e-14, epsrel=1e-13)[0]
                     for a, b in zip(edges[:-1], edges[1:])])


def test_concentrated_pmf():
    probs = qnormal_pmf(NormalParams(3, 0.1))
    assert probs[2] >= 1 - 1e-6
    assert np.all(probs[[0, 1, 3, 4]] <= 1e-6)


def test_symmetric_about_centre():
    for sigma in (0.3, 1.0, 2.7):
        probs = qnormal_pmf(NormalParams(3, sigma))
        assert probs[0] == pytest.approx(probs[4], abs=1e-15)
        assert probs[1] == pytest.approx(probs[3], abs=1e-15)


def test_censoring_saturates():
    probs = qnormal_pmf(NormalParams(-10, 1))
    assert probs[0] == pytest.approx(1.0, abs=1e-15)
    assert probs[1:].sum() <= 1e-15


@pytest.mark.parametrize("psi_o, sigma_o, M", [(3, 1, 5), (2.2, 0.6, 5), (0.5, 2.0, 5), (4.1, 1.3, 7)])
def test_pmf_against_quadrature(psi_o, sigma_o, M):
    np.testing.assert_allclose(qnormal_pmf(NormalParams(psi_o, sigma_o, M)),
                               quadrature_pmf(psi_o, sigma_o, M), atol=1e-11)


@given(st.floats(-20, 20), st.floats(1e-3, 100), st.integers(2, 11))
def test_pmf_sums_to_one(psi_o, sigma_o, M):
    probs = qnormal_pmf(NormalParams(psi_o, sigma_o, M))
    assert np.all(probs >= 0)
    assert abs(probs.sum() - 1) <= 1e-12


@pytest.mark.parametrize("sigma", [0, -1])
def test_sigma_must_be_positive(sigma):
    with pytest.raises(ValueError):
        NormalParams(3, sigma)


def test_discretization_examples():
    assert discretization_map(NormalParams(3, 1)).psi_u == pytest.approx(3.0, abs=1e-12)
    assert discretization_map(NormalParams(1, 1)).psi_u > 1
    tight = discretization_map(NormalParams(3, 0.1))
    assert tight.psi_u == pytest.approx(3.0, abs=1e-9)
    assert tight.sigma_u_sq <= 1e-6


def test_discretized_variance_within_envelope():
    for psi_o in np.linspace(-2, 8, 41):
        for sigma in (0.2, 1.0, 3.0):
            m = discretization_map(NormalParams(float(psi_o), sigma))
            assert 1 <= m.psi_u <= 5
            assert 0 <= m.sigma_u_sq <= (m.psi_u - 1) * (5 - m.psi_u) + 1e-12


def test_mean_curve_monotone_and_mirror_symmetric():
    grid = np.linspace(1, 5, 161)
    for sigma in (0.3, 1.0, 2.0):
        psi_u, _ = mean_curve(grid, sigma)
        assert np.all(np.diff(psi_u) >= -1e-9)
        np.testing.assert_allclose(psi_u + psi_u[::-1], 6.0, atol=1e-9)


def test_censoring_bias_at_ends():
    psi_u, _ = mean_curve([1.0, 5.0], 1.0)
    assert psi_u[0] > 1 and psi_u[1] < 5


def test_variance_ceiling_examples():
    out = variance_ceiling_map([1.0, 3.0, 5.0])
    assert out[0] == 0.0 and out[2] == 0.0
    assert out[1] < 4.0
    probs = quadrature_pmf(3.0, 2.0, 5)
    support = np.arange(1, 6)
    mean = np.dot(support, probs)
    assert out[1] == pytest.approx(np.dot((support - mean) ** 2, probs), abs=1e-9)


def test_variance_ceiling_below_discrete_maximum():
    grid = np.linspace(1, 5, 81)[1:-1]
    out = variance_ceiling_map(grid)
    assert np.all(out < (grid - 1) * (5 - grid))


def test_variance_ceiling_rejects_grid_outside_scale():
    with pytest.raises(ValueError):
        variance_ceiling_map([0.5, 3.0])
