import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from msefield import GAUSSIAN, QPSK, Alphabet, MmseFunction, mmse, mmse_inverse


def _qpsk_mmse_reference(rho):
    # per-dimension BPSK at SNR rho: 1 - E[tanh(rho + sqrt(rho) Z)]
    f = lambda z: math.tanh(rho + math.sqrt(rho) * z) * math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
    val, _ = integrate.quad(f, -40, 40, limit=400, epsabs=1e-14, epsrel=1e-13)
    return 1.0 - val


def test_gaussian_values():
    assert mmse(GAUSSIAN, 0.0) == 1.0
    assert mmse(GAUSSIAN, 3.0) == pytest.approx(0.25, abs=1e-15)
    assert mmse_inverse(GAUSSIAN, 1.0) == 0.0
    assert mmse_inverse(GAUSSIAN, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_qpsk_prior_variance():
    assert mmse(QPSK, 0.0) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("rho", [1e-3, 0.1, 0.49, 0.51, 1.0, 2.0, 4.0, 10.0, 30.0])
def test_qpsk_matches_scipy_quadrature(rho):
    assert mmse(QPSK, rho) == pytest.approx(_qpsk_mmse_reference(rho), rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("rho", [50.0, 200.0])
def test_qpsk_high_snr_matches_mpmath(rho):
    mpmath.mp.dps = 40
    r = mpmath.mpf(rho)
    integrand = lambda z: (1 - mpmath.tanh(r + mpmath.sqrt(r) * z)) * mpmath.npdf(z)
    # the mass sits near z = -sqrt(rho), where tanh departs from 1
    ref = mpmath.quad(integrand, [-mpmath.inf, -2 * mpmath.sqrt(r), -mpmath.sqrt(r), 0, mpmath.inf])
    assert mmse(QPSK, rho) == pytest.approx(float(ref), rel=1e-7)


def test_qpsk_at_two_matches_monte_carlo():
    # direct conditional-mean estimation of unit-energy QPSK in CN(0, 1) noise
    n = 10_000_000
    rho = 2.0
    rng = np.random.default_rng(12345)
    bits = rng.integers(0, 2, size=(2, n)) * 2 - 1
    x = (bits[0] + 1j * bits[1]) / math.sqrt(2)
    y = math.sqrt(rho) * x + (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    a = math.sqrt(2 * rho)
    x_hat = (np.tanh(a * y.real) + 1j * np.tanh(a * y.imag)) / math.sqrt(2)
    err = np.abs(x - x_hat) ** 2
    se = err.std(ddof=1) / math.sqrt(n)
    assert abs(mmse(QPSK, rho) - err.mean()) <= 3 * se


def test_qpsk_below_gaussian():
    rho = np.logspace(-2, 2, 40)
    assert np.all(mmse(QPSK, rho) <= mmse(GAUSSIAN, rho) + 1e-12)


def test_qpsk_inverse_round_trip_at_two():
    assert mmse_inverse(QPSK, mmse(QPSK, 2.0)) == pytest.approx(2.0, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_round_trip(rho):
    for fn in (GAUSSIAN, QPSK):
        assert mmse_inverse(fn, mmse(fn, rho)) == pytest.approx(rho, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.0, max_value=500.0), st.floats(min_value=1e-6, max_value=50.0))
def test_strictly_decreasing(rho, step):
    for fn in (GAUSSIAN, QPSK):
        assert mmse(fn, rho + step) < mmse(fn, rho)


def test_vectorised_shapes():
    rho = np.linspace(0, 5, 12).reshape(3, 4)
    assert mmse(QPSK, rho).shape == (3, 4)
    assert isinstance(mmse(QPSK, 1.0), float)


def test_quadrature_order_convergence():
    rho = np.array([0.3, 1.7, 9.0, 80.0])
    coarse = MmseFunction(Alphabet.QPSK, quadrature_order=64)(rho)
    fine = MmseFunction(Alphabet.QPSK, quadrature_order=128)(rho)
    assert np.allclose(coarse, fine, rtol=1e-10, atol=0)


@pytest.mark.parametrize("bad", [-0.1, np.nan])
def test_forward_rejects_invalid(bad):
    with pytest.raises(ValueError):
        mmse(GAUSSIAN, bad)


@pytest.mark.parametrize("bad", [0.0, -0.2, 1.5])
def test_inverse_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        mmse_inverse(QPSK, bad)
