import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from twdp_phase import ChannelParams, from_normalized
from twdp_phase.phase_pdf import (
    PhasePdfSpec,
    bin_average_pdf,
    count_local_maxima,
    default_grid,
    phase_pdf,
    phase_pdf_oracle,
    phase_pdf_term,
    power_share_pdf,
    rician_phase_pdf,
    tail_bounds,
    truncation_bounds,
    twdp_phase_pdf,
)
from twdp_phase.errors import ParameterDomainError


def _full_series(params, phi):
    return phase_pdf(PhasePdfSpec.build(params, bounds=tail_bounds(params.nu, 1e-17)), phi)


def test_bounds_examples():
    b = truncation_bounds(30.0, 99.9)
    assert (b.m_min, b.m_max, b.n_terms) == (10, 49, 40)
    assert truncation_bounds(0.0).n_terms == 1
    b = truncation_bounds(0.5, 99.9)
    assert b.m_min == 0
    with pytest.raises(ParameterDomainError):
        truncation_bounds(1.0, 100.0)


@given(nu=st.floats(0, 200))
def test_bounds_contain_mean(nu):
    b = truncation_bounds(nu)
    assert b.m_min <= nu <= b.m_max + 1e-9
    assert b.m_min >= 0


def test_power_share_is_distribution():
    for nu in (0.1, 4.0, 30.0):
        m = np.arange(0, 300)
        p = power_share_pdf(nu, m)
        assert p.sum() == pytest.approx(1.0, abs=1e-14)
        # mean of the power share is nu + nu/(1+nu)
        assert (m * p).sum() == pytest.approx(nu + nu / (1 + nu), rel=1e-12)


def test_term_against_nakagami_quadrature():
    """p(phi|m) by 30-digit double quadrature over the Nakagami(m+1) envelope."""
    params = from_normalized(10, 0.7, 1)
    m, phi = 2, 1.0
    v1, s2 = params.v1, params.sigma2
    with mpmath.workdps(30):
        mm = m + 1
        om = mpmath.mpf(2 * s2) * mm

        def nak(r):
            return 2 * mm**mm * r ** (2 * mm - 1) * mpmath.exp(-mm * r**2 / om) / (mpmath.gamma(mm) * om**mm)

        def joint(r, th):
            # density of the phase of v1 + r e^{j th} at phi, via polar change of variables
            z = v1 + r * mpmath.expj(th)
            return z

        # integrate over the resultant in polar form: p(phi) = int rho * f_xy(rho cos phi, rho sin phi) d rho
        def f_xy(x, y):
            dx = x - v1
            r = mpmath.sqrt(dx**2 + y**2)
            return nak(r) / (2 * mpmath.pi * r) if r > 0 else 0

        c, s = mpmath.cos(phi), mpmath.sin(phi)
        ref = mpmath.quad(lambda rho: rho * f_xy(rho * c, rho * s), [0, v1 * c, v1, 3 * v1, 20])
    assert phase_pdf_term(params, m, phi) == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("k,g", [(1, 0.3), (5, 1.0), (10, 0.7), (15, 0.0)])
def test_full_series_matches_oracle(k, g):
    p = from_normalized(k, g, 1)
    phi = np.linspace(-math.pi, math.pi, 37)[1:]
    ours = _full_series(p, phi)
    ref = np.array([phase_pdf_oracle(p, x) for x in phi])
    assert np.max(np.abs(ours - ref)) <= 1e-10


def test_term_at_psi_zero_is_continuous():
    p = from_normalized(5, 0.5, 1)
    for m in (0, 3):
        near = phase_pdf_term(p, m, np.array([-1e-7, 0.0, 1e-7]))
        assert near[0] == pytest.approx(near[1], rel=1e-9)
        assert near[2] == pytest.approx(near[1], rel=1e-9)


@pytest.mark.parametrize("k", [0.5, 3.0, 12.0])
def test_gamma_zero_is_rician(k):
    phi = default_grid(181)
    np.testing.assert_allclose(twdp_phase_pdf(from_normalized(k, 0, 1), phi), rician_phase_pdf(k, phi), atol=1e-13)


def test_rayleigh_is_uniform():
    phi = default_grid(101)
    np.testing.assert_allclose(twdp_phase_pdf(from_normalized(0, 0.4, 2.0), phi), 1 / (2 * math.pi), atol=1e-15)


def test_weak_ray_only_is_uniform_too():
    # v1 = 0: the stronger ray vanishes, nothing breaks the phase symmetry
    p = ChannelParams(0.0, 0.0, 0.7)
    assert twdp_phase_pdf(p, 0.3) == pytest.approx(1 / (2 * math.pi), abs=1e-15)


@settings(max_examples=25, deadline=None)
@given(k=st.floats(0, 25), g=st.floats(0, 1), phi=st.floats(-math.pi, math.pi))
def test_symmetry_and_nonnegativity(k, g, phi):
    p = from_normalized(k, g, 1)
    spec = PhasePdfSpec.build(p)
    a, b = spec(phi), spec(-phi)
    assert a >= 0
    assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


@settings(max_examples=20, deadline=None)
@given(k=st.floats(0, 20), g=st.floats(0, 1), phi=st.floats(-math.pi, math.pi), shift=st.floats(-math.pi, math.pi))
def test_shift_equivariance(k, g, phi, shift):
    p = from_normalized(k, g, 1)
    base = twdp_phase_pdf(p, phi)
    shifted = twdp_phase_pdf(p.with_phi1(shift), phi + shift)
    assert shifted == pytest.approx(base, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("k,g", [(2, 0.5), (20, 1.0), (40, 0.2)])
def test_full_series_integrates_to_one(k, g):
    p = from_normalized(k, g, 1)
    spec = PhasePdfSpec.build(p, bounds=tail_bounds(p.nu, 1e-15))
    val, _ = integrate.quad(spec, -math.pi, math.pi, points=[0.0], limit=200, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_wald_integral_equals_retained_poisson_mass():
    p = from_normalized(10, 0.7, 1)
    spec = PhasePdfSpec.build(p)
    val, _ = integrate.quad(spec, -math.pi, math.pi, points=[0.0], limit=200, epsabs=1e-13)
    assert val == pytest.approx(spec.weights.sum(), abs=1e-11)


def test_tail_bounds_mass():
    from scipy.stats import poisson

    for nu in (0.3, 5.0, 30.0):
        b = tail_bounds(nu, 1e-12)
        lost = poisson.cdf(b.m_min - 1, nu) + poisson.sf(b.m_max, nu)
        assert lost <= 1e-12


def test_weights_read_only():
    spec = PhasePdfSpec.build(from_normalized(5, 0.5, 1))
    with pytest.raises(ValueError):
        spec.weights[0] = 1.0


def test_bin_average_of_constant_and_linear():
    edges = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(bin_average_pdf(lambda x: 3.0 + 0 * x, edges), 3.0)
    np.testing.assert_allclose(bin_average_pdf(lambda x: x, edges), 0.5 * (edges[1:] + edges[:-1]), atol=1e-15)


def test_count_local_maxima():
    x = default_grid(400)
    assert count_local_maxima(np.cos(x)) == 1
    assert count_local_maxima(np.cos(2 * x)) == 2
    assert count_local_maxima(np.ones(10)) == 0
    assert count_local_maxima(np.array([0, 1, 1, 0, 0.0])) == 1


@pytest.mark.parametrize("k,n", [(1, 1), (5, 1), (10, 2), (15, 2)])
def test_equal_rays_modes(k, n):
    phi = default_grid(2001)
    assert count_local_maxima(twdp_phase_pdf(from_normalized(k, 1, 1), phi)) == n
