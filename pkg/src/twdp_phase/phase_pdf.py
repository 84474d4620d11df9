"""Conditional TWDP phase density as a truncated Poisson mixture.

Given the stronger ray's phase ``phi1``, the received phase density is

    p(phi) = sum_m Po(m; nu) p(phi | m),   nu = v2**2 / (2 sigma2)

where ``p(phi | m)`` is the phase density of a fixed ray ``v1`` plus a
Nakagami(m + 1) envelope with uniform phase.  Each ``p(phi | m)`` is a sum of
three closed terms (incomplete gamma tail, Tricomi U, terminating Humbert
Phi_1).  The mixture is truncated to the Wald interval of the weighted
Poisson distribution of the average power over m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np
from scipy import integrate, special

from .errors import NumericError, ParameterDomainError
from .params import ChannelParams, wrap_phase
from .specfun import (
    DEFAULT_CONTROL,
    SeriesControl,
    humbert_phi1_terminating,
    reg_gamma_q,
    tricomi_u_scaled,
)

TWO_PI = 2.0 * math.pi
DEFAULT_ALPHA_PCT = 99.9
WEIGHT_FLOOR = 1e-300


def default_grid(n_points: int = 2001) -> np.ndarray:
    """Uniform grid of ``n_points`` over (-pi, pi], the right end included."""
    return np.linspace(-math.pi, math.pi, n_points + 1)[1:]


@dataclass(frozen=True)
class TruncationBounds:
    m_min: int
    m_max: int
    alpha_pct: float

    @property
    def n_terms(self) -> int:
        return self.m_max - self.m_min + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)


def normal_quantile(prob: float) -> float:
    return NormalDist().inv_cdf(prob)


def truncation_bounds(nu: float, alpha_pct: float = DEFAULT_ALPHA_PCT) -> TruncationBounds:
    """Summation range ``[m_min, m_max]`` from the Wald interval of the power share.

    ``m_min = floor(max(0, nu - 1 - Z sqrt(nu)))``, ``m_max = ceil(nu + Z sqrt(nu))``
    with ``Z`` the standard normal quantile at ``1/2 + alpha_pct/200``.
    """
    if not 0.0 < alpha_pct < 100.0:
        raise ParameterDomainError(f"alpha_pct must lie in (0, 100), got {alpha_pct}")
    if nu < 0:
        raise ParameterDomainError(f"nu must be >= 0, got {nu}")
    if nu == 0:
        return TruncationBounds(0, 0, alpha_pct)
    z = normal_quantile(0.5 + alpha_pct / 200.0)
    root = math.sqrt(nu)
    m_min = math.floor(max(0.0, nu - 1.0 - z * root))
    m_max = math.ceil(nu + z * root)
    return TruncationBounds(int(m_min), int(m_max), alpha_pct)


def poisson_log_pmf(m, nu: float):
    m = np.asarray(m, dtype=float)
    if nu == 0:
        return np.where(m == 0, 0.0, -np.inf)
    return m * math.log(nu) - nu - special.gammaln(m + 1)


def power_share_pdf(nu: float, m):
    """Share of average power carried by mixture term ``m``.

    ``p_p(m) = nu/(1+nu) Po(m-1; nu) + 1/(1+nu) Po(m; nu)``, with ``Po(-1) = 0``.
    """
    if nu < 0:
        raise ParameterDomainError("nu must be >= 0")
    m = np.asarray(m, dtype=float)
    with np.errstate(invalid="ignore"):
        prev = np.where(m >= 1, np.exp(poisson_log_pmf(np.maximum(m - 1, 0), nu)), 0.0)
    out = nu / (1.0 + nu) * prev + np.exp(poisson_log_pmf(m, nu)) / (1.0 + nu)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhasePdfSpec:
    params: ChannelParams
    bounds: TruncationBounds
    weights: np.ndarray = field(repr=False)
    ctl: SeriesControl = DEFAULT_CONTROL

    @classmethod
    def build(cls, params: ChannelParams, alpha_pct: float = DEFAULT_ALPHA_PCT,
              ctl: SeriesControl = DEFAULT_CONTROL, bounds: TruncationBounds | None = None) -> "PhasePdfSpec":
        """Prepare the evaluator; ``bounds`` overrides the Wald range from ``alpha_pct``."""
        if bounds is None:
            bounds = truncation_bounds(params.nu, alpha_pct)
        w = np.exp(poisson_log_pmf(bounds.indices(), params.nu))
        w = np.where(w < WEIGHT_FLOOR, 0.0, w)
        w.setflags(write=False)
        return cls(params, bounds, w, ctl)

    def __call__(self, phi):
        return phase_pdf(self, phi)


def phase_pdf_term(params: ChannelParams, m: int, phi, ctl: SeriesControl = DEFAULT_CONTROL):
    """Phase density ``p(phi | m)`` for a single mixture index.

    With ``a = v1**2/(2 sigma2)``, ``psi = phi - phi1`` and ``s = a sin(psi)**2``::

        2 pi p = Q(m+1, a)
               + sqrt(pi)/tan|psi| s**(m+1) e**-s U(1/2, m+3/2, s) / m!
               + 2 cos(psi)**2 a**(m+1) e**-a Phi_1(1, -m, 3/2; cos(psi)**2, a cos(psi)**2) / m!

    The middle term equals ``sqrt(pi a) cos(psi) e**-s [s**(m+1/2) U] / m!``
    with the bracket a polynomial in ``s``, so there is no singularity at
    ``psi in {0, +-pi/2, pi}`` and its value at ``psi = 0`` is
    ``sqrt(pi a) (1/2)_m / m!`` rather than zero.
    """
    phi_arr = np.asarray(phi, dtype=float)
    psi = wrap_phase(phi_arr - params.phi1)
    psi = np.asarray(psi, dtype=float)
    a = params.a
    if a == 0.0:
        out = np.full(psi.shape, 1.0 / TWO_PI)
        return float(out) if out.ndim == 0 else out

    cos_psi = np.cos(psi)
    cos2 = cos_psi**2
    sin2 = np.sin(psi) ** 2
    s = a * sin2
    log_mfact = special.gammaln(m + 1)

    tail = reg_gamma_q(m + 1.0, a)
    middle = math.sqrt(math.pi * a) * cos_psi * np.exp(-s - log_mfact) * tricomi_u_scaled(0.5, m, s)
    log_pref = (m + 1) * math.log(a) - a - log_mfact
    third = 2.0 * cos2 * np.exp(log_pref) * humbert_phi1_terminating(m, cos2, a * cos2, ctl)

    out = (tail + middle + third) / TWO_PI
    return float(out) if out.ndim == 0 else out


def phase_pdf(spec: PhasePdfSpec, phi):
    """Truncated mixture ``sum_m Po(m; nu) p(phi | m)`` over the evaluator's truncation range."""
    phi_arr = np.asarray(phi, dtype=float)
    out = np.zeros(phi_arr.shape)
    for m, w in zip(spec.bounds.indices(), spec.weights):
        if w == 0.0:
            continue
        out = out + w * np.asarray(phase_pdf_term(spec.params, int(m), phi_arr, spec.ctl))
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def twdp_phase_pdf(params: ChannelParams, phi, alpha_pct: float = DEFAULT_ALPHA_PCT):
    """Convenience wrapper: build the evaluator and apply it."""
    return phase_pdf(PhasePdfSpec.build(params, alpha_pct), phi)


def rician_phase_pdf(k: float, phi):
    """Phase density of a Rician channel with ``k = V**2 / (2 sigma2)``, phase reference 0."""
    if k < 0:
        raise ParameterDomainError("k must be >= 0")
    phi = np.asarray(phi, dtype=float)
    c = np.cos(phi)
    rk = math.sqrt(k)
    out = math.exp(-k) / TWO_PI + math.sqrt(k / math.pi) * c * np.exp(-k * np.sin(phi) ** 2) * (
        1.0 + special.erf(rk * c)
    ) / 2.0
    return float(out) if out.ndim == 0 else out


def _rice_over_r(r, v2: float, sigma2: float):
    """Rician envelope density divided by ``r`` (scaled Bessel form)."""
    return np.exp(-((r - v2) ** 2) / (2.0 * sigma2)) * special.i0e(r * v2 / sigma2) / sigma2


def phase_pdf_oracle(params: ChannelParams, phi: float, tol: float = 1e-11) -> float:
    """Phase density by direct quadrature over the exact Rician envelope.

    Integrates ``p(phi | r) p_Rice(r)`` where ``p(phi | r)`` is the phase
    density of ``v1 + r e^{j theta}`` with uniform ``theta``.  The substitution
    ``r = sqrt(v1**2 sin(psi)**2 + u**2)`` turns ``1/sqrt(r**2 - v1**2 sin**2)``
    into ``1/r``, removing the endpoint singularity.  No mixture expansion is
    used.
    """
    v1, v2, sigma2 = params.v1, params.v2, params.sigma2
    if v1 == 0.0:
        return 1.0 / TWO_PI
    psi = float(wrap_phase(float(phi) - params.phi1))
    sin_abs = abs(math.sin(psi))
    cos_psi = math.cos(psi)
    h2 = (v1 * sin_abs) ** 2
    sigma = math.sqrt(sigma2)
    r_top = v2 + 40.0 * sigma + v1
    u_split = v1 * abs(cos_psi)
    u_top = math.sqrt(max(r_top**2 - h2, 0.0))

    def radius(u):
        return math.sqrt(h2 + u * u)

    def kernel(u):
        # p_Rice(r) dr / sqrt(r^2 - h^2) = (p_Rice(r)/r) du
        return _rice_over_r(radius(u), v2, sigma2)

    # candidate peak of the envelope density, in u coordinates
    peaks = []
    r_peak = max(v2, sigma)
    if r_peak**2 > h2:
        peaks.append(math.sqrt(r_peak**2 - h2))

    def quad(f, lo, hi):
        if hi <= lo:
            return 0.0
        pts = [p for p in peaks if lo < p < hi] or None
        val, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=1e-12, limit=400, points=pts)
        if not err <= 10.0 * tol + 1e-10 * abs(val):
            raise NumericError("oracle quadrature did not converge", partial=val, where="phase_pdf_oracle")
        return val

    total = 0.0
    if cos_psi > 0:
        # r < v1 branch: both intersections of the ray with the circle count
        total += v1 * cos_psi / math.pi * quad(kernel, 0.0, u_split)
    # r > v1 branch
    total += v1 * cos_psi / TWO_PI * quad(kernel, u_split, u_top)
    # uniform part: P(r > v1) / (2 pi), integrated in r directly
    rice = lambda r: r * _rice_over_r(r, v2, sigma2)
    tail = quad(rice, v1, r_top) if v1 < r_top else 0.0
    total += tail / TWO_PI
    return total


def bin_average_pdf(density_fn, edges, nodes: int = 8) -> np.ndarray:
    """Mean of ``density_fn`` over each bin ``[edges[i], edges[i+1]]`` (Gauss-Legendre)."""
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(density_fn(pts.ravel())).reshape(pts.shape)
    return 0.5 * vals @ w


def count_local_maxima(values, rel_tol: float = 1e-12) -> int:
    """Number of local maxima of a periodic sampled curve.

    Flat runs (steps below ``rel_tol * max``) are merged, so a peak sitting
    between two grid nodes of equal value counts once.
    """
    v = np.asarray(values, dtype=float)
    d = np.diff(np.append(v, v[0]))
    d = d[np.abs(d) > rel_tol * np.max(np.abs(v))]
    if d.size == 0:
        return 0
    s = np.sign(d)
    return int(np.count_nonzero((s > 0) & (np.roll(s, -1) < 0)))


def tail_bounds(nu: float, tail_mass: float) -> TruncationBounds:
    """Smallest central range whose discarded Poisson mass is below ``tail_mass``.

    An alternative to the Wald range for callers that need a hard pointwise
    truncation guarantee; ``alpha_pct`` records ``100 (1 - tail_mass)``.
    """
    if not 0.0 < tail_mass < 1.0:
        raise ParameterDomainError("tail_mass must lie in (0, 1)")
    from scipy.stats import poisson

    if nu == 0:
        return TruncationBounds(0, 0, 100.0 * (1.0 - tail_mass))
    lo = int(poisson.ppf(tail_mass / 2.0, nu))
    # isf loses accuracy far in the tail; sf stays accurate, so walk upward
    hi = math.ceil(nu)
    while poisson.sf(hi, nu) > tail_mass / 2.0:
        hi += 1
    while poisson.cdf(lo - 1, nu) + poisson.sf(hi, nu) > tail_mass:
        hi += 1
    return TruncationBounds(lo, hi, 100.0 * (1.0 - tail_mass))
