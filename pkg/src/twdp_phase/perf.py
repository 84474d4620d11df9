"""M-PSK phase-synchronization error probability.

``P_e = 2 * integral_{pi/M}^{pi} p(phi) dphi`` with ``p`` the conditional
phase density for ``phi1 = 0``.  Noise is not included.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericError, ParameterDomainError
from .params import ChannelParams, from_normalized
from .phase_pdf import DEFAULT_ALPHA_PCT, PhasePdfSpec, rician_phase_pdf
from .simulate import McConfig, mc_phase_chunks


def _check_order(m_order: int) -> None:
    if int(m_order) != m_order or m_order < 2:
        raise ParameterDomainError(f"modulation order must be an integer >= 2, got {m_order}")


def error_probability(density, m_order: int, quad_tol: float = 1e-12) -> float:
    """``2 * integral_{pi/M}^{pi} density`` split at pi/2 when it lies inside."""
    _check_order(m_order)
    lo = math.pi / m_order
    cuts = [lo, math.pi / 2, math.pi] if lo < math.pi / 2 else [lo, math.pi]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err = integrate.quad(lambda x: float(density(x)), a, b, epsabs=quad_tol, epsrel=1e-12, limit=200)
        if not err <= 100.0 * quad_tol + 1e-10 * abs(val):
            raise NumericError("P_e quadrature did not converge", partial=2.0 * (total + val), where="pe")
        total += val
    pe = 2.0 * total
    if -quad_tol <= pe < 0.0:
        pe = 0.0
    elif 1.0 < pe <= 1.0 + quad_tol:
        pe = 1.0
    return pe


def pe_mpsk(params: ChannelParams, m_order: int, quad_tol: float = 1e-12,
            alpha_pct: float = DEFAULT_ALPHA_PCT) -> float:
    if params.phi1 != 0.0:
        raise ParameterDomainError("P_e is defined relative to phi1 = 0")
    return error_probability(PhasePdfSpec.build(params, alpha_pct), m_order, quad_tol)


def pe_rician_oracle(k: float, m_order: int, quad_tol: float = 1e-12) -> float:
    """Same quadrature applied to the closed-form Rician phase density."""
    return error_probability(lambda x: rician_phase_pdf(k, x), m_order, quad_tol)


@dataclass(frozen=True)
class PeCurve:
    gamma: float
    m_order: int
    k_grid: np.ndarray
    pe_values: np.ndarray
    omega: float = 1.0
    alpha_pct: float = DEFAULT_ALPHA_PCT

    def __post_init__(self):
        if len(self.k_grid) != len(self.pe_values):
            raise ValueError("k_grid and pe_values differ in length")
        if np.any(np.diff(self.k_grid) <= 0):
            raise ValueError("k_grid must be strictly ascending")
        if np.any((self.pe_values < 0) | (self.pe_values > 1)):
            raise ValueError("P_e outside [0, 1]")

    def header(self) -> dict:
        return {"gamma": self.gamma, "omega": self.omega, "M": self.m_order, "alpha_pct": self.alpha_pct}

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("# " + json.dumps(self.header(), sort_keys=True) + "\n")
            w = csv.writer(fh)
            w.writerow(["K", "Pe"])
            for k, pe in zip(self.k_grid, self.pe_values):
                w.writerow([f"{k:.17g}", f"{pe:.17g}"])


def read_pe_csv(path) -> PeCurve:
    with open(path) as fh:
        header = json.loads(fh.readline()[1:])
        rows = list(csv.DictReader(fh))
    k = np.array([float(r["K"]) for r in rows])
    pe = np.array([float(r["Pe"]) for r in rows])
    return PeCurve(header["gamma"], header["M"], k, pe, header["omega"], header["alpha_pct"])


def pe_curve(gamma: float, omega: float, m_order: int, k_grid, alpha_pct: float = DEFAULT_ALPHA_PCT,
             quad_tol: float = 1e-12) -> PeCurve:
    k_grid = np.asarray(k_grid, dtype=float)
    pe = np.array([pe_mpsk(from_normalized(k, gamma, omega), m_order, quad_tol, alpha_pct) for k in k_grid])
    return PeCurve(gamma, m_order, k_grid, pe, omega, alpha_pct)


def pe_monte_carlo(cfg: McConfig, m_order: int) -> float:
    """Fraction of simulated phases falling outside the ``|phi| <= pi/M`` sector."""
    _check_order(m_order)
    if cfg.params.phi1 != 0.0:
        raise ParameterDomainError("P_e is defined relative to phi1 = 0")
    limit = math.pi / m_order
    errors = 0
    for ph in mc_phase_chunks(cfg):
        errors += int(np.count_nonzero(np.abs(ph) > limit))
    return errors / cfg.n_samples


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
