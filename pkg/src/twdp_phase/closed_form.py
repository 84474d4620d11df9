"""Closed-form conditional phase density in terms of Humbert Phi_3 and a triple series.

Used as an independent check on the mixture evaluator, not as the
production path: the triple series alternates in sign and its cancellation
grows roughly like ``exp(2 sqrt(a nu))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NumericError, ParameterDomainError
from .params import ChannelParams, wrap_phase
from .specfun import DEFAULT_CONTROL, SeriesControl, humbert_phi3, phi3_bound, triple_f3_instance

TWO_PI = 2.0 * math.pi
DEFAULT_K_CAP = 20.0
# relative error budget before the triple series is declared unreliable
CANCELLATION_LIMIT = 1e8


@dataclass(frozen=True)
class ClosedFormTerms:
    uniform_term: float
    cos_term: float
    triple_term: float

    @property
    def total(self) -> float:
        return self.uniform_term + self.cos_term + self.triple_term


def phase_pdf_closed(params: ChannelParams, phi: float, ctl: SeriesControl = DEFAULT_CONTROL,
                     k_cap: float = DEFAULT_K_CAP) -> ClosedFormTerms:
    if params.k > k_cap * (1.0 + 1e-12):
        raise ParameterDomainError(f"K={params.k:g} exceeds the closed-form cap {k_cap:g}")
    a, nu = params.a, params.nu
    psi = float(wrap_phase(float(phi) - params.phi1))
    c, s = math.cos(psi), math.sin(psi)

    try:
        phi3_a = humbert_phi3(1.0, 2.0, a, a * nu, ctl)
    except NumericError as exc:
        raise NumericError(f"uniform term: {exc}", exc.partial, "uniform_term") from exc
    uniform = (1.0 - a * math.exp(-(a + nu)) * phi3_a) / TWO_PI

    if a == 0.0:
        return ClosedFormTerms(uniform, 0.0, 0.0)

    try:
        phi3_b = humbert_phi3(0.5, 1.0, nu, a * nu * s * s, ctl)
    except NumericError as exc:
        raise NumericError(f"cos term: {exc}", exc.partial, "cos_term") from exc
    cos_term = math.sqrt(math.pi * a) / TWO_PI * c * math.exp(-(a * s * s + nu)) * phi3_b

    ac2 = a * c * c
    try:
        f3, cancel = triple_f3_instance(-ac2 * nu, ac2, a * nu, ctl, return_cancellation=True)
    except NumericError as exc:
        raise NumericError(f"triple term: {exc}", exc.partial, "triple_term") from exc
    if cancel > CANCELLATION_LIMIT:
        raise NumericError(
            f"triple term: cancellation factor {cancel:.3g} leaves too few digits", f3, "triple_term"
        )
    triple = 2.0 / TWO_PI * ac2 * math.exp(-(a + nu)) * f3
    return ClosedFormTerms(uniform, cos_term, triple)


def phi3_arguments(params: ChannelParams, phi: float):
    """The two ``(b, c, w, z)`` tuples passed to Phi_3 at this point."""
    a, nu = params.a, params.nu
    s = math.sin(float(wrap_phase(float(phi) - params.phi1)))
    return [(1.0, 2.0, a, a * nu), (0.5, 1.0, nu, a * nu * s * s)]


def phi3_within_bound(params: ChannelParams, phi: float, ctl: SeriesControl = DEFAULT_CONTROL) -> bool:
    return all(abs(humbert_phi3(*args, ctl)) <= phi3_bound(*args) for args in phi3_arguments(params, phi))
