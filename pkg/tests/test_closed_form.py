import math

import numpy as np
import pytest

from twdp_phase import from_normalized
from twdp_phase.closed_form import phase_pdf_closed, phi3_within_bound
from twdp_phase.errors import NumericError, ParameterDomainError
from twdp_phase.phase_pdf import PhasePdfSpec, rician_phase_pdf, tail_bounds
from twdp_phase.specfun import SeriesControl


def _full(params):
    return PhasePdfSpec.build(params, bounds=tail_bounds(params.nu, 1e-17))


@pytest.mark.parametrize("k,g", [(1, 0.5), (3, 1.0), (10, 0.5), (10, 1.0)])
def test_closed_form_matches_untruncated_series(k, g):
    p = from_normalized(k, g, 1)
    spec = _full(p)
    for phi in np.linspace(-math.pi, math.pi, 13):
        assert phase_pdf_closed(p, phi).total == pytest.approx(spec(phi), abs=1e-11)


@pytest.mark.parametrize("k", [1.0, 4.0])
def test_gamma_zero_reduces_to_rician(k):
    p = from_normalized(k, 0, 1)
    for phi in (-2.0, 0.0, 0.4, 3.0):
        terms = phase_pdf_closed(p, phi)
        assert terms.total == pytest.approx(rician_phase_pdf(k, phi), abs=1e-13)
        # with nu = 0 the uniform term is exactly the e^{-K}/(2 pi) part
        assert terms.uniform_term == pytest.approx(math.exp(-k) / (2 * math.pi), rel=1e-13)


def test_rayleigh():
    t = phase_pdf_closed(from_normalized(0, 0.5, 1), 1.2)
    assert t.total == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    assert t.cos_term == 0 and t.triple_term == 0


def test_k_cap():
    phase_pdf_closed(from_normalized(20, 0.3, 1), 0.1)
    with pytest.raises(ParameterDomainError):
        phase_pdf_closed(from_normalized(20.5, 0.3, 1), 0.1)


def test_budget_error_names_term():
    with pytest.raises(NumericError) as err:
        phase_pdf_closed(from_normalized(10, 1, 1), 0.3, SeriesControl(max_terms=4))
    assert err.value.where in {"uniform_term", "cos_term", "triple_term"}


def test_phi3_envelope_holds():
    for k in (1, 5, 15):
        assert phi3_within_bound(from_normalized(k, 0.8, 1), 0.7)
