"""Conditional phase statistics of the TWDP (two-wave with diffuse power) fading channel."""

__version__ = "0.1.0"

from .errors import ConfigError, NumericError, ParameterDomainError
from .params import ChannelParams, from_normalized, to_normalized, wrap_phase
from .specfun import SeriesControl
from .phase_pdf import (
    PhasePdfSpec,
    TruncationBounds,
    count_local_maxima,
    phase_pdf,
    phase_pdf_oracle,
    phase_pdf_term,
    power_share_pdf,
    rician_phase_pdf,
    truncation_bounds,
    twdp_phase_pdf,
)
from .closed_form import ClosedFormTerms, phase_pdf_closed
from .simulate import (
    FadingRealization,
    GeoSimConfig,
    McConfig,
    PhaseHistogram,
    geo_phase_histogram,
    geo_realization,
    mc_phase_samples,
)
from .perf import PeCurve, pe_curve, pe_monte_carlo, pe_mpsk, pe_rician_oracle
