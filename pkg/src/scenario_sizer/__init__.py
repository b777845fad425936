"""Online sizing of scenario programs solved repeatedly.

Observed (risk, sample size) pairs are fitted with an extended Beta risk
model; the fitted shape gives the smallest sample size whose predicted
confidence reaches ``beta``, and the closed loop in :mod:`.controller` feeds
that size back into the next round.
"""

from .controller import (
    ControllerConfig,
    ControllerState,
    TraceRecord,
    bernoulli_risk,
    empirical_frequency,
    hoeffding_confidence,
    run,
    step,
)
from .mle import DataPoint, Dataset, FitResult, asymptotic_loglik, fit, weighted_loglik
from .risk_model import BetaRiskModel, cdf_at, log_pdf, pdf
from .sizer import DEFAULT_N_MAX, SizerQuery, optimal_sample_size
from .specfun import DomainError

__version__ = "0.1.0"

__all__ = [
    "BetaRiskModel",
    "ControllerConfig",
    "ControllerState",
    "DataPoint",
    "Dataset",
    "DEFAULT_N_MAX",
    "DomainError",
    "FitResult",
    "SizerQuery",
    "TraceRecord",
    "asymptotic_loglik",
    "bernoulli_risk",
    "cdf_at",
    "empirical_frequency",
    "fit",
    "hoeffding_confidence",
    "log_pdf",
    "optimal_sample_size",
    "pdf",
    "run",
    "step",
    "weighted_loglik",
]
