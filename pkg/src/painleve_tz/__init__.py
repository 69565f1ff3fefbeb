"""Triple-zero solution of the first Painlevé equation on the real line:
exact series, adaptive integration, blow-up brackets and oscillation audits."""

__version__ = "0.1.0"

from .series import (EquationForm, SeriesExpansion, SeriesRangeError, convert_form,  # noqa: E402
                     eval_series, scaling, taylor_coefficients)
from .integrator import (IntegrationError, IntegratorConfig, State, Trajectory,  # noqa: E402
                         dense_eval, find_roots, integrate, sample)
from .blowup import (BlowupEstimate, analytic_lower_bound, bounding_integral,  # noqa: E402
                     estimate_blowup, minimal_upper_bound)
from .oscillation import (bounds_audit, crossings, envelope_stats,  # noqa: E402
                          first_integral_residual, gap_audit)

__all__ = [
    "__version__", "EquationForm", "SeriesExpansion", "SeriesRangeError", "convert_form",
    "eval_series", "scaling", "taylor_coefficients", "IntegrationError", "IntegratorConfig",
    "State", "Trajectory", "dense_eval", "find_roots", "integrate", "sample", "BlowupEstimate",
    "analytic_lower_bound", "bounding_integral", "estimate_blowup", "minimal_upper_bound",
    "bounds_audit", "crossings", "envelope_stats", "first_integral_residual", "gap_audit",
]
