"""Beta prime regression with mean and precision submodels.

The package fits the two part regression by maximum likelihood and
offers three finite sample bias corrections: the corrective estimator
(subtract the estimated O(n^-1) bias), the preventive estimator (solve
the modified score equation) and a warp-speed parametric bootstrap.  A
Monte Carlo harness reproduces the bias study protocol, and the ``bpreg``
console script exposes fitting and the study on the command line.
"""

from .bias import (
    BiasResult,
    BiasWorkspace,
    CumulantScalars,
    corrected_estimate,
    cox_snell_bias,
    cumulant_scalars,
    modified_score,
)
from .bpdist import BpParams, log_pdf, moments, pdf, sample, sample_bp
from .exceptions import (
    BpregError,
    DomainError,
    ExcessiveFailures,
    InvalidData,
    NonConvergence,
    NonPositiveResponse,
    ParseError,
    RaggedRows,
    SingularInformation,
)
from .fit import (
    FitOptions,
    FitResult,
    fit_bootstrap,
    fit_cox_snell,
    fit_firth,
    fit_mle,
    initial_params,
)
from .model import (
    LinkFns,
    ModelSpec,
    ParamVector,
    expected_information,
    fitted_values,
    get_link,
    log_likelihood,
    score,
)
from .simulate import (
    McConfig,
    McReport,
    McSamples,
    export_replicates,
    run_study,
    simulate_replicates,
    summarize,
)
from .special import digamma, log_beta, log_gamma, tetragamma, trigamma

__version__ = "0.1.0"

__all__ = [
    "BiasResult",
    "BiasWorkspace",
    "BpParams",
    "BpregError",
    "CumulantScalars",
    "DomainError",
    "ExcessiveFailures",
    "FitOptions",
    "FitResult",
    "InvalidData",
    "LinkFns",
    "McConfig",
    "McReport",
    "McSamples",
    "ModelSpec",
    "NonConvergence",
    "NonPositiveResponse",
    "ParamVector",
    "ParseError",
    "RaggedRows",
    "SingularInformation",
    "corrected_estimate",
    "cox_snell_bias",
    "cumulant_scalars",
    "digamma",
    "expected_information",
    "export_replicates",
    "fit_bootstrap",
    "fit_cox_snell",
    "fit_firth",
    "fit_mle",
    "fitted_values",
    "get_link",
    "initial_params",
    "log_beta",
    "log_gamma",
    "log_likelihood",
    "log_pdf",
    "moments",
    "pdf",
    "run_study",
    "sample",
    "sample_bp",
    "score",
    "simulate_replicates",
    "summarize",
    "tetragamma",
    "trigamma",
    "__version__",
]
