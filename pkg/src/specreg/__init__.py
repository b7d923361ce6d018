"""Regularity analysis and low-rank approximation of multivariate stationary series
from their spectral density matrices."""

__version__ = "0.1.0"

from .corpus import EXAMPLES, analytic, example
from .eigenfield import (EigenField, FourierSeries, align_gauge, compose_spectral_factor, decompose,
                         fourier_of_field, one_sidedness, scalar_outer_factor)
from .errors import *  # noqa: F401,F403
from .hermitian import eig_hermitian, eig_hermitian_batch, frobenius_norm, spectral_norm
from .lowrank import (ApproximationCertificate, FilterBank, approx_covariance, approx_density,
                      build_filter_bank, certificate, projection_mse, projector)
from .regularity import (RegularityReport, classify, kolmogorov_szego_lambda, log_det_lambda_integral,
                         select_full_rank_subprocess)
from .spectral import (Atom, CovarianceSequence, FrequencyGrid, SpectralMeasure, covariance_from_measure,
                       fourier_coefficients, measure_from_covariance, synthesize, trapezoid_integral)
from .timedomain import (PredictionResult, SamplePath, apply_filter, levinson_prediction, monte_carlo_mse,
                         sample_covariance, simulate, sliding_sum)
