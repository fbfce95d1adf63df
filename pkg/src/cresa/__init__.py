"""Cumulative residual entropy (CRE) based global sensitivity analysis."""
from .baselines import (
    BaselineIndices,
    SobolResult,
    delta_index,
    differential_entropy_uniform,
    given_data_baselines,
    shannon_mi,
    sobol_indices,
)
from .config import ExperimentConfig, load_config, loads_config
from .costs import CostResult, CostSpec, Framework, reduction_cost, relative_uncertainty, strategy_table
from .distributions import (
    GAUSSIAN_CRE,
    DistributionSpec,
    Family,
    analytic_cre,
    lognormal_from_mean_ef,
    sample,
    sample_matrix,
)
from .errors import (
    ConfigError,
    CREError,
    DegenerateOutputError,
    DistributionError,
    ModelDomainError,
    TooFewSamplesError,
    UnsupportedFamilyError,
)
from .estimators import GridParams, SampleMatrix, conditional_cre_1, conditional_cre_2, empirical_cre
from .experiment import SensitivityReport, convergence_study, run_experiment
from .importance import DecompositionResult, cr_mutual_information, decompose, kappa_pair, kappa_single
from .models import MODELS, BearingInputs, ModelFn, bearing_a_iso, get_model, ishigami, risk_top_event

__version__ = "0.1.0"
