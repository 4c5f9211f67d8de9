"""Statistical tests, Palm/shock helpers and the named experiments."""
from .experiments import EXPERIMENTS, resolve_params, run_experiment
from .palm import ShockState, find_string, is_regeneration_string, palm_recenter, shock_construct
from .report import ExperimentReport, Verdict
from .stats import (
    TestResult,
    correlation_z,
    exponential_ks,
    gof_exponential_gaps,
    poisson_counts_chi2,
    two_sample,
    two_sample_test,
)
