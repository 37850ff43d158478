"""Bootstrap-assisted tests for long memory in time-varying coefficient regression."""

from .bootstrap import (
    TestConfig,
    TestReport,
    boot_covariate,
    boot_trend,
    p_value,
    rejects,
    run_test,
)
from .errors import (
    ConfigError,
    DataError,
    DomainError,
    LrdTestError,
    SingularDesignError,
)
from .kernels import eval_K, eval_Kstar_b, kappa2, kstar
from .locreg import CoefficientPath, jackknife_fit, local_linear_fit, smoother_trace
from .lrcov import (
    LrvEstimates,
    breve_beta,
    estimate_lrv,
    m_hat,
    psd_sqrt,
    sigmaH_diff,
    sigma_acute,
    sigma_hat,
)
from .montecarlo import MonteCarloReport, power_experiment, size_experiment
from .simulate import (
    RegressionSample,
    SimulationSpec,
    coefficient_functions,
    fractional_integrate,
    psi_weights,
    simulate_model,
)
from .stats import compute_statistics, kpss_stat, ks_stat, rs_stat, vs_stat
from .tuning import BandwidthSet, eta_select, gcv_select_b, mv_select, select_bandwidths

__version__ = "0.1.0"
