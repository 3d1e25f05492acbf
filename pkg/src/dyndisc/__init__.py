"""Error-probability bounds for dynamic multi-channel discrimination of
bosonic Gaussian channels, with a brute-force Gaussian-fidelity oracle."""

from .bounds import (
    BoundReport,
    ErrorPolynomial,
    advantage,
    bcpf_bounds,
    build_error_polynomial,
    classical_cpf_lower,
    copies_threshold,
    counting_exponents,
    evaluate_bounds,
    fixed_uniform_bound,
    klnn_cpf_bound,
    ucpf_bounds,
    ucpf_total_error,
    unique_fidelity_kmax,
)
from .channels import (
    AdditiveNoise,
    PureLoss,
    UniqueFidelitySet2,
    classical_fidelity,
    subfidelity,
    unique_set,
)
from .errors import (
    ClosedFormInvalid,
    DynDiscError,
    InvalidArgument,
    NoThreshold,
    ResourceLimit,
    UnsupportedDomain,
)
from .gaussian import (
    CovarianceMatrix,
    GpiChannelParams,
    ProbeEnergy,
    apply_gpi_pattern,
    cvghz_cm,
    direct_sum,
    gaussian_fidelity,
    tmsv_cm,
    williamson,
)
from .oracle import (
    OracleReport,
    brute_total_error,
    validate_closed_forms,
    verify_degeneracy,
)
from .patterns import (
    BCPF,
    UCPF,
    ChannelPattern,
    ExplicitSpace,
    ModifiedPattern,
    ProbeDomainDistribution,
    ResourceBudget,
    UniformAll,
    average_channel_use,
    dynamic_to_fixed,
    enumerate_space,
    fair_copies,
    hamming_distance,
    is_valid_k,
    klnn_distribution,
    target_count,
)

__version__ = "0.1.0"
