"""Simulation and numerical analysis of the restriction-induction walk on
Young diagrams: exact small-n distributions, continuous-time trajectories
under several pausing laws, decay kernels, and the free-probability
machinery for the limit shapes."""

from .characters import (
    cumulants_from_moments,
    fit_sigma_polynomial,
    moments_from_cumulants,
    normalized_character,
    scaled_transition_cumulants,
    sigma,
    sigma_exact,
    sigma_from_cumulants,
    transition_cumulants_exact,
    transition_moments_exact,
)
from .diagrams import (
    AtomicMeasure,
    ContinuousDiagram,
    YoungDiagram,
    partitions,
    profile,
    read_partitions,
    rescaled_profile,
    sup_distance,
    transition_measure,
    write_partitions,
)
from .experiments import (
    EnsembleStats,
    ExperimentSpec,
    concentration_report,
    propagation_check,
    run_ensemble,
    theorem11_reproduction,
    theorem12_reproduction,
)
from .freeprob import (
    LimitShapeSpec,
    free_compress,
    free_convolve,
    jacobi_from_moments,
    markov_inverse,
    omega_t_cumulants,
    pde_residual,
    profile_moments,
    semicircle_cumulants,
    stieltjes_from_cumulants,
    theta_energy,
    vk_ls,
    vk_ls_profile,
)
from .kernels import (
    KernelQuery,
    f_value,
    factorization_defect_main_term,
    g_alpha,
    g_alpha_asymptote,
    kernel_table,
    prop_limits,
)
from .resind import (
    eigen_identity_residual,
    eigenvalue_for_cycle_type,
    full_matrix,
    plancherel_vector,
    res_ind_step,
    step_distribution,
)
from .sampling import (
    DeterministicUnit,
    Exponential,
    OneSidedStable,
    count_jumps,
    ctrw_evolve,
    f_monte_carlo,
    parse_law,
    plancherel_growth,
    rectangle_initializer,
    sample_pauses,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # diagrams
    "YoungDiagram",
    "AtomicMeasure",
    "ContinuousDiagram",
    "partitions",
    "profile",
    "rescaled_profile",
    "sup_distance",
    "transition_measure",
    "read_partitions",
    "write_partitions",
    # characters
    "normalized_character",
    "sigma",
    "sigma_exact",
    "sigma_from_cumulants",
    "fit_sigma_polynomial",
    "transition_moments_exact",
    "transition_cumulants_exact",
    "scaled_transition_cumulants",
    "moments_from_cumulants",
    "cumulants_from_moments",
    # chain
    "res_ind_step",
    "step_distribution",
    "full_matrix",
    "plancherel_vector",
    "eigenvalue_for_cycle_type",
    "eigen_identity_residual",
    # sampling
    "Exponential",
    "OneSidedStable",
    "DeterministicUnit",
    "parse_law",
    "sample_pauses",
    "count_jumps",
    "f_monte_carlo",
    "plancherel_growth",
    "rectangle_initializer",
    "ctrw_evolve",
    # free probability
    "semicircle_cumulants",
    "free_convolve",
    "free_compress",
    "omega_t_cumulants",
    "jacobi_from_moments",
    "stieltjes_from_cumulants",
    "markov_inverse",
    "profile_moments",
    "theta_energy",
    "pde_residual",
    "vk_ls",
    "vk_ls_profile",
    "LimitShapeSpec",
    # kernels
    "KernelQuery",
    "f_value",
    "g_alpha",
    "g_alpha_asymptote",
    "prop_limits",
    "factorization_defect_main_term",
    "kernel_table",
    # experiments
    "ExperimentSpec",
    "EnsembleStats",
    "run_ensemble",
    "propagation_check",
    "concentration_report",
    "theorem11_reproduction",
    "theorem12_reproduction",
]
