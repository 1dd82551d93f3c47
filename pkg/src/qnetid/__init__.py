"""qnetid: coupling-matrix reconstruction for closed quantum dynamical networks.

The package identifies the interaction structure (hence the topology) of
an autonomous quantum network from sampled density-operator
trajectories: the time integral P of the trajectory and the endpoint
difference Q = i*hbar*(rho_tau - rho_0) pin the coupling matrix M down
to the commutator equation [M, P] = Q, which is solved as a constrained
linear system with an explicit uniqueness certificate.  A second route
recovers the vectorized generator from diagonal-only measurements via
an observability argument.  A benchmark harness sweeps random
quantum-walk networks and renders solvability and error curves.
"""

__version__ = "0.1.0"

from .linalg import (
    SvdResult,
    eig_hermitian,
    hermitize,
    kron,
    load_matrix,
    save_matrix,
    spectral_norm,
    svd_rank_pinv,
    unvec,
    vec,
)
from .dynamics import (
    Trajectory,
    check_density,
    exact_gram,
    liouvillian,
    propagate,
    read_trajectory_csv,
    sample_trajectory,
    unitary_conjugate,
    write_trajectory_csv,
)
from .netmodel import (
    ManyBodySpec,
    SeededRng,
    assemble_hamiltonian,
    basis_density,
    derive_seed,
    erdos_renyi,
    is_connected,
)
from .identify import (
    AdmissibleEmbedding,
    IdentificationReport,
    admissible_embedding,
    build_P_trapezoid,
    build_Q,
    commutant_dimension,
    commutator,
    identify_topology,
    relative_error,
    solve_commutator,
)
from .partialinfo import (
    DerivativeStacks,
    UnobservableError,
    diagonal_selector,
    estimate_derivative_stacks,
    exact_derivative_stacks,
    extract_hamiltonian,
    identity_initial_batch,
    observability_rank,
    physical_decomposition,
    physical_initial_batch,
    reconstruct_liouvillian,
    sample_output_stacks,
)
from .sweep import (
    CellRecord,
    ConfigError,
    SweepConfig,
    SweepResult,
    read_sweep_csv,
    run_benchmark_trial,
    run_error_sweep,
    run_solvability_sweep,
    run_sweep,
    write_sweep_csv,
)
from .svgplot import emit_plot

__all__ = [
    "AdmissibleEmbedding",
    "CellRecord",
    "ConfigError",
    "DerivativeStacks",
    "IdentificationReport",
    "ManyBodySpec",
    "SeededRng",
    "SvdResult",
    "SweepConfig",
    "SweepResult",
    "Trajectory",
    "UnobservableError",
    "admissible_embedding",
    "assemble_hamiltonian",
    "basis_density",
    "build_P_trapezoid",
    "build_Q",
    "check_density",
    "commutant_dimension",
    "commutator",
    "derive_seed",
    "diagonal_selector",
    "eig_hermitian",
    "emit_plot",
    "erdos_renyi",
    "estimate_derivative_stacks",
    "exact_derivative_stacks",
    "exact_gram",
    "extract_hamiltonian",
    "hermitize",
    "identify_topology",
    "identity_initial_batch",
    "is_connected",
    "kron",
    "liouvillian",
    "load_matrix",
    "observability_rank",
    "physical_decomposition",
    "physical_initial_batch",
    "propagate",
    "read_sweep_csv",
    "read_trajectory_csv",
    "reconstruct_liouvillian",
    "relative_error",
    "run_benchmark_trial",
    "run_error_sweep",
    "run_solvability_sweep",
    "run_sweep",
    "sample_output_stacks",
    "sample_trajectory",
    "save_matrix",
    "solve_commutator",
    "spectral_norm",
    "svd_rank_pinv",
    "unitary_conjugate",
    "unvec",
    "vec",
    "write_sweep_csv",
    "write_trajectory_csv",
]
