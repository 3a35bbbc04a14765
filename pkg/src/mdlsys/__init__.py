"""Numerical toolkit for multidimensional Fornasini-Marchesini systems.

Word-indexed and lattice-indexed observability analysis of output pairs:
gramians and Stein equations, stability classification, Fock and ball model
spaces with their shifts, reproducing kernels, Gleason division operators,
shift dilations, and finite-dimensional Beurling-Lax factorization.
"""

from .words import (
    EMPTY_WORD,
    MultiIndex,
    Word,
    abelianize,
    arveson_weight,
    enumerate_words,
    fiber,
    left_quotient,
    multi_indices,
    multi_indices_up_to,
    multinomial_weight,
    multinomial_weight_float,
    transpose,
    unit_index,
    words_up_to,
)
from .linalg import (
    HermitianVerdict,
    SteinSolveReport,
    hermitian_factor,
    hermitian_part,
    psd_check,
    solve_sylvester_vectorized,
    spectral_norm,
)
from .systems import (
    LatticeTrajectory,
    NCTrajectory,
    OutputPair,
    SystemRealization,
    comm_transfer_eval,
    commutativity_defect,
    det_pencil_coeffs,
    is_commutative,
    lattice_simulate,
    nc_simulate,
    nc_transfer_coeff,
    project_trajectory,
    resolvent_row,
    tuple_power_multi,
    tuple_power_word,
)
from .stein import (
    AbelianPowerTable,
    CPMap,
    GramianReport,
    ObservabilityReport,
    QSteinReport,
    StabilityReport,
    ab_gramian,
    abelian_power_table,
    c_abelian_defect,
    cp_apply,
    fixed_point_iterates,
    nc_gramian,
    observability_analysis,
    output_power_rows,
    q_stein_analysis,
    reverse_stein_certificate,
    reverse_stein_residual,
    stein_solve,
    strong_stability,
)
from .spaces import (
    BallPoly,
    FockPoly,
    GleasonSolution,
    ab_obs_poly,
    arveson_backshift,
    constant_ball,
    constant_fock,
    coordinate_shift,
    eval_E,
    eval_G,
    gleason_check,
    gleason_from_pair,
    hankel_rationality_probe,
    left_backshift,
    left_shift,
    model_pair_from_fock_subspace,
    nc_obs_poly,
    obs_poly_of_model,
    right_backshift,
    right_shift,
    tau,
)
from .kernels import (
    KernelHandle,
    MatchReport,
    ab_kernel_eval,
    arveson_kernel,
    containment_isometry,
    kernel_gram,
    lifted_inner_product,
    nc_kernel_coeff,
    unitary_equivalence,
)
from .apps import (
    BeurlingLaxResult,
    DilationReport,
    MultiplierPoly,
    VonNeumannReport,
    beurling_lax,
    dilate,
    poisson_transform,
    row_defect,
    von_neumann_probe,
)
from .util import (
    CommutativityError,
    DimensionError,
    HypothesisError,
    IndefiniteError,
    NotHermitianError,
    ResourceLimitError,
    SingularResolventError,
)

__version__ = "0.1.0"
