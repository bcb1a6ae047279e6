"""Coherence-vector dynamics of driven N-level systems in the su(N) picture."""

from .coherence_map import (
    TorqueVector,
    coherence_to_rho,
    eom_matrix_al,
    eom_matrix_he,
    hamiltonian_to_torque,
    rho_to_coherence,
    rwa_hamiltonian,
    torque_to_hamiltonian,
    verify_al_he_link,
)
from .constants_of_motion import (
    BlockDecomposition,
    FrameTransform,
    audit_conserved_norms,
    build_f_frame,
    closed_form_f_solution,
    detect_blocks,
    transform_eom,
)
from .dynamics import (
    PulseProfile,
    TimeGrid,
    Trajectory,
    check_commuting_family,
    magnus_propagate,
    propagate_coherence_rk4,
    propagate_liouville,
)
from .exceptions import NonCommutingError, NumericalAbort, SingularityError
from .su_n_algebra import (
    GeneratorSet,
    StructureTensor,
    adjoint_real_forms,
    adjoint_rep,
    build_generators,
    structure_constants,
)
from .wei_norman import (
    adjoint_rotation_generators,
    bch_conjugate,
    integrate_wn,
    reconstruct_m,
    wn_propagate,
    wn_rhs,
)

__version__ = "0.1.0"
