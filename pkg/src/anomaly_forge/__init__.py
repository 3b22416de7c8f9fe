"""anomaly-forge: exact computation of even-lattice anomaly 3-cocycles,
their cocycle/cup-product/Bockstein identities, discriminant-group
restrictions with full H^3 classification, and the constructive
decomposition of symmetric even matrices into positive even Gram
matrices."""

from .exact_core import (
    BudgetExceededError,
    DegenerateLatticeError,
    EvennessError,
    IntMatrix,
    LiftConsistencyError,
    NotACocycleError,
    Phase,
    PreconditionError,
    is_positive_definite,
    phase_combine,
    smith_normal_form,
)
from .lattice import (
    BilinearTwoCocycle,
    DiscriminantGroup,
    EvenLattice,
    decompose_even_symmetric,
    discriminant_group,
    dual_basis,
    two_cocycle,
    verify_two_cocycle,
)
from .torus_cocycle import (
    IntCochain,
    PhaseCochain,
    SectionMap,
    Sign,
    TorusPoint,
    b_generator,
    bockstein_certificate,
    bockstein_lift,
    boundary,
    braiding_phase,
    carry_cochain,
    cup_bb,
    gram_pairing_cochain,
    jones_assemble,
    jones_cochain,
    omega_closed_form,
    omega_one_dim,
    section,
)
from .finite_cohomology import (
    CohomologyClass,
    FiniteAbelianGroup,
    FiniteCochain,
    H3Presentation,
    classify,
    fs_indicator,
    h_three,
    pentagon_check,
    restrict_to_discriminant,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
