"""Exact-arithmetic toolkit for Mukai lattices, theta-bundle section counts
and strange-duality bookkeeping on K3-type surfaces."""

from .surfaces import (
    ModelMismatchError,
    MukaiVector,
    NSClass,
    SurfaceModel,
    chi_rr,
    chi_vec,
    elliptic_general,
    elliptic_k3,
    euler_form,
    euler_pair_hom,
    generic_k3,
    h0_surface,
    ideal_sheaf_vector,
    line_bundle_vector,
    moduli_dim,
    mukai_dual,
    mukai_pair,
    mukai_tensor,
    normalized_vector,
    ns_pair,
    point_vector,
    structure_vector,
    twist,
)
from .hilbert import (
    HilbPicClass,
    ProductClass,
    binom,
    exclusion_report,
    is_tau_pullback,
    named_class,
    solve_gamma_constraints,
    sym_class,
    taut_class,
    taut_det_sections,
    taut_sym_sections,
    tau_pullback,
)
from .fourier_mukai import (
    FiberClass,
    FMMatrix,
    derive_bridge_matrix,
    derive_fm_matrix,
    fiber_fm,
    fm_apply,
    fm_c1_grr,
    verify_fm_suite,
)
from .duality import (
    DivisibilityError,
    DualityInstance,
    NuBoundError,
    compute_nu,
    deformation_setup,
    delta_bound,
    dimension_match,
    duality_line_bundle,
    duality_line_bundle_class,
    hypotheses_report,
    ogrady_tower,
    theta_relation_identity,
    tower_instance,
)
from .strata import (
    CodimAudit,
    Stratum,
    Wall,
    chain_audit,
    codim_audit,
    hodge_check,
    is_suitable,
    stack_dim,
    strata_enumerate,
    wall_enumerate,
)

__version__ = "0.1.0"
