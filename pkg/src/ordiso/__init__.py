"""Isomorphism testing for lattices over orders in semisimple Q-algebras.

Decides whether two lattices over a Z-order (group rings Z[G] being the main
case) are isomorphic, producing an independently verifiable certificate or a
structured refusal.  Exact rational arithmetic throughout.
"""

from .algebra import (
    ComponentKind,
    SCAlgebra,
    SplittingData,
    WedderburnDecomp,
    central_idempotents,
    group_algebra,
    regular_embedding,
    split_component,
    wedderburn,
)
from .errors import (
    BadEpsilon,
    CompositeModulus,
    DimensionMismatch,
    InvalidGroupTable,
    NonFullRank,
    NotAnIso,
    NotPrincipalPair,
    NotSublattice,
    NotSuborder,
    OrdisoError,
    QuotientTooLarge,
    RankMismatch,
    SplitFailure,
    UnequalSpan,
    UnsupportedComponent,
)
from .genus import genus_enumerate
from .groups import NAMED_GROUPS, GroupData
from .homspaces import HomLat, end_ring_as_order, hom_A, hom_Lambda
from .linalg import (
    FracIdl,
    MatQ,
    ModPkMat,
    PseudoLattice,
    SnfResult,
    intersect,
    kernel_mod,
    module_index,
    pseudo_hnf,
    saturate,
    snf,
)
from .localiso import (
    LocalVerdict,
    jacobson_radical_fp,
    local_free_basis,
    local_iso_global_hom,
    local_iso_monte_carlo,
    local_iso_reduced,
    local_iso_via_freeness,
)
from .mainiso import (
    IsoCertificate,
    UnitRepSet,
    Verdict,
    choose_two_sided_ideal,
    final_search,
    is_isomorphic,
    unit_generators,
    unit_image_reps,
    verify_certificate,
)
from .maxiso import (
    DeltaIdeal,
    SkewField,
    SteinitzData,
    iso_over_max_component,
    morita_lift,
    morita_reduce,
    normalize_max_order,
    principal_ideal_solve,
    steinitz_form,
)
from .orders import (
    BadPrimes,
    LatticeMod,
    ModuleSpace,
    OrderZ,
    central_conductor,
    conductor,
    component_lattice,
    extend_lattice,
    k0_exponent,
    left_order,
    maximal_order,
    radical_mod_p,
    right_order,
)
from .selfcheck import run_selfcheck

__version__ = "0.1.0"
