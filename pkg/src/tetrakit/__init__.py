"""Exact verification toolkit for tetrahedral-equation solutions and their commuting families."""
from .chain1d import (
    LaxOperator,
    RChain,
    build_Ik,
    build_Q,
    check_conjugator,
    check_lemma3,
    check_lemma4,
    check_rll,
    check_ybe_braid,
    check_ybe_matrix,
    from_braid,
    lax_from_r,
    lax_from_word,
    sl2_r_matrix,
    to_braid,
)
from .cocycle import Cocycle3, CocycleError, check_cocycle, lift_to_matrix, trivial_cocycle
from .lattice3d import LatticeSpec, partition_bruteforce, partition_via_transfer, transfer_matrix
from .layer2d import (
    FamilySpec,
    LayerShape,
    Side,
    TwistKind,
    build_family,
    build_layer,
    check_genericity,
    check_lemma5,
    check_proof_lemmas,
    check_te,
    check_theorem,
    check_twisted_identities,
    derive_L,
    derive_R,
    twist,
)
from .report import VerificationReport
from .scalars import QQ, ComplexFloat, ModRing, NonUnit, PrimeField, Rational, RingDescriptor, RingElement
from .settheoretic import (
    ReductionSpec,
    SetSolution3,
    build_reduction,
    check_fte_electric,
    check_stte,
    electric_map,
)
from .tensorspace import (
    BudgetExceeded,
    NotInvertible,
    ShapeMismatch,
    SpaceShape,
    TensorOperator,
    commutator,
    embed,
    identity,
    ordered_product,
    partial_trace,
    transposition,
)

__version__ = "0.1.0"
