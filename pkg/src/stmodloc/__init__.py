"""Stable module categories of abelian p-group algebras over F_p.

Resolution modules M(C, n) and N(P, n) over kG = kH (x) k[Z]/(Z^p), the
canonical exact sequence relating them, syzygies and stable homs, and
negative Tate cohomology with its products.
"""

from .algebra import CoproductKind, GroupAlgebra, PiPoint, Split, make_pi_point, make_split
from .modules import (
    KGModule,
    dual,
    free_rank,
    is_projective,
    is_stably_isomorphic,
    omega,
    omega_inverse,
    omega_n,
    stable_hom,
    tensor_product,
    trivial_module,
)
from .resolutions import (
    AugmentedResolution,
    ChainComplex,
    build_M,
    build_N,
    build_canonical_sequence,
    gamma,
    lift_chain_map,
    map_M,
    minimal_resolution,
    rank2_omega_iso,
    verify_exact,
)
from .tate import (
    EndoRingTable,
    SupportReport,
    TateClass,
    endo_ring_table,
    localization_ring_view,
    locality_decay_check,
    negative_product,
    support_report,
    tate_dim,
)

__all__ = [
    "AugmentedResolution", "ChainComplex", "CoproductKind", "EndoRingTable", "GroupAlgebra",
    "KGModule", "PiPoint", "Split", "SupportReport", "TateClass", "build_M", "build_N",
    "build_canonical_sequence", "dual", "endo_ring_table", "free_rank", "gamma",
    "is_projective", "is_stably_isomorphic", "lift_chain_map", "localization_ring_view",
    "locality_decay_check", "make_pi_point", "make_split", "map_M", "minimal_resolution",
    "negative_product", "omega", "omega_inverse", "omega_n", "rank2_omega_iso",
    "stable_hom", "support_report", "tate_dim", "tensor_product", "trivial_module",
    "verify_exact",
]
