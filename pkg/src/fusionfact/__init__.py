"""Fusion rings, Frobenius-Perron data, and exact factorizations."""

from .cohomology import (
    Cochain,
    brute_classes,
    coboundary,
    cochain_from_values,
    cyclic_3cocycle,
    is_cocycle,
    restrict,
    trivialize,
    zero_cochain,
)
from .constructions import coset_module, gt_simples, pointed_classify, rep_ring, vec_ring
from .corpus import builtin_ring
from .factorization import (
    FusionSubring,
    check_dim_identity,
    deligne_product,
    deligne_shadow_check,
    enumerate_exact_factorizations,
    enumerate_subrings,
    is_exact_factorization,
    product_support,
    subring_generated,
)
from .fusion import (
    FPData,
    FusionModule,
    FusionRing,
    fp_data,
    fusion_matrix,
    regular_element,
    validate_module,
    validate_ring,
)
from .groups import (
    FiniteGroup,
    Subgroup,
    builtin_group,
    conjugacy_classes,
    double_cosets,
    enumerate_subgroups,
    exact_factorizations,
    group_from_permutations,
    group_from_table,
)

__version__ = "0.1.0"
