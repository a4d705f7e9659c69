"""Fast integration of exact-sequence Gram matrices on hexahedral elements.

Library plus benchmark CLI: conventional, sum-factorized and map-simplified
Gram backends for H1, H(curl), H(div) and L2, and the element-level DPG
systems built on them.
"""

from .errors import (
    DegenerateMapError,
    DomainError,
    InvalidOrderError,
    NonSPDError,
    SimplificationNotApplicableError,
)
from .geometry import (
    ElementMap,
    JacobianData,
    classify,
    diagonal_affine_map,
    eval_geometry,
    extrusion_map,
    general_affine_map,
    identity_map,
    map_position,
    preset_map,
    read_map_config,
    trilinear_map,
)
from .gram import (
    BACKENDS,
    GramResult,
    OpCounters,
    gram,
    gram_block,
    gram_conventional,
    gram_simplified,
    gram_tensorized,
)
from .dpg import (
    DpgElementSystem,
    UltraweakAcousticsProblem,
    acoustics_ultraweak_element,
    adjoint_graph_gram,
    condense,
    maxwell_gram,
    poisson_primal_element,
    solve_with_dirichlet,
)
from .poly1d import FTable, f_entry, ftable, legendre_all, shape1_h1, shape1_l2
from .quadrature import Rule1D, Rule3D, default_rule_order, gauss_rule, tensor_rule
from .spaces import SpaceSignature, dim, flat_to_multi, multi_to_flat, shape3_eval

__version__ = "0.1.0"
