"""Cubic stable-degree transformation groups over finite rings.

Walks on a high-girth bipartite incidence system and on its double directed
flag graph induce polynomial bijections of K^n whose every power stays cubic.
The package exposes the underlying sparse polynomial algebra, the graph
machinery with exhaustive verification oracles, a symbolic Diffie-Hellman
exchange built on the walk groups, and a public-rule encryption scheme.
"""

from .errors import (
    CollisionMismatch,
    DegreeOverflow,
    DimensionMismatch,
    DimensionTooSmall,
    InsufficientRegularElements,
    MapParseError,
    ModulusTooSmall,
    NonPrimeModulus,
    NotAField,
    NotRegularColour,
    SingularMatrix,
    StabilityViolation,
    StableWalkError,
    TooLarge,
)
from .flags import (
    Flag,
    OrderProbe,
    StabilityReport,
    ZWalk,
    apply_z,
    dd_cycle_oracle,
    flag_step,
    flag_walk_symbolic,
    order_probe,
    sample_zwalk,
    stable_power_check,
    zwalk_apply,
    zwalk_symbolic,
)
from .graph import (
    ComponentReport,
    GraphFacts,
    Vertex,
    Walk,
    apply_n,
    apply_x,
    component_oracle,
    girth_and_regularity_oracle,
    graph_facts,
    incidence_check,
    invariant_vector,
    parametrize_component_vertex,
    sample_walk,
    solve_line_through_point,
    solve_point_on_line,
    walk_apply,
    walk_symbolic,
)
from .keyex import (
    PrivateRule,
    PrivateSeed,
    PublicRule,
    Transcript,
    alice_power,
    bob_power,
    decrypt,
    encrypt,
    make_base,
    make_private_seed,
    make_public_rule,
    run_exchange,
)
from .multipoly import (
    AffineMap,
    DensityStats,
    Poly,
    PolyMap,
    monomial_density,
)
from .ring import RingSpec, make_ring, parse_ring

__version__ = "0.1.0"
