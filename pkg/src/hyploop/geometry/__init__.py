"""Surfaces, metrics, discs, disc unions and coverings."""
from .admissible import AdmissibilityReport, check_P1_P2, largest_admissible, loop_samples, pieces_in_disc
from .core import (
    CHART,
    SPHERE,
    TOL,
    Disc,
    Domain,
    Stereographic,
    annulus,
    bdp_constant,
    bdp_formula,
    curvature_mu,
    disc_area,
    disc_boundary_length,
    distance,
    injectivity_radius,
    kind_of,
    pair_of_pants,
    sphere_point,
    to_chart,
)
from .cover import cover_by_disjoint_discs, verify_cover
from .discs import (
    Arc,
    ArcChain,
    Component,
    intersecting_pairs,
    tangency_check,
    union_boundary_chains,
    union_components,
    union_outer_boundary,
)
from .loops import PolyLoop, loop_boundary_gaps, loop_clearance, point_segment_distance, segment_disc_interval
