"""Exact computations on translation surfaces, their products and illumination."""

from .scalar import Mat2, Scalar, parse_scalar, simplify
from .surface import (
    PolygonSurface,
    RectSurface,
    SurfaceError,
    arithmeticity_detect,
    build_l_shaped,
    build_origami,
    build_rect_surface,
    build_staircase,
    builtin_surface,
    format_surface,
    parse_surface,
)
from .flow import TraceBudgetExceeded, saddle_connections_up_to, trace_ray, trace_segment, visible_targets
from .cylinders import cylinder_decomposition, horizontal_cylinders, rectangle_decomposition, vertical_cylinders
from .affine import AffineMap, dehn_twist, find_affine_maps, fixed_points, in_gamma2, involution, is_in_veech_group
from .product import LeafSurface, Slope, build_leaf, cone_order_product, local_leaf_classes
from .torus import jacobsthal, kronecker_hit, torus_orbit_classify
from .illumination import illuminates, offdiagonal_blocked_pairs, twist_reduce, vh_path

__version__ = "0.1.0"
