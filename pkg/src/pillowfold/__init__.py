"""Curved-folding pillow boxes: construction, development, deformation,
and numerical certification, all driven by a half-depth b and a height
profile zeta on [0, L]."""

from .curves import Circle, Helix, Line, ProfileCrease
from .deformation import (DeformationSchedule, DeformedQuarter,
                          assemble_deformed, deformed_quarter,
                          horizontal_end_depth, pattern_scaling_family,
                          sweep_trace, validate_schedule)
from .development import (PlanarDevelopment, developing_map,
                          double_rectangle_mesh, pattern_graph,
                          validate_pattern_conditions)
from .errors import PillowFoldError
from .folding import (DevelopableStrip, FrenetData, OrigamiMapRecord,
                      beta_from_alpha, dual_strip, first_fundamental_form,
                      frenet_frame, strip_geometry)
from .mesh import (TriMesh, export_obj, export_svg, export_trace, load_obj,
                   sample_and_triangulate)
from .pillowbox import (QuarterParametrization, assemble_box, crease_curve,
                        quarter_parametrization)
from .profiles import (FundamentalData, ProfileFunction,
                       graph_to_arclength_profile, validate_fundamental_data)
from .verify import (CheckReport, PlanarityReport, TopologyReport,
                     check_crease_planarity, check_flatness, check_isometry,
                     count_self_intersections, enclosed_volume,
                     topology_report)

__version__ = "0.1.0"

__all__ = [
    "Circle", "Helix", "Line", "ProfileCrease",
    "DeformationSchedule", "DeformedQuarter", "assemble_deformed",
    "deformed_quarter", "horizontal_end_depth", "pattern_scaling_family",
    "sweep_trace", "validate_schedule",
    "PlanarDevelopment", "developing_map", "double_rectangle_mesh",
    "pattern_graph", "validate_pattern_conditions",
    "PillowFoldError",
    "DevelopableStrip", "FrenetData", "OrigamiMapRecord", "beta_from_alpha",
    "dual_strip", "first_fundamental_form", "frenet_frame", "strip_geometry",
    "TriMesh", "export_obj", "export_svg", "export_trace", "load_obj",
    "sample_and_triangulate",
    "QuarterParametrization", "assemble_box", "crease_curve",
    "quarter_parametrization",
    "FundamentalData", "ProfileFunction", "graph_to_arclength_profile",
    "validate_fundamental_data",
    "CheckReport", "PlanarityReport", "TopologyReport",
    "check_crease_planarity", "check_flatness", "check_isometry",
    "count_self_intersections", "enclosed_volume", "topology_report",
]
