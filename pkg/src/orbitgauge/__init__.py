"""Gauge fixing, orbit distances and orbit-space geometry for SU(2) lattice gauge fields."""
from .gaugefix import (
    FixedConfiguration,
    fix_last_edge,
    maximal_tree,
    reconstruct_orbit_representative,
)
from .geometry import (
    ChartPoint,
    ChartSingularityError,
    MetricPair,
    StabilizerDegeneracyError,
    VectorFieldMatrix,
    Vielbein,
    chart_field,
    chart_point,
    consistency_check,
    constraint_direction,
    electric_fields_one_edge,
    gauss_substitution,
    geodesic_path,
    inverse_metric,
    laplacian_direct,
    lb_apply,
    projection_metric,
    vielbein_at,
)
from .group import (
    EulerAngles,
    adjoint,
    euler_compose,
    euler_decompose,
    exp_su2,
    haar_sample,
    quat_inv,
    quat_mul,
)
from .lattice import (
    EdgeId,
    FieldFormatError,
    GaugeField,
    GaugeTransform,
    Lattice,
    apply_gauge,
    field_io_read,
    field_io_write,
    plaquette_trace,
    wilson_terms,
)
from .metric import (
    DistanceResult,
    distance_I,
    metric_axiom_suite,
    orbit_distance,
    st_action_correspondence,
)

__version__ = "0.1.0"

__all__ = [
    "ChartPoint",
    "ChartSingularityError",
    "DistanceResult",
    "EdgeId",
    "EulerAngles",
    "FieldFormatError",
    "FixedConfiguration",
    "GaugeField",
    "GaugeTransform",
    "Lattice",
    "MetricPair",
    "StabilizerDegeneracyError",
    "VectorFieldMatrix",
    "Vielbein",
    "adjoint",
    "apply_gauge",
    "chart_field",
    "chart_point",
    "consistency_check",
    "constraint_direction",
    "distance_I",
    "electric_fields_one_edge",
    "euler_compose",
    "euler_decompose",
    "exp_su2",
    "field_io_read",
    "field_io_write",
    "fix_last_edge",
    "gauss_substitution",
    "geodesic_path",
    "haar_sample",
    "inverse_metric",
    "laplacian_direct",
    "lb_apply",
    "maximal_tree",
    "metric_axiom_suite",
    "orbit_distance",
    "plaquette_trace",
    "projection_metric",
    "quat_inv",
    "quat_mul",
    "reconstruct_orbit_representative",
    "st_action_correspondence",
    "vielbein_at",
    "wilson_terms",
]
