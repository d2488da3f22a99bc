"""Numerical audits of quaternion-structured pseudo-Hermitian charts.

The package evaluates coordinate charts carrying a pseudo-Riemannian metric
and a triple of anticommuting almost complex structures, all given by
closed-form component expressions.  Every derived quantity (connection,
structural tensors, curvature, conformal transforms) is computed twice over:
once through exact second-order jets of the component fields and once through
the identity being audited, and the two sides are compared at sampled points.
"""

from .classification import (
    FLAG_ORDER,
    ClassReport,
    DefectSet,
    ReportConsistencyError,
    classify_point_set,
    p_defects,
)
from .conformal import (
    BUILTIN_GAUGES,
    GaugeField,
    STensor,
    conformal_transform,
    invariance_audit,
    kahler_gauge_audit,
    make_gauge,
    s_tensor,
)
from .curvature import (
    ConnectionData,
    CurvatureBundle,
    DegeneratePlaneError,
    StructuralSet,
    christoffel,
    connection_residuals,
    curvature_bundle,
    curvature_identity_residuals,
    curvature_like,
    pi1_components,
    pi3_components,
    psi1_components,
    sectional_curvature,
    structural_identity_residuals,
    structural_tensors,
)
from .fields import (
    FieldExpr,
    ParseError,
    evaluate_scalar_field,
    evaluate_scalar_value,
    format_scalar_field,
    parse_scalar_field,
)
from .jets import BINARY_PRIMITIVES, UNARY_PRIMITIVES, DomainError, ScalarJet, evaluate_primitive, seed_coordinates
from .manifolds import (
    BUILTIN_MODEL_IDS,
    DomainConstraint,
    DomainViolation,
    ManifoldSpec,
    PointEval,
    builtin_model,
    evaluate_point,
    parse_constraint,
    sample_domain,
)
from .reports import AuditReport, CheckRow, emit_json, emit_text
from .structure import (
    CLASS_NAMES,
    AssociatedForms,
    FormClassLabel,
    associated_forms,
    classify_bilinear_form,
    compatibility_residuals,
    quaternionic_residuals,
)
from .tensors import (
    DegenerateMetricError,
    DenseTensor,
    MetricPair,
    contract_with_metric,
    cyclic_sum,
    invert_metric,
    rel_residual,
    sup_norm,
)
from .cli import ManifestError, load_manifest, run_audit

__version__ = "0.1.0"

__all__ = [
    "AssociatedForms",
    "AuditReport",
    "BINARY_PRIMITIVES",
    "BUILTIN_GAUGES",
    "BUILTIN_MODEL_IDS",
    "CLASS_NAMES",
    "CheckRow",
    "ClassReport",
    "ConnectionData",
    "CurvatureBundle",
    "DefectSet",
    "DegenerateMetricError",
    "DegeneratePlaneError",
    "DenseTensor",
    "DomainConstraint",
    "DomainError",
    "DomainViolation",
    "FLAG_ORDER",
    "FieldExpr",
    "FormClassLabel",
    "GaugeField",
    "ManifestError",
    "ManifoldSpec",
    "MetricPair",
    "ParseError",
    "PointEval",
    "ReportConsistencyError",
    "STensor",
    "ScalarJet",
    "StructuralSet",
    "UNARY_PRIMITIVES",
    "associated_forms",
    "builtin_model",
    "christoffel",
    "classify_bilinear_form",
    "classify_point_set",
    "compatibility_residuals",
    "conformal_transform",
    "connection_residuals",
    "contract_with_metric",
    "curvature_bundle",
    "curvature_identity_residuals",
    "curvature_like",
    "cyclic_sum",
    "emit_json",
    "emit_text",
    "evaluate_point",
    "evaluate_primitive",
    "evaluate_scalar_field",
    "evaluate_scalar_value",
    "format_scalar_field",
    "invariance_audit",
    "invert_metric",
    "kahler_gauge_audit",
    "load_manifest",
    "make_gauge",
    "p_defects",
    "parse_constraint",
    "parse_scalar_field",
    "pi1_components",
    "pi3_components",
    "psi1_components",
    "quaternionic_residuals",
    "rel_residual",
    "run_audit",
    "s_tensor",
    "sample_domain",
    "sectional_curvature",
    "seed_coordinates",
    "structural_identity_residuals",
    "structural_tensors",
    "sup_norm",
    "__version__",
]
