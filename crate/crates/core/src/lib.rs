//! Rotating-frame kinematics and the numerical checks built on them.
//!
//! * [`rotation`]: axis rotations, products and sums, derivatives, property checks.
//! * [`parse`]: the textual rotation-expression language.
//! * [`metric`]: instantaneous and time-averaged intervals, ω-invariance.
//! * [`stable`]: zero sets of the averaged `dt²` coefficient and their meshes.
//! * [`wave`]: boosted wave objects and finite-difference residuals.
//! * [`bessel`] and [`quantify`]: exterior Helmholtz solutions and size spectra.

pub mod bessel;
pub mod error;
pub mod metric;
pub mod parse;
pub mod quadrature;
pub mod quantify;
pub mod rotation;
pub mod stable;
pub mod wave;

pub use bessel::{spherical_bessel, BesselKind};
pub use error::{Error, Result};
pub use metric::{
    interval_general, interval_msr, metric_determinant, omega_invariance_check, ssr_avg_closed, time_average_metric,
    AveragedMetric, AveragingControl, IntervalForm, MetricCoefficients, SpacetimeEvent,
};
pub use nalgebra::{Matrix3, Matrix4, Vector3};
pub use parse::parse_expr;
pub use quantify::{
    boundary_condition_check, exterior_solution_residual, external_cancellation_scan, quantified_sizes,
    two_source_field, ModeSpec, Parity, Profile, Signs, SizeSpectrum, SourcePair1D,
};
pub use rotation::{
    eval_asr, eval_expr, eval_expr_derivative, property_report, transform_point, AsrSpec, Axis, PropertyReport,
    RotationExpr, Sense,
};
pub use stable::{
    asr_radius, locate_gtt_zero, mesh_surface, msr_radius, surface_samples, GttSource, StableSurface, SurfaceKind,
    SurfaceMesh,
};
pub use wave::{
    build_boosted_wave, klein_gordon_residual, potential_decomposition, schrodinger_residual, BoostParams, BoostedWave,
    GridSpec, SpatialProfile,
};
