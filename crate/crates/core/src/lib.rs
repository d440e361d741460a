//! Regional boundary gradient observers for diffusion on rectangles.
//!
//! The crate works in a truncated Laplacian eigenbasis on `]0, a1[ x ]0, a2[`:
//!
//! - [`basis`]: the H¹-orthonormal modal basis, modal fields and exact semigroup propagation.
//! - [`trace`]: boundary regions, gradient traces, restriction/extension and the adjoint gradient.
//! - [`sensing`]: sensor models, the output matrix, eigenvalue grouping, the strategic rank test
//!   and closed-form placement criteria.
//! - [`observer`]: stable/unstable splitting, output-injection gain design, coupled simulation,
//!   estimator combination and decay fitting.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod domain;
pub mod error;
pub mod observer;
pub mod profile;
pub mod quadrature;
pub mod sensing;
pub mod trace;

pub use nalgebra;

pub use basis::{ModalBasis, ModalField, DEFAULT_TRUNCATION};
pub use domain::{eigenvalue, BcFamily, Mode, RectDomain};
pub use error::{Error, Result};
pub use observer::{
    design_gain, detectability_check, fit_decay, simulate_coupled, split_unstable, DecayFit, EstimatorCombiner,
    GainMap, Signal, SystemSpec, Target, TrajectoryRecord,
};
pub use profile::{Profile, TrigFactor};
pub use quadrature::QuadratureRule;
pub use sensing::{
    assemble_output_map, group_eigenvalues, proposition_check, strategic_rank_test, EigenvalueGroup, Measurement,
    OutputMap, PlacementPrediction, SensorSpec, StrategicReport,
};
pub use trace::{
    boundary_gradient_trace, extend_by_zero, gradient_adjoint, trace_norm, BoundaryRegion, BoundarySegment,
    BoundaryTraceField, Side, TraceOperator,
};
