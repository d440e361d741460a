//! Output-injection observers on the truncated modal system: stable/unstable splitting,
//! detectability and gain design, exact coupled simulation, estimator combination and decay fits.

mod decay;
mod design;
mod estimator;
mod simulate;
mod system;

pub use decay::{fit_decay, DecayFit, CONVERGED_FLOOR, MIN_TAIL_SAMPLES};
pub use design::{design_gain, detectability_check, DetectabilityReport, GainMap, Target, SPECTRUM_SLACK};
pub use estimator::{estimator_output, EstimatorCombiner, COMBINER_TOL};
pub use simulate::{integrate_observer_rk4, output_times, simulate_coupled, ClosedLoop, TrajectoryRecord};
pub use system::{actuator_input_map, split_unstable, Actuation, ModeSplit, Signal, SystemSpec};
