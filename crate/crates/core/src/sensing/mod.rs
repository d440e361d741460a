//! Sensor models, the output matrix, eigenvalue grouping, the strategic rank test and the
//! closed-form placement criteria.

mod criteria;
mod groups;
mod rank;
mod sensor;

pub use criteria::{proposition_check, PlacementPattern, PlacementPrediction, INTEGER_TOL, SYMMETRY_TOL};
pub use groups::{all_groups, group_eigenvalues, EigenvalueGroup, DEFAULT_GROUP_TOL};
pub use rank::{strategic_rank_test, GroupRank, StrategicReport, DEFAULT_RANK_TOL};
pub use sensor::{assemble_output_map, Measurement, OutputMap, SensorSpec};
