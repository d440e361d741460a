use std::fmt::Write as _;

use nalgebra::DMatrix;

use super::groups::EigenvalueGroup;
use super::sensor::OutputMap;
use crate::domain::Mode;
use crate::error::{Error, Result};

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A singular value this close (as a factor) to the rank threshold makes the verdict marginal.
const MARGINAL_FACTOR: f64 = 10.0;

/// Rank outcome for one eigenvalue group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRank {
    pub eigenvalue: f64,
    pub modes: Vec<Mode>,
    pub rank: usize,
    /// Singular values of the row-normalized block, descending, padded with zeros up to the
    /// multiplicity.
    pub singular_values: Vec<f64>,
    /// True when some singular value lies within a factor of ten of the threshold.
    pub marginal: bool,
}

impl GroupRank {
    pub fn multiplicity(&self) -> usize {
        self.modes.len()
    }

    pub fn full_rank(&self) -> bool {
        self.rank == self.multiplicity()
    }

    /// The `r_m`-th singular value; zero when the block has fewer rows than columns.
    pub fn min_singular_value(&self) -> f64 {
        self.singular_values[self.multiplicity() - 1]
    }
}

/// Result of the group-wise rank test.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategicReport {
    pub groups: Vec<GroupRank>,
    /// Absolute singular-value threshold that was applied.
    pub threshold: f64,
    /// A note when the sensor count cannot reach the largest multiplicity.
    pub precondition_note: Option<String>,
}

impl StrategicReport {
    pub fn is_strategic(&self) -> bool {
        self.groups.iter().all(GroupRank::full_rank)
    }

    /// Zero-based indices of the rank-deficient groups.
    pub fn failing_groups(&self) -> Vec<usize> {
        self.groups
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.full_rank())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn any_marginal(&self) -> bool {
        self.groups.iter().any(|g| g.marginal)
    }

    /// Smallest of the per-group minimum singular values.
    pub fn min_singular_value(&self) -> f64 {
        self.groups
            .iter()
            .map(GroupRank::min_singular_value)
            .fold(f64::INFINITY, f64::min)
    }

    /// One line per group with a header; numbers use the shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("group,eigenvalue,multiplicity,rank,min_singular_value,verdict\n");
        for (i, g) in self.groups.iter().enumerate() {
            let verdict = if g.full_rank() { "full_rank" } else { "rank_deficient" };
            writeln!(
                out,
                "{},{:e},{},{},{:e},{}",
                i + 1,
                g.eigenvalue,
                g.multiplicity(),
                g.rank,
                g.min_singular_value(),
                verdict
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Checks `rank G_m = r_m` for every group, where `G_m` collects the output-map columns of the
/// group's modes.
///
/// Each sensor row is first scaled to unit max-abs entry so the verdict does not depend on
/// sensor gains; singular values below `rank_tol * sigma_max(C)` count as zero.
pub fn strategic_rank_test(output: &OutputMap, groups: &[EigenvalueGroup], rank_tol: f64) -> Result<StrategicReport> {
    if groups.is_empty() {
        return Err(Error::EmptyGroups);
    }
    if !(rank_tol > 0.0 && rank_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance {rank_tol} outside (0, 1)"
        )));
    }
    let n = output.basis().len();
    if let Some(&bad) = groups.iter().flat_map(|g| &g.indices).find(|&&k| k >= n) {
        return Err(Error::DimensionMismatch(format!(
            "group index {bad} outside basis of {n} modes"
        )));
    }

    let c = output.row_normalized();
    let sigma_max = if c.nrows() == 0 {
        0.0
    } else {
        c.clone().singular_values().max()
    };
    let threshold = rank_tol * sigma_max.max(f64::MIN_POSITIVE);

    let q = output.q();
    let max_mult = groups.iter().map(EigenvalueGroup::multiplicity).max().unwrap_or(0);
    let precondition_note =
        (q < max_mult).then(|| format!("{q} sensors cannot resolve an eigenvalue of multiplicity {max_mult}"));

    let ranks = groups
        .iter()
        .map(|g| {
            let block = DMatrix::from_fn(q, g.indices.len(), |i, j| c[(i, g.indices[j])]);
            let mut sv: Vec<f64> = if q == 0 {
                Vec::new()
            } else {
                block.singular_values().iter().copied().collect()
            };
            sv.sort_by(|a, b| b.total_cmp(a));
            sv.resize(sv.len().max(g.multiplicity()), 0.0);
            sv.truncate(g.multiplicity());
            let rank = sv.iter().filter(|&&s| s > threshold).count();
            let marginal = sv
                .iter()
                .any(|&s| s > threshold / MARGINAL_FACTOR && s < threshold * MARGINAL_FACTOR);
            GroupRank {
                eigenvalue: g.eigenvalue,
                modes: g.modes.clone(),
                rank,
                singular_values: sv,
                marginal,
            }
        })
        .collect();

    Ok(StrategicReport {
        groups: ranks,
        threshold,
        precondition_note,
    })
}
