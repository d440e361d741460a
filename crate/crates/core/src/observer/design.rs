use nalgebra::{Complex, DMatrix};

use super::system::SystemSpec;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::sensing::{
    all_groups, strategic_rank_test, EigenvalueGroup, OutputMap, DEFAULT_GROUP_TOL, DEFAULT_RANK_TOL,
};
use crate::trace::{BoundaryRegion, TraceOperator};

/// Slack allowed when verifying the closed-loop spectrum against the margin.
pub const SPECTRUM_SLACK: f64 = 1e-6;

/// A mode whose gradient trace norm on the target (or whose sensor response) is below this
/// fraction of the largest one is treated as invisible (or unobserved).
const VISIBILITY_TOL: f64 = 1e-12;

/// What the observer must reconstruct.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// The whole state.
    Omega,
    /// The boundary gradient on a subregion of the boundary.
    Region(BoundaryRegion),
}

impl Target {
    /// Per-mode visibility flags.
    pub fn visible_modes(&self, sys: &SystemSpec, rule: &QuadratureRule) -> Result<Vec<bool>> {
        match self {
            Target::Omega => Ok(vec![true; sys.basis().len()]),
            Target::Region(region) => {
                let norms = TraceOperator::new(sys.basis(), region, rule)?.mode_norms();
                let max = norms.iter().copied().fold(0.0, f64::max);
                Ok(norms.iter().map(|&v| v > VISIBILITY_TOL * max).collect())
            }
        }
    }
}

/// A mode is slow when it decays no faster than the margin; the neutral case counts as slow
/// even at margin zero.
fn is_slow(lambda: f64, margin: f64) -> bool {
    lambda > -margin || lambda >= 0.0
}

/// Outcome of the detectability check.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectabilityReport {
    pub detectable: bool,
    /// Slow groups restricted to the modes that must be corrected, in descending eigenvalue order.
    pub slow_groups: Vec<EigenvalueGroup>,
    /// The rank-deficient members of `slow_groups`.
    pub failing: Vec<EigenvalueGroup>,
    /// Slow modes that are both invisible on the target and unobserved; they are left open loop.
    pub open_loop: Vec<usize>,
}

impl DetectabilityReport {
    /// Basis indices of the modes that receive output injection, ascending.
    pub fn corrected_modes(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .slow_groups
            .iter()
            .flat_map(|g| g.indices.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Checks that every slow eigenvalue group has a full-rank output block.
///
/// Slow modes that are invisible on the target and produce no output are dropped: they neither
/// affect the reconstructed quantity nor the output, so they need no correction.
pub fn detectability_check(
    output: &OutputMap,
    sys: &SystemSpec,
    margin: f64,
    target: &Target,
    rule: &QuadratureRule,
) -> Result<DetectabilityReport> {
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::InvalidMargin(margin));
    }
    if output.basis() != sys.basis() {
        return Err(Error::DomainMismatch);
    }
    let lam = sys.eigenvalues();
    let visible = target.visible_modes(sys, rule)?;
    // Quadrature leaves roundoff in entries that vanish analytically, so compare against each
    // sensor's largest entry.
    let c = output.row_normalized();
    let observed: Vec<bool> = (0..lam.len()).map(|k| c.column(k).amax() > VISIBILITY_TOL).collect();

    let mut slow_groups = Vec::new();
    let mut open_loop = Vec::new();
    for g in all_groups(sys.basis(), DEFAULT_GROUP_TOL) {
        let shifted = g.eigenvalue + sys.reaction();
        if !is_slow(shifted, margin) {
            continue;
        }
        let (keep, drop): (Vec<_>, Vec<_>) = g
            .indices
            .iter()
            .zip(&g.modes)
            .partition(|(&k, _)| visible[k] || observed[k]);
        open_loop.extend(drop.iter().map(|(&k, _)| k));
        if !keep.is_empty() {
            slow_groups.push(EigenvalueGroup {
                eigenvalue: shifted,
                indices: keep.iter().map(|(&k, _)| k).collect(),
                modes: keep.iter().map(|(_, &m)| m).collect(),
            });
        }
    }
    open_loop.sort_unstable();

    let failing = if slow_groups.is_empty() {
        Vec::new()
    } else {
        let report = strategic_rank_test(output, &slow_groups, DEFAULT_RANK_TOL)?;
        report
            .failing_groups()
            .into_iter()
            .map(|i| slow_groups[i].clone())
            .collect()
    };
    Ok(DetectabilityReport {
        detectable: failing.is_empty(),
        slow_groups,
        failing,
        open_loop,
    })
}

/// Output-injection gain `H` (modes x q) with its verified closed-loop spectrum.
#[derive(Debug, Clone)]
pub struct GainMap {
    entries: DMatrix<f64>,
    corrected: Vec<usize>,
    open_loop: Vec<usize>,
    spectrum: Vec<Complex<f64>>,
    margin: f64,
}

impl GainMap {
    /// The zero gain (pure open-loop copy of the plant).
    pub fn zero(modes: usize, q: usize) -> Self {
        Self {
            entries: DMatrix::zeros(modes, q),
            corrected: Vec::new(),
            open_loop: Vec::new(),
            spectrum: Vec::new(),
            margin: 0.0,
        }
    }

    /// Wraps an arbitrary gain matrix without any spectrum guarantee.
    pub fn from_matrix(entries: DMatrix<f64>) -> Self {
        let corrected = (0..entries.nrows())
            .filter(|&i| entries.row(i).iter().any(|&v| v != 0.0))
            .collect();
        Self {
            entries,
            corrected,
            open_loop: Vec::new(),
            spectrum: Vec::new(),
            margin: 0.0,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Basis indices of the rows that carry injection.
    pub fn corrected_modes(&self) -> &[usize] {
        &self.corrected
    }

    /// Slow modes deliberately left without injection.
    pub fn open_loop_modes(&self) -> &[usize] {
        &self.open_loop
    }

    /// Eigenvalues of the closed loop, excluding the open-loop modes.
    pub fn spectrum(&self) -> &[Complex<f64>] {
        &self.spectrum
    }

    pub fn max_real_part(&self) -> f64 {
        self.spectrum.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }
}

/// Designs `H` so that every mode relevant to the target decays at least at rate `margin`.
///
/// On the slow block `(Lambda_s, C_s)` the gain is `H_s = P^{-1} C_s^T` with `P` solving
/// `(Lambda_s + beta I) P + P (Lambda_s + beta I) = C_s^T C_s`. Then
/// `Lambda_s - H_s C_s = -P^{-1} (Lambda_s + 2 beta I) P`, so the closed-loop eigenvalues are
/// `-lambda_i - 2 beta`; `beta` is chosen to put all of them at or below `-margin`. Rows of fast
/// modes stay zero. The resulting spectrum is recomputed and checked.
pub fn design_gain(
    output: &OutputMap,
    sys: &SystemSpec,
    margin: f64,
    target: &Target,
    rule: &QuadratureRule,
) -> Result<GainMap> {
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::InvalidMargin(margin));
    }
    let report = detectability_check(output, sys, margin, target, rule)?;
    if !report.detectable {
        return Err(Error::NotDetectable {
            groups: report.failing.iter().map(|g| (g.eigenvalue, g.modes.clone())).collect(),
        });
    }
    let lam = sys.eigenvalues();
    let n = lam.len();
    let q = output.q();
    let c = output.matrix();
    let slow = report.corrected_modes();

    let mut h = DMatrix::zeros(n, q);
    if !slow.is_empty() {
        let cs = c.select_columns(&slow);
        let ls: Vec<f64> = slow.iter().map(|&k| lam[k]).collect();
        let lmin = ls.iter().copied().fold(f64::INFINITY, f64::min);
        let beta = (0.5 * margin - lmin).max(0.5 * (margin - lmin));
        let gram = cs.transpose() * &cs;
        let p = DMatrix::from_fn(slow.len(), slow.len(), |i, j| {
            gram[(i, j)] / (ls[i] + ls[j] + 2.0 * beta)
        });
        let hs = p
            .cholesky()
            .ok_or_else(|| {
                Error::InvalidParameter("observability Gramian of the slow block is not positive definite".into())
            })?
            .solve(&cs.transpose());
        for (r, &k) in slow.iter().enumerate() {
            h.row_mut(k).copy_from(&hs.row(r));
        }
    }

    let spectrum = closed_loop_spectrum(&lam, c, &h, &slow, &report.open_loop);
    let gain = GainMap {
        entries: h,
        corrected: slow,
        open_loop: report.open_loop,
        spectrum,
        margin,
    };
    let bound = -margin + SPECTRUM_SLACK;
    if gain.max_real_part() > bound {
        return Err(Error::SpectrumCheckFailed {
            max_real: gain.max_real_part(),
            bound,
        });
    }
    Ok(gain)
}

/// Eigenvalues of `Lambda - H C`: rows outside `corrected` are diagonal, so the spectrum is the
/// corrected block's eigenvalues plus the remaining diagonal entries (open-loop modes skipped).
fn closed_loop_spectrum(
    lam: &[f64],
    c: &DMatrix<f64>,
    h: &DMatrix<f64>,
    corrected: &[usize],
    open_loop: &[usize],
) -> Vec<Complex<f64>> {
    let mut spectrum: Vec<Complex<f64>> = Vec::with_capacity(lam.len());
    if !corrected.is_empty() {
        let block = DMatrix::from_fn(corrected.len(), corrected.len(), |i, j| {
            let (ki, kj) = (corrected[i], corrected[j]);
            let diag = if i == j { lam[ki] } else { 0.0 };
            diag - (h.row(ki) * c.column(kj))[(0, 0)]
        });
        spectrum.extend(block.complex_eigenvalues().iter().copied());
    }
    for (k, &l) in lam.iter().enumerate() {
        if corrected.binary_search(&k).is_err() && open_loop.binary_search(&k).is_err() {
            spectrum.push(Complex::new(l, 0.0));
        }
    }
    spectrum
}
