//! Subcommand implementations. Each returns an [`Outcome`] whose exit code the binary forwards.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gradobs_core::observer::fit_decay;
use gradobs_core::sensing::{DEFAULT_GROUP_TOL, DEFAULT_RANK_TOL};
use gradobs_core::{
    assemble_output_map, design_gain, detectability_check, group_eigenvalues, proposition_check, simulate_coupled,
    BoundaryRegion, DecayFit, Error as CoreError, Mode, OutputMap, PlacementPrediction, StrategicReport, Target,
    TraceOperator, TrajectoryRecord,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Resolved, ScenarioConfig, SensorCfg, SweepParam, TargetCfg};
use crate::error::{CliError, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_STRATEGIC: i32 = 2;
pub const EXIT_NOT_DETECTABLE: i32 = 3;
pub const EXIT_SLOW_DECAY: i32 = 4;

/// Fraction of the margin the fitted decay rate must reach for `simulate` to succeed.
pub const RATE_ACCEPTANCE: f64 = 0.9;
/// Share of the trajectory used for decay fitting.
pub const TAIL_FRACTION: f64 = 0.5;

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub margin: Option<f64>,
    pub target_omega: bool,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) -> Result<()> {
        if let Some(t) = self.truncation {
            cfg.truncation.n_max = t;
            cfg.truncation.m_max = t;
        }
        if let Some(m) = self.margin {
            cfg.margin = m;
        }
        if self.target_omega {
            cfg.target = Some(TargetCfg::Omega);
        }
        cfg.validate()
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub message: String,
    pub files: Vec<PathBuf>,
}

fn write(out: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let path = out.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

fn summary_toml<T: Serialize>(s: &T) -> String {
    toml::to_string(s).expect("run summaries always serialize")
}

fn output_map(r: &Resolved) -> Result<OutputMap> {
    assemble_output_map(&r.sensors, &r.basis, &r.rule).map_err(|e| CliError::from(e).context("sensors"))
}

fn target_of(cfg: &ScenarioConfig, r: &Resolved) -> Target {
    match (cfg.effective_target(), &r.region) {
        (TargetCfg::Region, Some(region)) => Target::Region(region.clone()),
        _ => Target::Omega,
    }
}

/// Region whose gradient error is reported: the configured one, or the whole boundary.
fn gamma_region(r: &Resolved) -> BoundaryRegion {
    r.region
        .clone()
        .unwrap_or_else(|| BoundaryRegion::full_boundary(*r.basis.domain()))
}

fn mode_list(modes: &[Mode]) -> Vec<[usize; 2]> {
    modes.iter().map(|m| [m.n, m.m]).collect()
}

#[derive(Debug, Serialize)]
struct PredictionSummary {
    sensor: usize,
    kind: String,
    /// "strategic", "not_strategic" or "no_criterion".
    prediction: String,
    detail: String,
}

fn predictions(cfg: &ScenarioConfig, r: &Resolved) -> Vec<PredictionSummary> {
    r.sensors
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (prediction, detail) = match proposition_check(s, &r.basis, cfg.groups, DEFAULT_GROUP_TOL) {
                Ok(PlacementPrediction::Criterion {
                    pattern,
                    predicted_strategic,
                    violations,
                    ..
                }) => (
                    if predicted_strategic {
                        "strategic"
                    } else {
                        "not_strategic"
                    }
                    .to_string(),
                    if violations.is_empty() {
                        format!("{pattern:?}")
                    } else {
                        format!(
                            "{pattern:?}; violating modes {}",
                            violations.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
                        )
                    },
                ),
                Ok(PlacementPrediction::NoCriterion(why)) => ("no_criterion".to_string(), why),
                Err(e) => ("no_criterion".to_string(), e.to_string()),
            };
            PredictionSummary {
                sensor: i,
                kind: s.kind_name().to_string(),
                prediction,
                detail,
            }
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct RankSummary {
    scenario: String,
    command: &'static str,
    bc: String,
    n_max: usize,
    m_max: usize,
    groups: usize,
    strategic: bool,
    threshold: f64,
    min_singular_value: f64,
    any_marginal: bool,
    /// 1-based indices of rank-deficient groups.
    failing_groups: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    predictions: Vec<PredictionSummary>,
}

/// Runs the strategic rank test for the first `groups` eigenvalue groups.
pub fn strategic_report(cfg: &ScenarioConfig) -> Result<(Resolved, StrategicReport)> {
    let r = cfg.resolve()?;
    let c = output_map(&r)?;
    let groups = group_eigenvalues(&r.basis, cfg.groups, DEFAULT_GROUP_TOL)?;
    let report = strategic_rank_test(&c, &groups)?;
    Ok((r, report))
}

fn strategic_rank_test(c: &OutputMap, groups: &[gradobs_core::EigenvalueGroup]) -> Result<StrategicReport> {
    Ok(gradobs_core::strategic_rank_test(c, groups, DEFAULT_RANK_TOL)?)
}

/// `rank-check`: writes `strategic_report.csv` and `run_summary.toml`.
pub fn rank_check(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let (r, report) = strategic_report(cfg)?;
    let mut files = Vec::new();
    write(out, "strategic_report.csv", &report.to_csv(), &mut files)?;
    let summary = RankSummary {
        scenario: cfg.name.clone(),
        command: "rank-check",
        bc: r.basis.bc().name().to_string(),
        n_max: r.basis.n_max(),
        m_max: r.basis.m_max(),
        groups: cfg.groups,
        strategic: report.is_strategic(),
        threshold: report.threshold,
        min_singular_value: report.min_singular_value(),
        any_marginal: report.any_marginal(),
        failing_groups: report.failing_groups().iter().map(|g| g + 1).collect(),
        note: report.precondition_note.clone(),
        predictions: predictions(cfg, &r),
    };
    write(out, "run_summary.toml", &summary_toml(&summary), &mut files)?;
    let (exit_code, message) = if report.is_strategic() {
        (
            EXIT_OK,
            format!("{}: strategic for the first {} groups", cfg.name, cfg.groups),
        )
    } else {
        (
            EXIT_NOT_STRATEGIC,
            format!(
                "{}: not strategic, rank-deficient groups {:?}",
                cfg.name, summary.failing_groups
            ),
        )
    };
    Ok(Outcome {
        exit_code,
        message,
        files,
    })
}

#[derive(Debug, Serialize)]
struct FitSummary {
    amplitude: f64,
    rate: f64,
    residual: f64,
    samples: usize,
    converged: bool,
}

impl From<DecayFit> for FitSummary {
    fn from(f: DecayFit) -> Self {
        Self {
            amplitude: f.amplitude,
            rate: f.rate,
            residual: f.residual,
            samples: f.samples,
            converged: f.converged(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SimSummary {
    scenario: String,
    command: &'static str,
    target: String,
    margin: f64,
    reaction: f64,
    detectable: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    failing_groups: Vec<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    corrected_modes: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    open_loop_modes: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_closed_loop_real_part: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted_series: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    required_rate: Option<f64>,
}

/// Result of a successful coupled simulation.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub record: TrajectoryRecord,
    pub target: Target,
    /// Fit of the target error series (gradient norm on the region, or the H¹ norm on Ω).
    pub fit: DecayFit,
}

/// Rank-deficient slow groups reported by a failed detectability check.
pub type FailingGroups = Vec<(f64, Vec<Mode>)>;

/// Designs the gain and simulates; returns `Ok(Err(groups))` when detectability fails.
pub fn run_simulation(cfg: &ScenarioConfig, r: &Resolved) -> Result<std::result::Result<SimulationRun, FailingGroups>> {
    let c = output_map(r)?;
    let target = target_of(cfg, r);
    let gain = match design_gain(&c, &r.system, cfg.margin, &target, &r.rule) {
        Ok(g) => g,
        Err(CoreError::NotDetectable { groups }) => return Ok(Err(groups)),
        Err(e) => return Err(e.into()),
    };
    let gamma = TraceOperator::new(&r.basis, &gamma_region(r), &r.rule)?;
    let record = simulate_coupled(&r.system, &c, &gain, &r.z0, cfg.time.t_end, cfg.time.dt_out, &gamma)?;
    let series = match target {
        Target::Region(_) => &record.gamma_error_norm,
        Target::Omega => &record.omega_error_norm,
    };
    let fit = fit_decay(&record.times, series, TAIL_FRACTION)?;
    Ok(Ok(SimulationRun { record, target, fit }))
}

/// `t,omega_error_norm,gamma_error_norm[,e_n_m...]` with fixed formatting.
pub fn trajectory_csv(rec: &TrajectoryRecord, emit_mode_coeffs: bool) -> String {
    let mut s = String::from("t,omega_error_norm,gamma_error_norm");
    let modes: &[Mode] = rec.error.first().map_or(&[], |e| e.basis().modes());
    if emit_mode_coeffs {
        for m in modes {
            write!(s, ",e_{}_{}", m.n, m.m).unwrap();
        }
    }
    s.push('\n');
    for k in 0..rec.len() {
        write!(
            s,
            "{:.9},{:.12e},{:.12e}",
            rec.times[k], rec.omega_error_norm[k], rec.gamma_error_norm[k]
        )
        .unwrap();
        if emit_mode_coeffs {
            for v in rec.error[k].coeffs().iter() {
                write!(s, ",{v:.12e}").unwrap();
            }
        }
        s.push('\n');
    }
    s
}

fn decay_csv(series: &str, f: &DecayFit) -> String {
    format!(
        "series,amplitude,rate,residual,samples,converged\n{series},{:.12e},{:.12e},{:.12e},{},{}\n",
        f.amplitude,
        f.rate,
        f.residual,
        f.samples,
        f.converged()
    )
}

/// `simulate`: writes `trajectory.csv`, `decay_fit.csv` and `run_summary.toml`.
pub fn simulate(cfg: &ScenarioConfig, out: &Path, emit_mode_coeffs: bool) -> Result<Outcome> {
    let r = cfg.resolve()?;
    let mut files = Vec::new();
    let mut summary = SimSummary {
        scenario: cfg.name.clone(),
        command: "simulate",
        target: match target_of(cfg, &r) {
            Target::Omega => "omega".into(),
            Target::Region(_) => "region".into(),
        },
        margin: cfg.margin,
        reaction: cfg.reaction,
        detectable: true,
        failing_groups: Vec::new(),
        corrected_modes: Vec::new(),
        open_loop_modes: Vec::new(),
        max_closed_loop_real_part: None,
        fitted_series: None,
        fit: None,
        required_rate: None,
    };
    let run = match run_simulation(cfg, &r)? {
        Ok(run) => run,
        Err(groups) => {
            summary.detectable = false;
            summary.failing_groups = groups.iter().map(|(_, m)| mode_list(m)).collect();
            write(out, "run_summary.toml", &summary_toml(&summary), &mut files)?;
            return Ok(Outcome {
                exit_code: EXIT_NOT_DETECTABLE,
                message: format!("{}: {}", cfg.name, CoreError::NotDetectable { groups }),
                files,
            });
        }
    };

    // Recover the gain bookkeeping for the summary.
    let c = output_map(&r)?;
    let gain = design_gain(&c, &r.system, cfg.margin, &run.target, &r.rule)?;
    let modes = r.basis.modes();
    summary.corrected_modes = gain
        .corrected_modes()
        .iter()
        .map(|&k| [modes[k].n, modes[k].m])
        .collect();
    summary.open_loop_modes = gain
        .open_loop_modes()
        .iter()
        .map(|&k| [modes[k].n, modes[k].m])
        .collect();
    summary.max_closed_loop_real_part = Some(gain.max_real_part());

    let series = match run.target {
        Target::Region(_) => "gamma_error_norm",
        Target::Omega => "omega_error_norm",
    };
    let required = RATE_ACCEPTANCE * cfg.margin;
    summary.fitted_series = Some(series.into());
    summary.fit = Some(run.fit.into());
    summary.required_rate = Some(required);

    write(
        out,
        "trajectory.csv",
        &trajectory_csv(&run.record, emit_mode_coeffs),
        &mut files,
    )?;
    write(out, "decay_fit.csv", &decay_csv(series, &run.fit), &mut files)?;
    write(out, "run_summary.toml", &summary_toml(&summary), &mut files)?;

    let ok = run.fit.converged() || run.fit.rate >= required;
    Ok(Outcome {
        exit_code: if ok { EXIT_OK } else { EXIT_SLOW_DECAY },
        message: if ok {
            format!(
                "{}: {series} decays at rate {:.4} (required {required:.4})",
                cfg.name, run.fit.rate
            )
        } else {
            format!(
                "{}: {series} decays at rate {:.4}, below {required:.4}",
                cfg.name, run.fit.rate
            )
        },
        files,
    })
}

/// Moves one positional parameter of a sensor, keeping its extent.
pub fn set_sensor_param(sensor: &mut SensorCfg, param: SweepParam, v: f64) -> Result<()> {
    let axis = match param {
        SweepParam::X => 0,
        SweepParam::Y => 1,
        SweepParam::S => 2,
    };
    let shift = |lo: &mut f64, hi: &mut f64| {
        let half = 0.5 * (*hi - *lo);
        *lo = v - half;
        *hi = v + half;
    };
    match (sensor, axis) {
        (SensorCfg::Pointwise { location } | SensorCfg::BoundaryPointwise { location, .. }, a) if a < 2 => {
            location[a] = v;
        }
        (SensorCfg::InternalZone { x, .. }, 0) => {
            let (mut lo, mut hi) = (x[0], x[1]);
            shift(&mut lo, &mut hi);
            *x = [lo, hi];
        }
        (SensorCfg::InternalZone { y, .. }, 1) => {
            let (mut lo, mut hi) = (y[0], y[1]);
            shift(&mut lo, &mut hi);
            *y = [lo, hi];
        }
        (SensorCfg::Filament { start, end, .. }, a) if a < 2 => {
            let d = v - 0.5 * (start[a] + end[a]);
            start[a] += d;
            end[a] += d;
        }
        (SensorCfg::BoundaryZone { segments, .. }, 2) if !segments.is_empty() => {
            let s = &mut segments[0];
            let (Some(mut lo), Some(mut hi)) = (s.lo, s.hi) else {
                return Err(CliError::Config(
                    "sweeping a boundary zone needs explicit lo and hi".into(),
                ));
            };
            shift(&mut lo, &mut hi);
            s.lo = Some(lo);
            s.hi = Some(hi);
        }
        (s, _) => {
            return Err(CliError::Config(format!(
                "parameter {param:?} cannot be swept on a {} sensor",
                match s {
                    SensorCfg::InternalZone { .. } => "internal_zone",
                    SensorCfg::BoundaryZone { .. } => "boundary_zone",
                    SensorCfg::Pointwise { .. } => "pointwise",
                    SensorCfg::BoundaryPointwise { .. } => "boundary_pointwise",
                    SensorCfg::Filament { .. } => "filament",
                }
            )))
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct SweepRow {
    values: Vec<f64>,
    verdict: std::result::Result<(bool, f64, bool, Option<bool>), String>,
}

/// `sweep`: evaluates the rank test on a grid of sensor positions (in parallel) and writes
/// `sweep.csv` in grid order.
pub fn sweep(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome> {
    let spec = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep: the scenario has no [sweep] table".into()))?;
    let axes: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for vals in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    // Validate the parameter kinds once, before the parallel part.
    let mut probe = cfg.clone();
    for (a, &v) in spec.axes.iter().zip(&points[0]) {
        set_sensor_param(&mut probe.sensors[a.sensor], a.param, v)?;
    }

    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|p| {
            let mut c = cfg.clone();
            for (a, &v) in spec.axes.iter().zip(p) {
                set_sensor_param(&mut c.sensors[a.sensor], a.param, v).expect("checked above");
            }
            let verdict = strategic_report(&c)
                .map(|(r, rep)| {
                    let pred = predictions(&c, &r);
                    let predicted = if pred.iter().all(|p| p.prediction == "no_criterion") {
                        None
                    } else {
                        Some(pred.iter().any(|p| p.prediction == "strategic"))
                    };
                    (
                        rep.is_strategic(),
                        rep.min_singular_value(),
                        rep.any_marginal(),
                        predicted,
                    )
                })
                .map_err(|e| e.to_string());
            SweepRow {
                values: p.clone(),
                verdict,
            }
        })
        .collect();

    let mut csv = String::new();
    for a in &spec.axes {
        write!(csv, "sensor{}_{:?},", a.sensor, a.param).unwrap();
    }
    csv = csv.to_lowercase();
    csv.push_str("strategic,min_singular_value,marginal,predicted,error\n");
    let mut n_strategic = 0;
    for row in &rows {
        for v in &row.values {
            write!(csv, "{v:.9},").unwrap();
        }
        match &row.verdict {
            Ok((s, sigma, marginal, predicted)) => {
                n_strategic += usize::from(*s);
                let pred = predicted.map_or("none".to_string(), |p| p.to_string());
                writeln!(csv, "{s},{sigma:.6e},{marginal},{pred},").unwrap();
            }
            Err(e) => writeln!(csv, ",,,,\"{}\"", e.replace('"', "'")).unwrap(),
        }
    }
    let mut files = Vec::new();
    write(out, "sweep.csv", &csv, &mut files)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        message: format!("{}: {n_strategic} of {} placements strategic", cfg.name, rows.len()),
        files,
    })
}

/// The three checks of the neutral-mode example.
#[derive(Debug, Clone)]
pub struct NeutralModeReport {
    /// Whole-domain detectability verdict and the groups it names.
    pub omega_detectable: bool,
    pub omega_failing: FailingGroups,
    /// Initial error in the neutral mode.
    pub neutral_offset: f64,
    pub t_check: f64,
    pub omega_error_at_check: f64,
    pub gamma_error_at_check: f64,
    /// Rank verdict on the groups restricted to the `m = 1` family.
    pub family_strategic: bool,
    pub family_min_singular_value: f64,
    pub record: TrajectoryRecord,
}

impl NeutralModeReport {
    pub fn omega_relative_gap(&self) -> f64 {
        (self.omega_error_at_check - self.neutral_offset.abs()).abs() / self.neutral_offset.abs()
    }

    pub fn passes(&self) -> bool {
        !self.omega_detectable
            && self.omega_failing.iter().any(|(_, m)| m.contains(&Mode::new(0, 0)))
            && self.omega_relative_gap() <= 0.01
            && self.gamma_error_at_check < 1e-6
            && self.family_strategic
    }
}

pub const NEUTRAL_CHECK_TIME: f64 = 2.0;

/// Runs the neutral-mode example on a scenario with a region target.
pub fn neutral_mode_report(cfg: &ScenarioConfig) -> Result<NeutralModeReport> {
    let r = cfg.resolve()?;
    if r.region.is_none() {
        return Err(CliError::Config("example-3-7 needs a [[region]]".into()));
    }
    let c = output_map(&r)?;

    let omega = detectability_check(&c, &r.system, cfg.margin, &Target::Omega, &r.rule)?;
    let omega_failing = omega.failing.iter().map(|g| (g.eigenvalue, g.modes.clone())).collect();

    let mut region_cfg = cfg.clone();
    region_cfg.target = Some(TargetCfg::Region);
    let run = run_simulation(&region_cfg, &r)?
        .map_err(|groups| CliError::from(CoreError::NotDetectable { groups }).context("region target"))?;
    let k = run
        .record
        .times
        .iter()
        .position(|&t| t >= NEUTRAL_CHECK_TIME - 1e-9)
        .ok_or_else(|| CliError::Config(format!("time.t_end must reach {NEUTRAL_CHECK_TIME}")))?;
    let neutral = Mode::new(0, 0);
    let neutral_offset = r.z0.coeff(neutral).unwrap_or(0.0) - r.system.x0().coeff(neutral).unwrap_or(0.0);

    let groups = group_eigenvalues(&r.basis, cfg.groups, DEFAULT_GROUP_TOL)?;
    let family: Vec<_> = groups.iter().filter_map(|g| g.restricted(|m| m.m == 1)).collect();
    let family_report = strategic_rank_test(&c, &family)?;
    Ok(NeutralModeReport {
        omega_detectable: omega.detectable,
        omega_failing,
        neutral_offset,
        t_check: run.record.times[k],
        omega_error_at_check: run.record.omega_error_norm[k],
        gamma_error_at_check: run.record.gamma_error_norm[k],
        family_strategic: family_report.is_strategic(),
        family_min_singular_value: family_report.min_singular_value(),
        record: run.record,
    })
}

#[derive(Debug, Serialize)]
struct NeutralSummary {
    scenario: String,
    command: &'static str,
    omega_detectable: bool,
    omega_failing_groups: Vec<Vec<[usize; 2]>>,
    neutral_offset: f64,
    t_check: f64,
    omega_error_at_check: f64,
    omega_relative_gap: f64,
    gamma_error_at_check: f64,
    family_m1_strategic: bool,
    family_m1_min_singular_value: f64,
    passes: bool,
}

/// `example-3-7`: writes `trajectory.csv` and `run_summary.toml`; exit 0 when all checks hold.
pub fn example_3_7(cfg: &ScenarioConfig, out: &Path, emit_mode_coeffs: bool) -> Result<Outcome> {
    let rep = neutral_mode_report(cfg)?;
    let summary = NeutralSummary {
        scenario: cfg.name.clone(),
        command: "example-3-7",
        omega_detectable: rep.omega_detectable,
        omega_failing_groups: rep.omega_failing.iter().map(|(_, m)| mode_list(m)).collect(),
        neutral_offset: rep.neutral_offset,
        t_check: rep.t_check,
        omega_error_at_check: rep.omega_error_at_check,
        omega_relative_gap: rep.omega_relative_gap(),
        gamma_error_at_check: rep.gamma_error_at_check,
        family_m1_strategic: rep.family_strategic,
        family_m1_min_singular_value: rep.family_min_singular_value,
        passes: rep.passes(),
    };
    let mut files = Vec::new();
    write(
        out,
        "trajectory.csv",
        &trajectory_csv(&rep.record, emit_mode_coeffs),
        &mut files,
    )?;
    write(out, "run_summary.toml", &summary_toml(&summary), &mut files)?;
    let message = format!(
        "{}: Ω-detectable = {}; at t = {} Ω error {:.6e} vs |c| = {:.6e}, Γ* error {:.3e}; m = 1 family strategic = {}",
        cfg.name,
        rep.omega_detectable,
        rep.t_check,
        rep.omega_error_at_check,
        rep.neutral_offset.abs(),
        rep.gamma_error_at_check,
        rep.family_strategic
    );
    Ok(Outcome {
        exit_code: if summary.passes { EXIT_OK } else { EXIT_ERROR },
        message,
        files,
    })
}
