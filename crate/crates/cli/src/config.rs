//! Scenario files: strict TOML schema, defaults, and conversion into core types.

use std::path::Path;
use std::sync::Arc;

use gradobs_core::nalgebra::{DMatrix, DVector};
use gradobs_core::observer::actuator_input_map;
use gradobs_core::{
    BcFamily, BoundaryRegion, BoundarySegment, Measurement, ModalBasis, ModalField, Mode, Profile, QuadratureRule,
    RectDomain, SensorSpec, Side, Signal, SystemSpec, TrigFactor,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_TRUNCATION: usize = gradobs_core::DEFAULT_TRUNCATION;
pub const DEFAULT_MARGIN: f64 = 0.5;
pub const DEFAULT_GROUPS: usize = 4;
pub const DEFAULT_T_END: f64 = 4.0;
pub const DEFAULT_DT_OUT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub domain: DomainCfg,
    #[serde(default)]
    pub bc: BcCfg,
    #[serde(default)]
    pub truncation: TruncationCfg,
    /// Number of eigenvalue groups `J` for the rank test.
    #[serde(default = "default_groups")]
    pub groups: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Reaction shift `c` in `x' = (A + c I) x + B u`.
    #[serde(default)]
    pub reaction: f64,
    /// Target of the observer; defaults to the region when one is given, else the whole domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetCfg>,
    pub sensors: Vec<SensorCfg>,
    /// Boundary region Γ* on which the gradient is reconstructed.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub region: Vec<SegmentCfg>,
    /// Initial plant state as a sum of terms; zero when absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x0: Vec<FieldTermCfg>,
    /// Initial observer state as a sum of terms; zero when absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z0: Vec<FieldTermCfg>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<InputCfg>,
    #[serde(default)]
    pub time: TimeCfg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepCfg>,
}

fn default_groups() -> usize {
    DEFAULT_GROUPS
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BcCfg {
    #[default]
    Neumann,
    Dirichlet,
}

impl From<BcCfg> for BcFamily {
    fn from(bc: BcCfg) -> Self {
        match bc {
            BcCfg::Neumann => BcFamily::NeumannCosine,
            BcCfg::Dirichlet => BcFamily::DirichletSine,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationCfg {
    pub n_max: usize,
    pub m_max: usize,
}

impl Default for TruncationCfg {
    fn default() -> Self {
        Self {
            n_max: DEFAULT_TRUNCATION,
            m_max: DEFAULT_TRUNCATION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetCfg {
    Omega,
    Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TimeCfg {
    pub t_end: f64,
    pub dt_out: f64,
}

impl Default for TimeCfg {
    fn default() -> Self {
        Self {
            t_end: DEFAULT_T_END,
            dt_out: DEFAULT_DT_OUT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SideCfg {
    Bottom,
    Right,
    Top,
    Left,
}

impl From<SideCfg> for Side {
    fn from(s: SideCfg) -> Self {
        match s {
            SideCfg::Bottom => Side::Bottom,
            SideCfg::Right => Side::Right,
            SideCfg::Top => Side::Top,
            SideCfg::Left => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementCfg {
    Trace,
    Flux,
}

impl From<MeasurementCfg> for Measurement {
    fn from(m: MeasurementCfg) -> Self {
        match m {
            MeasurementCfg::Trace => Measurement::Trace,
            MeasurementCfg::Flux => Measurement::Flux,
        }
    }
}

/// One axis factor of a trigonometric profile: `"one"`, `{ cos = k }` or `{ sin = k }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorCfg {
    #[default]
    One,
    Cos(u32),
    Sin(u32),
}

impl From<FactorCfg> for TrigFactor {
    fn from(f: FactorCfg) -> Self {
        match f {
            FactorCfg::One => TrigFactor::One,
            FactorCfg::Cos(k) => TrigFactor::Cos(k),
            FactorCfg::Sin(k) => TrigFactor::Sin(k),
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileCfg {
    Constant {
        value: f64,
    },
    Trig {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        x: FactorCfg,
        #[serde(default)]
        y: FactorCfg,
    },
    Gaussian {
        #[serde(default = "one")]
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl ProfileCfg {
    pub fn build(&self) -> Result<Profile> {
        Ok(match *self {
            ProfileCfg::Constant { value } => Profile::Constant(value),
            ProfileCfg::Trig { amplitude, x, y } => Profile::Trig {
                amplitude,
                x: x.into(),
                y: y.into(),
            },
            ProfileCfg::Gaussian {
                amplitude,
                center,
                width,
            } => {
                if !(width > 0.0) {
                    return Err(CliError::Config(format!(
                        "gaussian width must be positive, got {width}"
                    )));
                }
                Profile::Gaussian {
                    amplitude,
                    center,
                    width,
                }
            }
        })
    }
}

fn build_profile(p: &Option<ProfileCfg>) -> Result<Profile> {
    p.as_ref().map_or(Ok(Profile::Constant(1.0)), ProfileCfg::build)
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentCfg {
    pub side: SideCfg,
    /// Arclength bounds along the side; the full side when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    /// Sensor weight on the segment (boundary zones only); constant 1 when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileCfg>,
}

impl SegmentCfg {
    pub fn build(&self, domain: &RectDomain) -> Result<BoundarySegment> {
        let side: Side = self.side.into();
        let lo = self.lo.unwrap_or(0.0);
        let hi = self.hi.unwrap_or_else(|| side.length(domain));
        Ok(BoundarySegment::new(side, lo, hi, domain)?)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SensorCfg {
    InternalZone {
        x: [f64; 2],
        y: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<ProfileCfg>,
    },
    BoundaryZone {
        measurement: MeasurementCfg,
        segments: Vec<SegmentCfg>,
    },
    Pointwise {
        location: [f64; 2],
    },
    BoundaryPointwise {
        location: [f64; 2],
        measurement: MeasurementCfg,
    },
    Filament {
        start: [f64; 2],
        end: [f64; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<ProfileCfg>,
    },
}

impl SensorCfg {
    pub fn build(&self, domain: &RectDomain) -> Result<SensorSpec> {
        Ok(match self {
            SensorCfg::InternalZone { x, y, profile } => SensorSpec::InternalZone {
                x: (x[0], x[1]),
                y: (y[0], y[1]),
                profile: build_profile(profile)?,
            },
            SensorCfg::BoundaryZone { measurement, segments } => SensorSpec::BoundaryZone {
                segments: segments
                    .iter()
                    .map(|s| Ok((s.build(domain)?, build_profile(&s.profile)?)))
                    .collect::<Result<_>>()?,
                measurement: (*measurement).into(),
            },
            SensorCfg::Pointwise { location } => SensorSpec::Pointwise { location: *location },
            SensorCfg::BoundaryPointwise { location, measurement } => SensorSpec::BoundaryPointwise {
                location: *location,
                measurement: (*measurement).into(),
            },
            SensorCfg::Filament { start, end, profile } => SensorSpec::Filament {
                start: *start,
                end: *end,
                profile: build_profile(profile)?,
            },
        })
    }
}

/// One additive term of an initial field: a projected profile or a single modal coefficient.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTermCfg {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalCfg {
    Zero,
    Constant {
        value: f64,
    },
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Exponential {
        #[serde(default = "one")]
        amplitude: f64,
        rate: f64,
    },
}

impl From<SignalCfg> for Signal {
    fn from(s: SignalCfg) -> Self {
        match s {
            SignalCfg::Zero => Signal::Zero,
            SignalCfg::Constant { value } => Signal::Constant(value),
            SignalCfg::Sine {
                amplitude,
                frequency,
                phase,
            } => Signal::Sine {
                amplitude,
                frequency,
                phase,
            },
            SignalCfg::Exponential { amplitude, rate } => Signal::Exponential { amplitude, rate },
        }
    }
}

/// An actuator distribution (described like a sensor) driven by a signal.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputCfg {
    pub actuator: SensorCfg,
    pub signal: SignalCfg,
}

/// Positional parameter a sweep axis moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// First coordinate of the sensor's location or centre.
    X,
    /// Second coordinate of the sensor's location or centre.
    Y,
    /// Centre of the first segment of a boundary zone, as arclength along its side.
    S,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxisCfg {
    #[serde(default)]
    pub sensor: usize,
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepAxisCfg {
    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub axes: Vec<SweepAxisCfg>,
}

/// Core objects resolved from a scenario.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub basis: Arc<ModalBasis>,
    pub sensors: Vec<SensorSpec>,
    pub region: Option<BoundaryRegion>,
    pub system: SystemSpec,
    pub z0: ModalField,
    /// Quadrature used for sensor, actuator and trace functionals.
    pub rule: QuadratureRule,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialize")
    }

    /// Range checks that do not need the core objects.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(CliError::Config(format!("{field}: {why}")));
        if self.name.trim().is_empty() {
            return bad("name", "must not be empty".into());
        }
        if self.truncation.n_max == 0 || self.truncation.m_max == 0 {
            return bad("truncation", "n_max and m_max must be positive".into());
        }
        if self.groups == 0 {
            return bad("groups", "must be positive".into());
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return bad("margin", format!("must be positive, got {}", self.margin));
        }
        if !self.reaction.is_finite() {
            return bad("reaction", "must be finite".into());
        }
        if !(self.time.t_end > 0.0 && self.time.t_end.is_finite()) {
            return bad("time.t_end", format!("must be positive, got {}", self.time.t_end));
        }
        if !(self.time.dt_out > 0.0 && self.time.dt_out <= self.time.t_end) {
            return bad(
                "time.dt_out",
                format!("must lie in (0, t_end], got {}", self.time.dt_out),
            );
        }
        if self.target == Some(TargetCfg::Region) && self.region.is_empty() {
            return bad("target", "\"region\" needs a [[region]] entry".into());
        }
        for (i, t) in self.x0.iter().chain(&self.z0).enumerate() {
            match (&t.profile, &t.mode, &t.value) {
                (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                _ => {
                    return bad(
                        "x0/z0",
                        format!("term {i} needs either `profile` or `mode` with `value`"),
                    )
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() || sweep.axes.len() > 2 {
                return bad("sweep.axes", "one or two axes are supported".into());
            }
            for a in &sweep.axes {
                if a.points == 0 {
                    return bad("sweep.axes.points", "must be positive".into());
                }
                if a.sensor >= self.sensors.len() {
                    return bad("sweep.axes.sensor", format!("no sensor with index {}", a.sensor));
                }
            }
        }
        Ok(())
    }

    pub fn effective_target(&self) -> TargetCfg {
        self.target.unwrap_or(if self.region.is_empty() {
            TargetCfg::Omega
        } else {
            TargetCfg::Region
        })
    }

    pub fn domain(&self) -> Result<RectDomain> {
        Ok(RectDomain::new(self.domain.a1, self.domain.a2)?)
    }

    pub fn basis(&self) -> Result<Arc<ModalBasis>> {
        Ok(ModalBasis::new(
            self.domain()?,
            self.bc.into(),
            self.truncation.n_max,
            self.truncation.m_max,
        )?)
    }

    /// Builds every core object; geometry errors name the offending entry.
    pub fn resolve(&self) -> Result<Resolved> {
        let basis = self.basis()?;
        let domain = *basis.domain();
        let rule = QuadratureRule::gauss_legendre(
            gradobs_core::quadrature::DEFAULT_BOUNDARY_NODES.max(basis.min_quadrature_order()),
        )?;

        let sensors = self
            .sensors
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let spec = s.build(&domain).map_err(|e| e.context(&format!("sensors[{i}]")))?;
                spec.validate(&domain, basis.bc())
                    .map_err(|e| CliError::from(e).context(&format!("sensors[{i}]")))?;
                Ok(spec)
            })
            .collect::<Result<Vec<_>>>()?;

        let region = if self.region.is_empty() {
            None
        } else {
            let segs = self
                .region
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    if s.profile.is_some() {
                        return Err(CliError::Config(format!(
                            "region[{i}]: profiles are not used on the target region"
                        )));
                    }
                    s.build(&domain).map_err(|e| e.context(&format!("region[{i}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(BoundaryRegion::new(domain, segs).map_err(|e| CliError::from(e).context("region"))?)
        };

        let x0 = self.field(&basis, &self.x0, &rule).map_err(|e| e.context("x0"))?;
        let z0 = self.field(&basis, &self.z0, &rule).map_err(|e| e.context("z0"))?;
        let mut system = SystemSpec::new(&basis)
            .with_reaction(self.reaction)?
            .with_initial_state(x0)?;
        if !self.inputs.is_empty() {
            let actuators = self
                .inputs
                .iter()
                .enumerate()
                .map(|(i, inp)| {
                    inp.actuator
                        .build(&domain)
                        .map_err(|e| e.context(&format!("inputs[{i}]")))
                })
                .collect::<Result<Vec<_>>>()?;
            let b: DMatrix<f64> =
                actuator_input_map(&actuators, &basis, &rule).map_err(|e| CliError::from(e).context("inputs"))?;
            system = system.with_input(b, self.inputs.iter().map(|i| i.signal.into()).collect())?;
        }
        Ok(Resolved {
            basis,
            sensors,
            region,
            system,
            z0,
            rule,
        })
    }

    fn field(&self, basis: &Arc<ModalBasis>, terms: &[FieldTermCfg], rule: &QuadratureRule) -> Result<ModalField> {
        let mut coeffs = DVector::zeros(basis.len());
        for (i, t) in terms.iter().enumerate() {
            if let Some(p) = &t.profile {
                let profile = p.build()?;
                let d = *basis.domain();
                coeffs += basis.project(|q| profile.eval(q, &d), rule)?.coeffs();
            } else if let (Some([n, m]), Some(v)) = (t.mode, t.value) {
                let k = basis
                    .index_of(Mode::new(n, m))
                    .ok_or_else(|| CliError::Config(format!("term {i}: mode ({n}, {m}) is not in the basis")))?;
                coeffs[k] += v;
            }
        }
        Ok(ModalField::from_coeffs(basis, coeffs)?)
    }
}
