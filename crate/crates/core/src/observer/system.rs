use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::{ModalBasis, ModalField};
use crate::domain::Mode;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::sensing::{assemble_output_map, SensorSpec};

/// Scalar control signal `u_i(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Zero,
    Constant(f64),
    /// `amplitude * sin(2 pi frequency t + phase)`.
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `amplitude * exp(rate t)`.
    Exponential {
        amplitude: f64,
        rate: f64,
    },
}

impl Signal {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Signal::Zero => 0.0,
            Signal::Constant(c) => c,
            Signal::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin(),
            Signal::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
        }
    }
}

/// Input map `B` (modes x p) with its control signals.
#[derive(Debug, Clone, PartialEq)]
pub struct Actuation {
    b: DMatrix<f64>,
    signals: Vec<Signal>,
}

impl Actuation {
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    /// `B u(t)`.
    pub fn forcing(&self, t: f64) -> DVector<f64> {
        let u = DVector::from_iterator(self.signals.len(), self.signals.iter().map(|s| s.eval(t)));
        &self.b * u
    }

    fn is_zero(&self) -> bool {
        self.b.iter().all(|&v| v == 0.0) || self.signals.iter().all(|s| *s == Signal::Zero)
    }
}

/// Builds `B` from actuator geometries: column `i` holds the modal coefficients of the `i`-th
/// actuator distribution, i.e. the same functionals used for sensing.
pub fn actuator_input_map(
    actuators: &[SensorSpec],
    basis: &Arc<ModalBasis>,
    rule: &QuadratureRule,
) -> Result<DMatrix<f64>> {
    Ok(assemble_output_map(actuators, basis, rule)?.matrix().transpose())
}

/// The truncated plant `x' = (A + c I) x + B u`, `x(0) = x0`.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    basis: Arc<ModalBasis>,
    reaction: f64,
    actuation: Option<Actuation>,
    x0: ModalField,
}

impl SystemSpec {
    /// Unforced plant with zero initial state and no reaction shift.
    pub fn new(basis: &Arc<ModalBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            reaction: 0.0,
            actuation: None,
            x0: ModalField::zeros(basis),
        }
    }

    /// Adds `c I` to the generator, shifting every eigenvalue by `c`.
    pub fn with_reaction(mut self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reaction shift must be finite, got {c}"
            )));
        }
        self.reaction = c;
        Ok(self)
    }

    pub fn with_initial_state(mut self, x0: ModalField) -> Result<Self> {
        if !Arc::ptr_eq(x0.basis(), &self.basis) && **x0.basis() != *self.basis {
            return Err(Error::DomainMismatch);
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn with_input(mut self, b: DMatrix<f64>, signals: Vec<Signal>) -> Result<Self> {
        if b.nrows() != self.basis.len() || b.ncols() != signals.len() {
            return Err(Error::DimensionMismatch(format!(
                "input map is {}x{}, expected {}x{}",
                b.nrows(),
                b.ncols(),
                self.basis.len(),
                signals.len()
            )));
        }
        self.actuation = Some(Actuation { b, signals });
        Ok(self)
    }

    pub fn basis(&self) -> &Arc<ModalBasis> {
        &self.basis
    }

    pub fn reaction(&self) -> f64 {
        self.reaction
    }

    pub fn x0(&self) -> &ModalField {
        &self.x0
    }

    /// The actuation, or `None` when `u` is identically zero.
    pub fn actuation(&self) -> Option<&Actuation> {
        self.actuation.as_ref().filter(|a| !a.is_zero())
    }

    /// Generator eigenvalues `lambda_k + c` in basis order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.basis.eigenvalues().iter().map(|l| l + self.reaction).collect()
    }
}

/// Partition of the basis into unstable (`lambda >= threshold`) and stable modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSplit {
    pub unstable: Vec<usize>,
    pub stable: Vec<usize>,
}

impl ModeSplit {
    pub fn unstable_modes(&self, basis: &ModalBasis) -> Vec<Mode> {
        self.unstable.iter().map(|&k| basis.modes()[k]).collect()
    }

    pub fn stable_modes(&self, basis: &ModalBasis) -> Vec<Mode> {
        self.stable.iter().map(|&k| basis.modes()[k]).collect()
    }
}

/// Splits the modes of the plant at `threshold`.
pub fn split_unstable(sys: &SystemSpec, threshold: f64) -> ModeSplit {
    let lam = sys.eigenvalues();
    let (unstable, stable) = lam.iter().enumerate().partition::<Vec<_>, _>(|(_, &l)| l >= threshold);
    ModeSplit {
        unstable: unstable.into_iter().map(|(k, _)| k).collect(),
        stable: stable.into_iter().map(|(k, _)| k).collect(),
    }
}
