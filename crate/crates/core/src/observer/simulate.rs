use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::design::GainMap;
use super::system::SystemSpec;
use crate::basis::{ModalBasis, ModalField};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::sensing::OutputMap;
use crate::trace::TraceOperator;

/// Gauss–Legendre nodes per panel for the input convolution.
const CONVOLUTION_NODES: usize = 8;
/// Panels are sized so that `|lambda| * panel` stays below this for every mode.
const CONVOLUTION_STIFFNESS: f64 = 2.0;

/// Sampled plant, observer and error trajectories.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub state: Vec<ModalField>,
    pub observer: Vec<ModalField>,
    pub error: Vec<ModalField>,
    /// Boundary-gradient norm of the error on the target region.
    pub gamma_error_norm: Vec<f64>,
    /// H¹ norm of the error.
    pub omega_error_norm: Vec<f64>,
}

impl TrajectoryRecord {
    /// Boundary-gradient error norms on another region.
    pub fn error_norms_on(&self, op: &TraceOperator) -> Vec<f64> {
        self.error.iter().map(|e| op.norm(e.coeffs())).collect()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Output instants `k * dt_out` for `k = 0..=floor(t_end / dt_out)`.
pub fn output_times(t_end: f64, dt_out: f64) -> Result<Vec<f64>> {
    if !(dt_out > 0.0 && dt_out.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "output step must be positive, got {dt_out}"
        )));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::NegativeTime(t_end));
    }
    let steps = (t_end / dt_out + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt_out).collect())
}

/// Exact one-step propagator of the error dynamics `e' = (Lambda - H C) e`.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    step: DMatrix<f64>,
    dt: f64,
}

impl ClosedLoop {
    /// Builds `expm((Lambda - H C) dt)`. Rows without injection are decoupled, so they are set to
    /// the exact scalar exponential instead of the numerically computed row.
    pub fn new(eigenvalues: &[f64], c: &DMatrix<f64>, h: &DMatrix<f64>, dt: f64) -> Result<Self> {
        let n = eigenvalues.len();
        if c.ncols() != n || h.nrows() != n || h.ncols() != c.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "closed loop with {n} modes, C {}x{}, H {}x{}",
                c.nrows(),
                c.ncols(),
                h.nrows(),
                h.ncols()
            )));
        }
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues)) - h * c;
        let mut step = (m * dt).exp();
        for i in 0..n {
            if h.row(i).iter().all(|&v| v == 0.0) {
                step.row_mut(i).fill(0.0);
                step[(i, i)] = (eigenvalues[i] * dt).exp();
            }
        }
        Ok(Self { step, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_matrix(&self) -> &DMatrix<f64> {
        &self.step
    }

    pub fn advance(&self, e: &DVector<f64>) -> DVector<f64> {
        &self.step * e
    }
}

fn check_field(basis: &Arc<ModalBasis>, f: &ModalField) -> Result<()> {
    if f.basis() != basis {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

fn check_loop(sys: &SystemSpec, output: &OutputMap, gain: &GainMap) -> Result<()> {
    if output.basis() != sys.basis() {
        return Err(Error::DomainMismatch);
    }
    let h = gain.matrix();
    if h.nrows() != sys.basis().len() || h.ncols() != output.q() {
        return Err(Error::DimensionMismatch(format!(
            "gain is {}x{}, expected {}x{}",
            h.nrows(),
            h.ncols(),
            sys.basis().len(),
            output.q()
        )));
    }
    Ok(())
}

/// Simulates plant and observer on the truncation.
///
/// The plant uses exact modal exponentials plus a composite Gauss–Legendre input convolution
/// per step (panels short enough to resolve the fastest mode); the
/// error uses the exact closed-loop exponential; the observer is reconstructed as `x + e`.
pub fn simulate_coupled(
    sys: &SystemSpec,
    output: &OutputMap,
    gain: &GainMap,
    z0: &ModalField,
    t_end: f64,
    dt_out: f64,
    gamma: &TraceOperator,
) -> Result<TrajectoryRecord> {
    check_loop(sys, output, gain)?;
    check_field(sys.basis(), z0)?;
    let times = output_times(t_end, dt_out)?;
    let basis = sys.basis();
    let lam = sys.eigenvalues();
    let closed = ClosedLoop::new(&lam, output.matrix(), gain.matrix(), dt_out)?;
    let decay = DVector::from_iterator(lam.len(), lam.iter().map(|l| (l * dt_out).exp()));
    let conv_rule = QuadratureRule::gauss_legendre(CONVOLUTION_NODES)?;
    let lam_abs = lam.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let panels = ((lam_abs * dt_out / CONVOLUTION_STIFFNESS).ceil() as usize).max(1);
    let panel = dt_out / panels as f64;

    let mut x = sys.x0().coeffs().clone();
    let mut e = z0.coeffs() - &x;
    let mut rec = TrajectoryRecord {
        times: Vec::with_capacity(times.len()),
        state: Vec::with_capacity(times.len()),
        observer: Vec::with_capacity(times.len()),
        error: Vec::with_capacity(times.len()),
        gamma_error_norm: Vec::with_capacity(times.len()),
        omega_error_norm: Vec::with_capacity(times.len()),
    };
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            let t_prev = times[k - 1];
            let mut next = x.component_mul(&decay);
            if let Some(act) = sys.actuation() {
                for p in 0..panels {
                    let lo = p as f64 * panel;
                    for (s, w) in conv_rule.on_interval(lo, lo + panel) {
                        let f = act.forcing(t_prev + s);
                        for i in 0..next.len() {
                            next[i] += w * (lam[i] * (dt_out - s)).exp() * f[i];
                        }
                    }
                }
            }
            x = next;
            e = closed.advance(&e);
        }
        let z = &x + &e;
        debug_assert!(((&z - &x) - &e).amax() <= 1e-12 * (1.0 + x.amax() + e.amax()));
        rec.times.push(t);
        rec.gamma_error_norm.push(gamma.norm(&e));
        rec.omega_error_norm.push(e.norm());
        rec.state.push(ModalField::from_coeffs(basis, x.clone())?);
        rec.observer.push(ModalField::from_coeffs(basis, z)?);
        rec.error.push(ModalField::from_coeffs(basis, e.clone())?);
    }
    Ok(rec)
}

/// Integrates plant and observer directly with a fixed-step integrating-factor (Lawson)
/// fourth-order Runge–Kutta scheme and returns `z - x` at the output instants.
///
/// The diagonal generator is applied exactly through `exp(Lambda h)`; the stages treat the
/// forcing `B u` and the injection `H (C x - C z)`.
pub fn integrate_observer_rk4(
    sys: &SystemSpec,
    output: &OutputMap,
    gain: &GainMap,
    z0: &ModalField,
    t_end: f64,
    h: f64,
    dt_out: f64,
) -> Result<Vec<DVector<f64>>> {
    check_loop(sys, output, gain)?;
    check_field(sys.basis(), z0)?;
    let times = output_times(t_end, dt_out)?;
    if !(h > 0.0 && h <= dt_out) {
        return Err(Error::InvalidParameter(format!("step {h} must lie in (0, {dt_out}]")));
    }
    let sub = (dt_out / h).round() as usize;
    if (sub as f64 * h - dt_out).abs() > 1e-12 * dt_out.max(1.0) {
        return Err(Error::InvalidParameter(
            "output step must be a multiple of the integration step".into(),
        ));
    }

    let lam = sys.eigenvalues();
    let n = lam.len();
    let hc = gain.matrix() * output.matrix();
    let full = DVector::from_iterator(n, lam.iter().map(|l| (l * h).exp()));
    let half = DVector::from_iterator(n, lam.iter().map(|l| (0.5 * l * h).exp()));
    let prop = |v: &DVector<f64>, f: &DVector<f64>| DVector::from_iterator(2 * n, (0..2 * n).map(|i| v[i] * f[i % n]));
    let rhs = |t: f64, v: &DVector<f64>| {
        let (x, z) = (v.rows(0, n), v.rows(n, n));
        let inj = &hc * (x - z);
        let f = sys
            .actuation()
            .map(|a| a.forcing(t))
            .unwrap_or_else(|| DVector::zeros(n));
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&f);
        out.rows_mut(n, n).copy_from(&(f + inj));
        out
    };

    let mut v = DVector::zeros(2 * n);
    v.rows_mut(0, n).copy_from(sys.x0().coeffs());
    v.rows_mut(n, n).copy_from(z0.coeffs());
    let mut out = Vec::with_capacity(times.len());
    let mut step = 0usize;
    for k in 0..times.len() {
        if k > 0 {
            for _ in 0..sub {
                let t = step as f64 * h;
                let k1 = rhs(t, &v);
                let k2 = rhs(t + 0.5 * h, &prop(&(&v + &k1 * (0.5 * h)), &half));
                let k3 = rhs(t + 0.5 * h, &(prop(&v, &half) + &k2 * (0.5 * h)));
                let k4 = rhs(t + h, &(prop(&v, &full) + prop(&k3, &half) * h));
                v = prop(&v, &full) + (prop(&k1, &full) + prop(&(k2 + k3), &half) * 2.0 + k4) * (h / 6.0);
                step += 1;
            }
        }
        out.push(v.rows(n, n) - v.rows(0, n));
    }
    Ok(out)
}
