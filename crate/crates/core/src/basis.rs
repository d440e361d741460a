//! Truncated, H¹-orthonormal Laplacian eigenbasis on a rectangle and fields expanded in it.
//!
//! Modes are ordered lexicographically in `(n, m)`. Basis functions are
//!
//! ```text
//! phi_nm(x, y) = kappa_nm * t(n pi x / a1) * t(m pi y / a2)
//! ```
//!
//! with `t = cos` (Neumann) or `t = sin` (Dirichlet) and `kappa_nm` chosen so that
//! `||phi_nm||_{H1}^2 = ||phi_nm||_{L2}^2 + ||grad phi_nm||_{L2}^2 = 1`. Since
//! `||grad phi||^2 = -lambda ||phi||^2` for both families, this gives
//! `kappa_nm = (a1 a2 c_n c_m (1 - lambda_nm))^{-1/2}` with `c_0 = 1`, `c_k = 1/2`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::DVector;

use crate::domain::{raw_eigenvalue, BcFamily, Mode, RectDomain};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// Default truncation per axis.
pub const DEFAULT_TRUNCATION: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ModalBasis {
    domain: RectDomain,
    bc: BcFamily,
    n_max: usize,
    m_max: usize,
    modes: Vec<Mode>,
    eigenvalues: Vec<f64>,
    kappa: Vec<f64>,
}

impl ModalBasis {
    pub fn new(domain: RectDomain, bc: BcFamily, n_max: usize, m_max: usize) -> Result<Arc<Self>> {
        if n_max == 0 || m_max == 0 {
            return Err(Error::InvalidTruncation { n_max, m_max });
        }
        let lo = bc.min_index();
        let modes: Vec<Mode> = (lo..=n_max)
            .flat_map(|n| (lo..=m_max).map(move |m| Mode::new(n, m)))
            .collect();
        let eigenvalues: Vec<f64> = modes.iter().map(|&md| raw_eigenvalue(md, &domain)).collect();
        let kappa = modes
            .iter()
            .zip(&eigenvalues)
            .map(|(md, &lam)| {
                let c = |k: usize| if k == 0 { 1.0 } else { 0.5 };
                1.0 / (domain.area() * c(md.n) * c(md.m) * (1.0 - lam)).sqrt()
            })
            .collect();
        Ok(Arc::new(Self {
            domain,
            bc,
            n_max,
            m_max,
            modes,
            eigenvalues,
            kappa,
        }))
    }

    pub fn domain(&self) -> &RectDomain {
        &self.domain
    }

    pub fn bc(&self) -> BcFamily {
        self.bc
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn index_of(&self, mode: Mode) -> Option<usize> {
        let lo = self.bc.min_index();
        if mode.n < lo || mode.m < lo || mode.n > self.n_max || mode.m > self.m_max {
            return None;
        }
        Some((mode.n - lo) * (self.m_max + 1 - lo) + (mode.m - lo))
    }

    pub fn require_index(&self, mode: Mode) -> Result<usize> {
        if !self.bc.admits(mode) {
            return Err(Error::InvalidMode {
                mode,
                family: self.bc.name(),
            });
        }
        self.index_of(mode).ok_or(Error::ModeNotInBasis(mode))
    }

    /// H¹ normalization constant of mode `k`.
    pub fn normalization(&self, k: usize) -> f64 {
        self.kappa[k]
    }

    /// Minimum Gauss–Legendre nodes per axis accepted by [`project`](Self::project).
    pub fn min_quadrature_order(&self) -> usize {
        2 * self.n_max.max(self.m_max) + 2
    }

    fn trig(&self, k: usize, s: f64, len: f64) -> (f64, f64) {
        let w = k as f64 * PI / len;
        let (sin, cos) = (w * s).sin_cos();
        match self.bc {
            BcFamily::NeumannCosine => (cos, -w * sin),
            BcFamily::DirichletSine => (sin, w * cos),
        }
    }

    pub(crate) fn value_unchecked(&self, k: usize, p: [f64; 2]) -> f64 {
        let md = self.modes[k];
        let (fx, _) = self.trig(md.n, p[0], self.domain.a1());
        let (fy, _) = self.trig(md.m, p[1], self.domain.a2());
        self.kappa[k] * fx * fy
    }

    pub(crate) fn gradient_unchecked(&self, k: usize, p: [f64; 2]) -> [f64; 2] {
        let md = self.modes[k];
        let (fx, dfx) = self.trig(md.n, p[0], self.domain.a1());
        let (fy, dfy) = self.trig(md.m, p[1], self.domain.a2());
        [self.kappa[k] * dfx * fy, self.kappa[k] * fx * dfy]
    }

    /// Values of every basis function at `p`, in mode order.
    pub(crate) fn values_at(&self, p: [f64; 2]) -> DVector<f64> {
        DVector::from_iterator(self.len(), (0..self.len()).map(|k| self.value_unchecked(k, p)))
    }

    /// Gradients of every basis function at `p`, as two vectors in mode order.
    pub(crate) fn gradients_at(&self, p: [f64; 2]) -> (DVector<f64>, DVector<f64>) {
        let mut gx = DVector::zeros(self.len());
        let mut gy = DVector::zeros(self.len());
        for k in 0..self.len() {
            let g = self.gradient_unchecked(k, p);
            gx[k] = g[0];
            gy[k] = g[1];
        }
        (gx, gy)
    }

    pub fn eigenfunction_eval(&self, mode: Mode, p: [f64; 2]) -> Result<f64> {
        let k = self.require_index(mode)?;
        self.domain.check_point(p)?;
        Ok(self.value_unchecked(k, p))
    }

    pub fn grad_eigenfunction_eval(&self, mode: Mode, p: [f64; 2]) -> Result<[f64; 2]> {
        let k = self.require_index(mode)?;
        self.domain.check_point(p)?;
        Ok(self.gradient_unchecked(k, p))
    }

    /// Expands `profile` in the basis by tensor-product quadrature.
    ///
    /// The H¹ inner product is evaluated as `(1 - lambda) <f, phi>_{L2}`, which follows from
    /// integrating the gradient term by parts. It is exact for the Neumann family and for
    /// Dirichlet profiles that vanish on the boundary.
    pub fn project<F>(self: &Arc<Self>, profile: F, rule: &QuadratureRule) -> Result<ModalField>
    where
        F: Fn([f64; 2]) -> f64,
    {
        let minimum = self.min_quadrature_order();
        if rule.order() < minimum {
            return Err(Error::QuadratureTooCoarse {
                nodes: rule.order(),
                minimum,
            });
        }
        let mut coeffs = DVector::zeros(self.len());
        for (p, w) in rule.tensor((0.0, self.domain.a1()), (0.0, self.domain.a2())) {
            let f = profile(p);
            if f == 0.0 {
                continue;
            }
            coeffs.axpy(w * f, &self.values_at(p), 1.0);
        }
        for (c, &lam) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= 1.0 - lam;
        }
        Ok(ModalField {
            basis: Arc::clone(self),
            coeffs,
        })
    }
}

/// Coefficient vector over a [`ModalBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    basis: Arc<ModalBasis>,
    coeffs: DVector<f64>,
}

impl ModalField {
    pub fn zeros(basis: &Arc<ModalBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: DVector::zeros(basis.len()),
        }
    }

    pub fn from_coeffs(basis: &Arc<ModalBasis>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a basis of {} modes",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    /// Unit coefficient at `mode`.
    pub fn unit(basis: &Arc<ModalBasis>, mode: Mode) -> Result<Self> {
        let k = basis.require_index(mode)?;
        let mut f = Self::zeros(basis);
        f.coeffs[k] = 1.0;
        Ok(f)
    }

    pub fn basis(&self) -> &Arc<ModalBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn coeff(&self, mode: Mode) -> Option<f64> {
        self.basis.index_of(mode).map(|k| self.coeffs[k])
    }

    pub fn set_coeff(&mut self, mode: Mode, value: f64) -> Result<()> {
        let k = self.basis.require_index(mode)?;
        self.coeffs[k] = value;
        Ok(())
    }

    pub fn same_basis(&self, other: &ModalField) -> bool {
        Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis
    }

    pub fn eval(&self, p: [f64; 2]) -> Result<f64> {
        self.basis.domain.check_point(p)?;
        Ok(self.basis.values_at(p).dot(&self.coeffs))
    }

    pub fn gradient(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        self.basis.domain.check_point(p)?;
        Ok(self.gradient_unchecked(p))
    }

    pub(crate) fn gradient_unchecked(&self, p: [f64; 2]) -> [f64; 2] {
        let (gx, gy) = self.basis.gradients_at(p);
        [gx.dot(&self.coeffs), gy.dot(&self.coeffs)]
    }

    /// H¹(Ω) norm; the basis is orthonormal so this is the Euclidean coefficient norm.
    pub fn h1_norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Applies the heat semigroup: each coefficient is multiplied by `exp(lambda t)`.
    pub fn propagate(&self, t: f64) -> Result<ModalField> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let coeffs = DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs
                .iter()
                .zip(&self.basis.eigenvalues)
                .map(|(&c, &lam)| c * (lam * t).exp()),
        );
        Ok(ModalField {
            basis: Arc::clone(&self.basis),
            coeffs,
        })
    }

    /// Applies the Laplacian (diagonal in this basis).
    pub fn laplacian(&self) -> ModalField {
        let coeffs = self
            .coeffs
            .component_mul(&DVector::from_column_slice(&self.basis.eigenvalues));
        ModalField {
            basis: Arc::clone(&self.basis),
            coeffs,
        }
    }
}

fn assert_same(a: &ModalField, b: &ModalField) {
    assert!(a.same_basis(b), "modal fields over different bases");
}

impl Add for &ModalField {
    type Output = ModalField;

    fn add(self, rhs: &ModalField) -> ModalField {
        assert_same(self, rhs);
        ModalField {
            basis: Arc::clone(&self.basis),
            coeffs: &self.coeffs + &rhs.coeffs,
        }
    }
}

impl Sub for &ModalField {
    type Output = ModalField;

    fn sub(self, rhs: &ModalField) -> ModalField {
        assert_same(self, rhs);
        ModalField {
            basis: Arc::clone(&self.basis),
            coeffs: &self.coeffs - &rhs.coeffs,
        }
    }
}

impl Mul<&ModalField> for f64 {
    type Output = ModalField;

    fn mul(self, rhs: &ModalField) -> ModalField {
        ModalField {
            basis: Arc::clone(&rhs.basis),
            coeffs: &rhs.coeffs * self,
        }
    }
}
