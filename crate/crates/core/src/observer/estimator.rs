use nalgebra::{DMatrix, DVector};

use crate::basis::ModalField;
use crate::error::{Error, Result};
use crate::sensing::OutputMap;

/// Entrywise tolerance on `M C + N = I`.
pub const COMBINER_TOL: f64 = 1e-12;

/// Estimator `x_hat = M y + N z`, valid only when `M C + N = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorCombiner {
    m: DMatrix<f64>,
    n: DMatrix<f64>,
}

impl EstimatorCombiner {
    pub fn new(m: DMatrix<f64>, n: DMatrix<f64>, output: &OutputMap) -> Result<Self> {
        let modes = output.basis().len();
        if m.shape() != (modes, output.q()) || n.shape() != (modes, modes) {
            return Err(Error::DimensionMismatch(format!(
                "combiner M is {:?}, N is {:?}; expected ({modes}, {}) and ({modes}, {modes})",
                m.shape(),
                n.shape(),
                output.q()
            )));
        }
        let deviation = (&m * output.matrix() + &n - DMatrix::<f64>::identity(modes, modes)).amax();
        if deviation > COMBINER_TOL {
            return Err(Error::InvalidCombiner(deviation));
        }
        Ok(Self { m, n })
    }

    /// `M = 0`, `N = I`: the estimate is the observer state itself.
    pub fn observer_only(output: &OutputMap) -> Self {
        let modes = output.basis().len();
        Self {
            m: DMatrix::zeros(modes, output.q()),
            n: DMatrix::identity(modes, modes),
        }
    }

    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn n(&self) -> &DMatrix<f64> {
        &self.n
    }

    pub fn estimate(&self, y: &DVector<f64>, z: &ModalField) -> Result<ModalField> {
        if y.len() != self.m.ncols() || z.coeffs().len() != self.n.ncols() {
            return Err(Error::DimensionMismatch(
                "estimator inputs do not match the combiner".into(),
            ));
        }
        ModalField::from_coeffs(z.basis(), &self.m * y + &self.n * z.coeffs())
    }
}

/// `x_hat = M y + N z`.
pub fn estimator_output(comb: &EstimatorCombiner, y: &DVector<f64>, z: &ModalField) -> Result<ModalField> {
    comb.estimate(y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ModalBasis;
    use crate::domain::{BcFamily, RectDomain};
    use crate::quadrature::QuadratureRule;
    use crate::sensing::{assemble_output_map, SensorSpec};

    fn output() -> OutputMap {
        let b = ModalBasis::new(RectDomain::unit_square(), BcFamily::NeumannCosine, 3, 3).unwrap();
        let rule = QuadratureRule::gauss_legendre(8).unwrap();
        assemble_output_map(
            &[
                SensorSpec::Pointwise { location: [0.2, 0.7] },
                SensorSpec::Pointwise { location: [0.6, 0.1] },
            ],
            &b,
            &rule,
        )
        .unwrap()
    }

    #[test]
    fn observer_only_returns_z() {
        let out = output();
        let comb = EstimatorCombiner::observer_only(&out);
        let z = ModalField::from_coeffs(out.basis(), DVector::from_fn(out.basis().len(), |i, _| i as f64)).unwrap();
        let y = DVector::from_vec(vec![3.0, -1.0]);
        assert_eq!(estimator_output(&comb, &y, &z).unwrap().coeffs(), z.coeffs());
    }

    #[test]
    fn valid_combiner_reproduces_true_state() {
        let out = output();
        let modes = out.basis().len();
        let m = DMatrix::from_fn(modes, 2, |i, j| ((i + 2 * j) as f64 * 0.37).sin());
        let n = DMatrix::identity(modes, modes) - &m * out.matrix();
        let comb = EstimatorCombiner::new(m, n, &out).unwrap();
        let x = ModalField::from_coeffs(out.basis(), DVector::from_fn(modes, |i, _| (i as f64).cos())).unwrap();
        let y = out.output(&x).unwrap();
        let xh = comb.estimate(&y, &x).unwrap();
        assert!((xh.coeffs() - x.coeffs()).amax() < 1e-12);
    }

    #[test]
    fn invalid_combiner_rejected() {
        let out = output();
        let modes = out.basis().len();
        let m = DMatrix::from_element(modes, 2, 0.1);
        let n = DMatrix::identity(modes, modes);
        assert!(matches!(
            EstimatorCombiner::new(m, n, &out),
            Err(Error::InvalidCombiner(_))
        ));
    }
}
