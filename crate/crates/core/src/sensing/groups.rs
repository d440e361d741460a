use crate::basis::ModalBasis;
use crate::domain::Mode;
use crate::error::{Error, Result};

/// Default absolute tolerance for merging eigenvalues into one group.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;

/// One distinct eigenvalue with the basis modes that share it.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueGroup {
    pub eigenvalue: f64,
    pub modes: Vec<Mode>,
    /// Positions of `modes` in the basis ordering.
    pub indices: Vec<usize>,
}

impl EigenvalueGroup {
    pub fn multiplicity(&self) -> usize {
        self.modes.len()
    }

    /// The members satisfying `keep`, or `None` when no member does.
    pub fn restricted<F: Fn(Mode) -> bool>(&self, keep: F) -> Option<EigenvalueGroup> {
        let (indices, modes): (Vec<usize>, Vec<Mode>) = self
            .indices
            .iter()
            .zip(&self.modes)
            .filter(|(_, &m)| keep(m))
            .map(|(&k, &m)| (k, m))
            .unzip();
        (!modes.is_empty()).then_some(EigenvalueGroup {
            eigenvalue: self.eigenvalue,
            modes,
            indices,
        })
    }
}

/// All eigenvalue groups of the basis, from the largest (least negative) eigenvalue downwards.
///
/// Eigenvalues are merged when they lie within `tol` of the first member of the group; members
/// keep the lexicographic basis order.
pub fn all_groups(basis: &ModalBasis, tol: f64) -> Vec<EigenvalueGroup> {
    let lam = basis.eigenvalues();
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&i, &j| lam[j].total_cmp(&lam[i]).then(i.cmp(&j)));
    let mut groups: Vec<EigenvalueGroup> = Vec::new();
    for k in order {
        match groups.last_mut() {
            Some(g) if (lam[k] - g.eigenvalue).abs() < tol => {
                g.modes.push(basis.modes()[k]);
                g.indices.push(k);
            }
            _ => groups.push(EigenvalueGroup {
                eigenvalue: lam[k],
                modes: vec![basis.modes()[k]],
                indices: vec![k],
            }),
        }
    }
    for g in &mut groups {
        let mut pairs: Vec<(usize, Mode)> = g.indices.iter().copied().zip(g.modes.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        g.indices = pairs.iter().map(|p| p.0).collect();
        g.modes = pairs.iter().map(|p| p.1).collect();
    }
    groups
}

/// The first `j` eigenvalue groups.
pub fn group_eigenvalues(basis: &ModalBasis, j: usize, tol: f64) -> Result<Vec<EigenvalueGroup>> {
    if j == 0 {
        return Err(Error::InvalidParameter("number of groups must be positive".into()));
    }
    let mut groups = all_groups(basis, tol);
    if groups.len() < j {
        return Err(Error::TooFewGroups {
            requested: j,
            available: groups.len(),
        });
    }
    groups.truncate(j);
    Ok(groups)
}
