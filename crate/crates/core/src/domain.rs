//! Rectangle geometry, boundary-condition families and mode indices.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Slack used when deciding whether a point lies on the closed rectangle.
pub(crate) const GEOMETRY_EPS: f64 = 1e-12;

/// The open rectangle `]0, a1[ x ]0, a2[`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectDomain {
    a1: f64,
    a2: f64,
}

impl RectDomain {
    pub fn new(a1: f64, a2: f64) -> Result<Self> {
        if !(a1.is_finite() && a2.is_finite() && a1 > 0.0 && a2 > 0.0) {
            return Err(Error::InvalidDomain { a1, a2 });
        }
        Ok(Self { a1, a2 })
    }

    pub fn unit_square() -> Self {
        Self { a1: 1.0, a2: 1.0 }
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn area(&self) -> f64 {
        self.a1 * self.a2
    }

    /// True if `p` is in the closed rectangle (with a tiny tolerance).
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= -GEOMETRY_EPS
            && p[0] <= self.a1 + GEOMETRY_EPS
            && p[1] >= -GEOMETRY_EPS
            && p[1] <= self.a2 + GEOMETRY_EPS
    }

    /// True if `p` is strictly inside, away from every side by more than the tolerance.
    pub fn contains_interior(&self, p: [f64; 2]) -> bool {
        p[0] > GEOMETRY_EPS && p[0] < self.a1 - GEOMETRY_EPS && p[1] > GEOMETRY_EPS && p[1] < self.a2 - GEOMETRY_EPS
    }

    pub fn check_point(&self, p: [f64; 2]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain { x: p[0], y: p[1] })
        }
    }
}

/// Boundary-condition family of the Laplacian eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BcFamily {
    /// Zero normal derivative; cosine eigenfunctions, indices from 0.
    NeumannCosine,
    /// Zero trace; sine eigenfunctions, indices from 1.
    DirichletSine,
}

impl BcFamily {
    pub fn name(self) -> &'static str {
        match self {
            BcFamily::NeumannCosine => "neumann",
            BcFamily::DirichletSine => "dirichlet",
        }
    }

    /// Smallest admissible index along either axis.
    pub fn min_index(self) -> usize {
        match self {
            BcFamily::NeumannCosine => 0,
            BcFamily::DirichletSine => 1,
        }
    }

    pub fn admits(self, mode: Mode) -> bool {
        mode.n >= self.min_index() && mode.m >= self.min_index()
    }
}

impl fmt::Display for BcFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index pair `(n, m)` of a separable eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub n: usize,
    pub m: usize,
}

impl Mode {
    pub const fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Laplacian eigenvalue `-(n^2/a1^2 + m^2/a2^2) pi^2` of `mode`.
pub fn eigenvalue(mode: Mode, domain: &RectDomain, family: BcFamily) -> Result<f64> {
    if !family.admits(mode) {
        return Err(Error::InvalidMode {
            mode,
            family: family.name(),
        });
    }
    Ok(raw_eigenvalue(mode, domain))
}

pub(crate) fn raw_eigenvalue(mode: Mode, domain: &RectDomain) -> f64 {
    let n = mode.n as f64;
    let m = mode.m as f64;
    -(n * n / (domain.a1 * domain.a1) + m * m / (domain.a2 * domain.a2)) * PI * PI
}
