//! Gauss–Legendre rules on intervals and tensor-product rules on rectangles.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default number of nodes per axis for interior integrals.
pub const DEFAULT_AREA_NODES: usize = 32;
/// Default number of nodes per boundary segment.
pub const DEFAULT_BOUNDARY_NODES: usize = 64;

/// An `order`-point Gauss–Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::EmptyQuadrature);
        }
        let (nodes, weights) = gauss_legendre_nodes(order);
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn reference_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn reference_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped affinely onto `[lo, hi]`.
    pub fn on_interval(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        self.on_interval(lo, hi).map(|(x, w)| w * f(x)).sum()
    }

    /// Tensor-product nodes `([x, y], w)` over `[x0, x1] x [y0, y1]`.
    pub fn tensor(&self, x: (f64, f64), y: (f64, f64)) -> Vec<([f64; 2], f64)> {
        let xs: Vec<_> = self.on_interval(x.0, x.1).collect();
        let ys: Vec<_> = self.on_interval(y.0, y.1).collect();
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &(px, wx) in &xs {
            for &(py, wy) in &ys {
                out.push(([px, py], wx * wy));
            }
        }
        out
    }

    pub fn integrate_rect<F: Fn([f64; 2]) -> f64>(&self, x: (f64, f64), y: (f64, f64), f: F) -> f64 {
        self.tensor(x, y).into_iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
