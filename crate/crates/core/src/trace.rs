//! Boundary regions, gradient traces, restriction/extension and the adjoint gradient.
//!
//! The gradient of a truncated field is evaluated analytically at boundary quadrature nodes,
//! which realizes `chi_Gamma gamma grad` on the truncated space. Norms on a region are L²
//! quadrature norms of the traced 2-vector field.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::{ModalBasis, ModalField};
use crate::domain::{BcFamily, RectDomain, GEOMETRY_EPS};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;

/// One side of the rectangle. Arclength runs along `xi1` on bottom/top and `xi2` on left/right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Bottom, Side::Right, Side::Top, Side::Left];

    pub fn name(self) -> &'static str {
        match self {
            Side::Bottom => "bottom",
            Side::Right => "right",
            Side::Top => "top",
            Side::Left => "left",
        }
    }

    pub fn length(self, domain: &RectDomain) -> f64 {
        match self {
            Side::Bottom | Side::Top => domain.a1(),
            Side::Left | Side::Right => domain.a2(),
        }
    }

    /// Boundary point at arclength coordinate `s`.
    pub fn point(self, s: f64, domain: &RectDomain) -> [f64; 2] {
        match self {
            Side::Bottom => [s, 0.0],
            Side::Top => [s, domain.a2()],
            Side::Left => [0.0, s],
            Side::Right => [domain.a1(), s],
        }
    }

    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
        }
    }

    /// 0 if the side runs along `xi1`, 1 if along `xi2`.
    pub fn tangent_axis(self) -> usize {
        match self {
            Side::Bottom | Side::Top => 0,
            Side::Left | Side::Right => 1,
        }
    }

    /// Arclength coordinate of `p` if it lies on this side.
    pub fn coordinate_of(self, p: [f64; 2], domain: &RectDomain) -> Option<f64> {
        let on = match self {
            Side::Bottom => p[1].abs() <= GEOMETRY_EPS,
            Side::Top => (p[1] - domain.a2()).abs() <= GEOMETRY_EPS,
            Side::Left => p[0].abs() <= GEOMETRY_EPS,
            Side::Right => (p[0] - domain.a1()).abs() <= GEOMETRY_EPS,
        };
        let s = p[self.tangent_axis()];
        (on && s >= -GEOMETRY_EPS && s <= self.length(domain) + GEOMETRY_EPS).then_some(s)
    }
}

/// Interval `[lo, hi]` of arclength on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    side: Side,
    lo: f64,
    hi: f64,
}

impl BoundarySegment {
    pub fn new(side: Side, lo: f64, hi: f64, domain: &RectDomain) -> Result<Self> {
        let len = side.length(domain);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidSegment("non-finite endpoint".into()));
        }
        if lo < -GEOMETRY_EPS || hi > len + GEOMETRY_EPS {
            return Err(Error::InvalidSegment(format!(
                "[{lo}, {hi}] leaves side {} of length {len}",
                side.name()
            )));
        }
        if !(hi - lo > GEOMETRY_EPS) {
            return Err(Error::InvalidSegment(format!(
                "[{lo}, {hi}] on side {} has no length",
                side.name()
            )));
        }
        Ok(Self {
            side,
            lo: lo.max(0.0),
            hi: hi.min(len),
        })
    }

    /// The whole side.
    pub fn full(side: Side, domain: &RectDomain) -> Self {
        Self {
            side,
            lo: 0.0,
            hi: side.length(domain),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn same_as(&self, other: &BoundarySegment) -> bool {
        self.side == other.side
            && (self.lo - other.lo).abs() <= GEOMETRY_EPS
            && (self.hi - other.hi).abs() <= GEOMETRY_EPS
    }

    fn contains(&self, other: &BoundarySegment) -> bool {
        self.side == other.side && other.lo >= self.lo - GEOMETRY_EPS && other.hi <= self.hi + GEOMETRY_EPS
    }

    /// Quadrature nodes `(point, weight)` on this segment.
    pub fn nodes(&self, rule: &QuadratureRule, domain: &RectDomain) -> Vec<([f64; 2], f64)> {
        rule.on_interval(self.lo, self.hi)
            .map(|(s, w)| (self.side.point(s, domain), w))
            .collect()
    }
}

/// Nonempty union of pairwise non-overlapping boundary segments.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRegion {
    domain: RectDomain,
    segments: Vec<BoundarySegment>,
}

impl BoundaryRegion {
    pub fn new(domain: RectDomain, segments: Vec<BoundarySegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::EmptyRegion);
        }
        for side in Side::ALL {
            let mut on_side: Vec<_> = segments.iter().filter(|s| s.side == side).collect();
            on_side.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            if on_side.windows(2).any(|w| w[1].lo < w[0].hi - GEOMETRY_EPS) {
                return Err(Error::OverlappingSegments(side.name()));
            }
        }
        Ok(Self { domain, segments })
    }

    pub fn single(domain: RectDomain, segment: BoundarySegment) -> Self {
        Self {
            domain,
            segments: vec![segment],
        }
    }

    /// All of ∂Ω, one segment per side.
    pub fn full_boundary(domain: RectDomain) -> Self {
        Self {
            domain,
            segments: Side::ALL.iter().map(|&s| BoundarySegment::full(s, &domain)).collect(),
        }
    }

    pub fn domain(&self) -> &RectDomain {
        &self.domain
    }

    pub fn segments(&self) -> &[BoundarySegment] {
        &self.segments
    }

    /// Total arclength.
    pub fn measure(&self) -> f64 {
        self.segments.iter().map(BoundarySegment::length).sum()
    }

    /// True if every segment of `other` lies inside some segment of `self`.
    pub fn contains_region(&self, other: &BoundaryRegion) -> bool {
        other
            .segments
            .iter()
            .all(|o| self.segments.iter().any(|s| s.contains(o)))
    }

    /// A partition of ∂Ω that contains every segment of this region verbatim, plus the gaps.
    pub fn boundary_partition(&self) -> BoundaryRegion {
        let mut out = Vec::new();
        for side in Side::ALL {
            let len = side.length(&self.domain);
            let mut on_side: Vec<_> = self.segments.iter().filter(|s| s.side == side).copied().collect();
            on_side.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            let mut cursor = 0.0;
            for seg in on_side {
                if seg.lo - cursor > GEOMETRY_EPS {
                    out.push(BoundarySegment {
                        side,
                        lo: cursor,
                        hi: seg.lo,
                    });
                }
                cursor = seg.hi;
                out.push(seg);
            }
            if len - cursor > GEOMETRY_EPS {
                out.push(BoundarySegment {
                    side,
                    lo: cursor,
                    hi: len,
                });
            }
        }
        BoundaryRegion {
            domain: self.domain,
            segments: out,
        }
    }
}

/// Traced gradient values at the quadrature nodes of a region.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTraceField {
    region: BoundaryRegion,
    rule: QuadratureRule,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    values: Vec<[f64; 2]>,
}

impl BoundaryTraceField {
    fn layout(region: &BoundaryRegion, rule: &QuadratureRule) -> (Vec<[f64; 2]>, Vec<f64>) {
        region
            .segments
            .iter()
            .flat_map(|s| s.nodes(rule, &region.domain))
            .unzip()
    }

    /// Builds a field from explicit node values laid out segment by segment.
    pub fn from_values(region: BoundaryRegion, rule: &QuadratureRule, values: Vec<[f64; 2]>) -> Result<Self> {
        let (points, weights) = Self::layout(&region, rule);
        if values.len() != points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} boundary nodes",
                values.len(),
                points.len()
            )));
        }
        Ok(Self {
            region,
            rule: rule.clone(),
            points,
            weights,
            values,
        })
    }

    pub fn region(&self) -> &BoundaryRegion {
        &self.region
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }

    fn segment_block(&self, i: usize) -> std::ops::Range<usize> {
        let n = self.rule.order();
        i * n..(i + 1) * n
    }

    /// Quadrature inner product with another field on the same nodes.
    pub fn inner(&self, other: &BoundaryTraceField) -> Result<f64> {
        if self.region != other.region || self.rule != other.rule {
            return Err(Error::DomainMismatch);
        }
        Ok(self
            .weights
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * (a[0] * b[0] + a[1] * b[1]))
            .sum())
    }

    /// Restriction to a sub-region whose segments all appear verbatim in this field's region.
    pub fn restrict(&self, sub: &BoundaryRegion) -> Result<BoundaryTraceField> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut values = Vec::new();
        for seg in &sub.segments {
            let i = self
                .region
                .segments
                .iter()
                .position(|s| s.same_as(seg))
                .ok_or_else(|| Error::InvalidSegment("sub-region segment not in the trace region".into()))?;
            let r = self.segment_block(i);
            points.extend_from_slice(&self.points[r.clone()]);
            weights.extend_from_slice(&self.weights[r.clone()]);
            values.extend_from_slice(&self.values[r]);
        }
        Ok(BoundaryTraceField {
            region: sub.clone(),
            rule: self.rule.clone(),
            points,
            weights,
            values,
        })
    }
}

/// Gradient of `field` traced onto the quadrature nodes of `region`.
pub fn boundary_gradient_trace(
    field: &ModalField,
    region: &BoundaryRegion,
    rule: &QuadratureRule,
) -> Result<BoundaryTraceField> {
    if field.basis().domain() != region.domain() {
        return Err(Error::DomainMismatch);
    }
    let (points, weights) = BoundaryTraceField::layout(region, rule);
    let values = points.iter().map(|&p| field.gradient_unchecked(p)).collect();
    Ok(BoundaryTraceField {
        region: region.clone(),
        rule: rule.clone(),
        points,
        weights,
        values,
    })
}

/// L² quadrature norm `sqrt(sum_k w_k |v_k|^2)`.
pub fn trace_norm(tf: &BoundaryTraceField) -> f64 {
    tf.weights
        .iter()
        .zip(&tf.values)
        .map(|(w, v)| w * (v[0] * v[0] + v[1] * v[1]))
        .sum::<f64>()
        .sqrt()
}

/// Zero extension of `tf` onto `full`, which must contain each of `tf`'s segments verbatim.
pub fn extend_by_zero(tf: &BoundaryTraceField, full: &BoundaryRegion) -> Result<BoundaryTraceField> {
    if tf.region.domain != full.domain {
        return Err(Error::DomainMismatch);
    }
    let n = tf.rule.order();
    let mut values = vec![[0.0, 0.0]; full.segments.len() * n];
    for (i, seg) in tf.region.segments.iter().enumerate() {
        let j = full
            .segments
            .iter()
            .position(|s| s.same_as(seg))
            .ok_or_else(|| Error::InvalidSegment("segment missing from the extension target".into()))?;
        values[j * n..(j + 1) * n].copy_from_slice(&tf.values[tf.segment_block(i)]);
    }
    BoundaryTraceField::from_values(full.clone(), &tf.rule, values)
}

/// Precomputed gradient-trace evaluation on a region, as matrices over modal coefficients.
#[derive(Debug, Clone)]
pub struct TraceOperator {
    region: BoundaryRegion,
    weights: DVector<f64>,
    gx: DMatrix<f64>,
    gy: DMatrix<f64>,
}

impl TraceOperator {
    pub fn new(basis: &ModalBasis, region: &BoundaryRegion, rule: &QuadratureRule) -> Result<Self> {
        if basis.domain() != region.domain() {
            return Err(Error::DomainMismatch);
        }
        let (points, weights) = BoundaryTraceField::layout(region, rule);
        let mut gx = DMatrix::zeros(points.len(), basis.len());
        let mut gy = DMatrix::zeros(points.len(), basis.len());
        for (i, &p) in points.iter().enumerate() {
            let (x, y) = basis.gradients_at(p);
            gx.row_mut(i).copy_from(&x.transpose());
            gy.row_mut(i).copy_from(&y.transpose());
        }
        Ok(Self {
            region: region.clone(),
            weights: DVector::from_vec(weights),
            gx,
            gy,
        })
    }

    pub fn region(&self) -> &BoundaryRegion {
        &self.region
    }

    /// `trace_norm` of the gradient trace of the field with these coefficients.
    pub fn norm(&self, coeffs: &DVector<f64>) -> f64 {
        let vx = &self.gx * coeffs;
        let vy = &self.gy * coeffs;
        self.weights
            .iter()
            .zip(vx.iter().zip(vy.iter()))
            .map(|(w, (a, b))| w * (a * a + b * b))
            .sum::<f64>()
            .sqrt()
    }

    /// Per-mode trace norms; a mode with zero norm is invisible on the region.
    pub fn mode_norms(&self) -> Vec<f64> {
        (0..self.gx.ncols())
            .map(|k| {
                self.weights
                    .iter()
                    .zip(self.gx.column(k).iter().zip(self.gy.column(k).iter()))
                    .map(|(w, (a, b))| w * (a * a + b * b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// A 2-vector field on the rectangle.
pub trait VectorField {
    fn domain(&self) -> &RectDomain;
    fn value(&self, p: [f64; 2]) -> [f64; 2];
}

/// Vector field whose two components are modal fields.
#[derive(Debug, Clone)]
pub struct ModalVectorField {
    pub x: ModalField,
    pub y: ModalField,
}

impl ModalVectorField {
    pub fn new(x: ModalField, y: ModalField) -> Result<Self> {
        if x.basis().domain() != y.basis().domain() {
            return Err(Error::DomainMismatch);
        }
        Ok(Self { x, y })
    }
}

impl VectorField for ModalVectorField {
    fn domain(&self) -> &RectDomain {
        self.x.basis().domain()
    }

    fn value(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.x.basis().values_at(p).dot(self.x.coeffs()),
            self.y.basis().values_at(p).dot(self.y.coeffs()),
        ]
    }
}

/// Vector field given by a closure.
pub struct FnVectorField<F> {
    domain: RectDomain,
    f: F,
}

impl<F: Fn([f64; 2]) -> [f64; 2]> FnVectorField<F> {
    pub fn new(domain: RectDomain, f: F) -> Self {
        Self { domain, f }
    }
}

impl<F: Fn([f64; 2]) -> [f64; 2]> VectorField for FnVectorField<F> {
    fn domain(&self) -> &RectDomain {
        &self.domain
    }

    fn value(&self, p: [f64; 2]) -> [f64; 2] {
        (self.f)(p)
    }
}

/// Solves `Lap v = -div Y`, `v = 0` on ∂Ω in the sine basis `solver`.
///
/// The right-hand side is expanded in weak form, `<-div Y, psi> = <Y, grad psi>`, which holds
/// because every sine mode vanishes on the boundary; each coefficient is then divided by its
/// (strictly negative) eigenvalue.
pub fn gradient_adjoint(vf: &dyn VectorField, solver: &Arc<ModalBasis>, rule: &QuadratureRule) -> Result<ModalField> {
    if solver.bc() != BcFamily::DirichletSine {
        return Err(Error::InvalidParameter(
            "gradient adjoint needs a Dirichlet sine solver basis".into(),
        ));
    }
    if vf.domain() != solver.domain() {
        return Err(Error::DomainMismatch);
    }
    let minimum = solver.min_quadrature_order();
    if rule.order() < minimum {
        return Err(Error::QuadratureTooCoarse {
            nodes: rule.order(),
            minimum,
        });
    }
    let d = solver.domain();
    let mut rhs = DVector::zeros(solver.len());
    for (p, w) in rule.tensor((0.0, d.a1()), (0.0, d.a2())) {
        let y = vf.value(p);
        let (gx, gy) = solver.gradients_at(p);
        rhs.axpy(w * y[0], &gx, 1.0);
        rhs.axpy(w * y[1], &gy, 1.0);
    }
    for (c, &lam) in rhs.iter_mut().zip(solver.eigenvalues()) {
        *c *= (1.0 - lam) / lam;
    }
    ModalField::from_coeffs(solver, rhs)
}
