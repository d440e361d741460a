use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::basis::{ModalBasis, ModalField};
use crate::domain::{BcFamily, Mode, RectDomain, GEOMETRY_EPS};
use crate::error::{Error, Result};
use crate::profile::Profile;
use crate::quadrature::QuadratureRule;
use crate::trace::{BoundaryRegion, BoundarySegment, Side};

/// What a boundary sensor reads: the state trace or the outward normal flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measurement {
    Trace,
    Flux,
}

impl Measurement {
    /// Trace sensors pair with Neumann modes and flux sensors with Dirichlet modes; the other
    /// pairings read identically zero.
    fn check_family(self, bc: BcFamily) -> Result<()> {
        match (self, bc) {
            (Measurement::Trace, BcFamily::NeumannCosine) | (Measurement::Flux, BcFamily::DirichletSine) => Ok(()),
            (Measurement::Flux, BcFamily::NeumannCosine) => Err(Error::InvalidSensor(
                "flux measurement is identically zero for the Neumann family".into(),
            )),
            (Measurement::Trace, BcFamily::DirichletSine) => Err(Error::InvalidSensor(
                "trace measurement is identically zero for the Dirichlet family".into(),
            )),
        }
    }
}

/// Sensor geometry and weighting.
#[derive(Debug, Clone, PartialEq)]
pub enum SensorSpec {
    /// `y = int_D x f`, with `D = [x.0, x.1] x [y.0, y.1]`.
    InternalZone {
        x: (f64, f64),
        y: (f64, f64),
        profile: Profile,
    },
    /// `y = sum_s int_{segment s} (x or dx/dnu) f_s`.
    BoundaryZone {
        segments: Vec<(BoundarySegment, Profile)>,
        measurement: Measurement,
    },
    /// `y = x(b)`.
    Pointwise { location: [f64; 2] },
    /// `y = x(b)` or `dx/dnu(b)` for `b` on a side (corners excluded).
    BoundaryPointwise {
        location: [f64; 2],
        measurement: Measurement,
    },
    /// `y = int_sigma x f ds` along the straight segment `sigma` from `start` to `end`.
    Filament {
        start: [f64; 2],
        end: [f64; 2],
        profile: Profile,
    },
}

impl SensorSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SensorSpec::InternalZone { .. } => "internal_zone",
            SensorSpec::BoundaryZone { .. } => "boundary_zone",
            SensorSpec::Pointwise { .. } => "pointwise",
            SensorSpec::BoundaryPointwise { .. } => "boundary_pointwise",
            SensorSpec::Filament { .. } => "filament",
        }
    }

    /// Checks geometry against the domain and measurement type against the family.
    pub fn validate(&self, domain: &RectDomain, bc: BcFamily) -> Result<()> {
        match self {
            SensorSpec::InternalZone { x, y, .. } => {
                if !(x.0 < x.1 && y.0 < y.1) {
                    return Err(Error::InvalidSensor("zone support must have positive extent".into()));
                }
                domain.check_point([x.0, y.0])?;
                domain.check_point([x.1, y.1])
            }
            SensorSpec::BoundaryZone { segments, measurement } => {
                measurement.check_family(bc)?;
                BoundaryRegion::new(*domain, segments.iter().map(|(s, _)| *s).collect())?;
                for (seg, _) in segments {
                    if seg.hi() > seg.side().length(domain) + GEOMETRY_EPS {
                        return Err(Error::InvalidSensor("segment leaves its side".into()));
                    }
                }
                Ok(())
            }
            SensorSpec::Pointwise { location } => domain.check_point(*location),
            SensorSpec::BoundaryPointwise { location, measurement } => {
                measurement.check_family(bc)?;
                boundary_side_of(*location, domain).map(|_| ())
            }
            SensorSpec::Filament { start, end, .. } => {
                domain.check_point(*start)?;
                domain.check_point(*end)?;
                if (start[0] - end[0]).hypot(start[1] - end[1]) <= GEOMETRY_EPS {
                    return Err(Error::InvalidSensor("filament has zero length".into()));
                }
                Ok(())
            }
        }
    }

    /// The sensor functional applied to every basis function.
    fn row(&self, basis: &ModalBasis, rule: &QuadratureRule) -> DVector<f64> {
        let domain = basis.domain();
        let mut row = DVector::zeros(basis.len());
        match self {
            SensorSpec::InternalZone { x, y, profile } => {
                for (p, w) in rule.tensor(*x, *y) {
                    let f = profile.eval(p, domain);
                    if f != 0.0 {
                        row.axpy(w * f, &basis.values_at(p), 1.0);
                    }
                }
            }
            SensorSpec::BoundaryZone { segments, measurement } => {
                for (seg, profile) in segments {
                    for (p, w) in seg.nodes(rule, domain) {
                        let f = profile.eval(p, domain);
                        if f != 0.0 {
                            row.axpy(w * f, &measure_at(basis, p, seg.side(), *measurement), 1.0);
                        }
                    }
                }
            }
            SensorSpec::Pointwise { location } => row = basis.values_at(*location),
            SensorSpec::BoundaryPointwise { location, measurement } => {
                let side = boundary_side_of(*location, domain).expect("validated");
                row = measure_at(basis, *location, side, *measurement);
            }
            SensorSpec::Filament { start, end, profile } => {
                let len = (end[0] - start[0]).hypot(end[1] - start[1]);
                for (s, w) in rule.on_interval(0.0, 1.0) {
                    let p = [start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1])];
                    let f = profile.eval(p, domain);
                    if f != 0.0 {
                        row.axpy(w * len * f, &basis.values_at(p), 1.0);
                    }
                }
            }
        }
        row
    }
}

fn measure_at(basis: &ModalBasis, p: [f64; 2], side: Side, measurement: Measurement) -> DVector<f64> {
    match measurement {
        Measurement::Trace => basis.values_at(p),
        Measurement::Flux => {
            let (gx, gy) = basis.gradients_at(p);
            let nu = side.outward_normal();
            gx * nu[0] + gy * nu[1]
        }
    }
}

/// The unique side containing `p`; corners and interior points are rejected.
pub(crate) fn boundary_side_of(p: [f64; 2], domain: &RectDomain) -> Result<Side> {
    let sides: Vec<Side> = Side::ALL
        .into_iter()
        .filter(|s| s.coordinate_of(p, domain).is_some())
        .collect();
    match sides.as_slice() {
        [side] => Ok(*side),
        [] => Err(Error::InvalidSensor(format!(
            "boundary point ({}, {}) is not on the boundary",
            p[0], p[1]
        ))),
        _ => Err(Error::InvalidSensor(format!(
            "boundary point ({}, {}) is a corner; the normal is undefined",
            p[0], p[1]
        ))),
    }
}

/// Output operator `C` as a `q x modes` matrix.
#[derive(Debug, Clone)]
pub struct OutputMap {
    basis: Arc<ModalBasis>,
    sensors: Vec<SensorSpec>,
    matrix: DMatrix<f64>,
}

impl OutputMap {
    pub fn basis(&self) -> &Arc<ModalBasis> {
        &self.basis
    }

    pub fn sensors(&self) -> &[SensorSpec] {
        &self.sensors
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Number of sensors `q`.
    pub fn q(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, sensor: usize, mode: Mode) -> Option<f64> {
        let k = self.basis.index_of(mode)?;
        (sensor < self.q()).then(|| self.matrix[(sensor, k)])
    }

    /// `y = C x`.
    pub fn output(&self, field: &ModalField) -> Result<DVector<f64>> {
        if field.coeffs().len() != self.basis.len() {
            return Err(Error::DimensionMismatch("field does not match the output map".into()));
        }
        Ok(&self.matrix * field.coeffs())
    }

    /// Each nonzero row scaled to unit max-abs entry; rank decisions use this form so they do
    /// not depend on sensor gains.
    pub fn row_normalized(&self) -> DMatrix<f64> {
        let mut m = self.matrix.clone();
        for mut row in m.row_iter_mut() {
            let s = row.amax();
            if s > 0.0 {
                row /= s;
            }
        }
        m
    }

    /// Same matrix over a given basis, for callers that build `C` externally.
    pub fn from_matrix(basis: &Arc<ModalBasis>, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "output matrix has {} columns, basis has {} modes",
                matrix.ncols(),
                basis.len()
            )));
        }
        Ok(Self {
            basis: Arc::clone(basis),
            sensors: Vec::new(),
            matrix,
        })
    }
}

/// Assembles `C` row by row from the sensor functionals.
pub fn assemble_output_map(
    sensors: &[SensorSpec],
    basis: &Arc<ModalBasis>,
    rule: &QuadratureRule,
) -> Result<OutputMap> {
    let mut matrix = DMatrix::zeros(sensors.len(), basis.len());
    for (i, sensor) in sensors.iter().enumerate() {
        sensor.validate(basis.domain(), basis.bc())?;
        matrix.row_mut(i).copy_from(&sensor.row(basis, rule).transpose());
    }
    Ok(OutputMap {
        basis: Arc::clone(basis),
        sensors: sensors.to_vec(),
        matrix,
    })
}
