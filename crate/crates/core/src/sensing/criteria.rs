//! Closed-form placement criteria for the Dirichlet sine family.
//!
//! For a single sensor whose weight is symmetric about a centre, every output-map entry factors
//! as `sin(k pi c / a)` times a term that does not depend on the centre. The criteria flag the
//! index/position products `k c / a` that land on an integer, which zero that factor.

use super::groups::group_eigenvalues;
use super::sensor::{boundary_side_of, Measurement, SensorSpec};
use crate::basis::ModalBasis;
use crate::domain::{BcFamily, Mode, RectDomain};
use crate::error::Result;
use crate::profile::Profile;
use crate::trace::Side;

/// `|x - round(x)|` below this counts as an integer product.
pub const INTEGER_TOL: f64 = 1e-9;
/// Allowed asymmetry of a sampled profile about its centre.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Which placement pattern matched the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementPattern {
    /// Internal zone with a weight symmetric about the zone centre.
    InternalZone,
    /// Flux zone on one side with a weight symmetric about the segment midpoint.
    OneSideFluxZone,
    /// Flux zone on one horizontal and one vertical segment.
    TwoSideFluxZone,
    /// Interior point sensor.
    Pointwise,
    /// Axis-aligned filament with a weight symmetric about its midpoint.
    Filament,
    /// Flux point sensor on a side.
    BoundaryPointwise,
}

/// Outcome of a closed-form placement check.
#[derive(Debug, Clone, PartialEq)]
pub enum PlacementPrediction {
    Criterion {
        pattern: PlacementPattern,
        predicted_strategic: bool,
        /// Modes of the first `J` groups whose products land on an integer.
        violations: Vec<Mode>,
        /// Smallest distance of any product to the nearest integer.
        margin: f64,
    },
    /// The sensor does not match any pattern; the reason says why.
    NoCriterion(String),
}

impl PlacementPrediction {
    pub fn predicted_strategic(&self) -> Option<bool> {
        match self {
            PlacementPrediction::Criterion {
                predicted_strategic, ..
            } => Some(*predicted_strategic),
            PlacementPrediction::NoCriterion(_) => None,
        }
    }

    pub fn margin(&self) -> Option<f64> {
        match self {
            PlacementPrediction::Criterion { margin, .. } => Some(*margin),
            PlacementPrediction::NoCriterion(_) => None,
        }
    }
}

/// A condition `index * ratio` is not an integer, where the index is `n` (axis 0) or `m` (axis 1).
#[derive(Debug, Clone, Copy)]
struct Condition {
    axis: usize,
    ratio: f64,
}

fn integer_distance(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Evaluates the closed-form criterion for one sensor over the modes of the first `j`
/// eigenvalue groups.
pub fn proposition_check(
    sensor: &SensorSpec,
    basis: &ModalBasis,
    j: usize,
    group_tol: f64,
) -> Result<PlacementPrediction> {
    let domain = basis.domain();
    sensor.validate(domain, basis.bc())?;
    if basis.bc() != BcFamily::DirichletSine {
        return Ok(PlacementPrediction::NoCriterion(
            "placement criteria are stated for the Dirichlet sine family".into(),
        ));
    }
    let (pattern, conditions) = match classify(sensor, domain) {
        Ok(found) => found,
        Err(reason) => return Ok(PlacementPrediction::NoCriterion(reason)),
    };

    let groups = group_eigenvalues(basis, j, group_tol)?;
    let mut violations = Vec::new();
    let mut margin = f64::INFINITY;
    for mode in groups.iter().flat_map(|g| g.modes.iter().copied()) {
        let mut violated = false;
        for c in &conditions {
            let k = if c.axis == 0 { mode.n } else { mode.m };
            let d = integer_distance(k as f64 * c.ratio);
            margin = margin.min(d);
            violated |= d < INTEGER_TOL;
        }
        if violated {
            violations.push(mode);
        }
    }
    violations.sort();
    Ok(PlacementPrediction::Criterion {
        pattern,
        predicted_strategic: violations.is_empty(),
        violations,
        margin,
    })
}

fn classify(
    sensor: &SensorSpec,
    domain: &RectDomain,
) -> std::result::Result<(PlacementPattern, Vec<Condition>), String> {
    let (a1, a2) = (domain.a1(), domain.a2());
    match sensor {
        SensorSpec::Pointwise { location } => Ok((
            PlacementPattern::Pointwise,
            vec![
                Condition {
                    axis: 0,
                    ratio: location[0] / a1,
                },
                Condition {
                    axis: 1,
                    ratio: location[1] / a2,
                },
            ],
        )),
        SensorSpec::InternalZone { x, y, profile } => {
            let c = [0.5 * (x.0 + x.1), 0.5 * (y.0 + y.1)];
            let half = [0.5 * (x.1 - x.0), 0.5 * (y.1 - y.0)];
            let asym = zone_asymmetry(profile, c, half, domain);
            if asym >= SYMMETRY_TOL {
                return Err(format!(
                    "zone weight is not symmetric about its centre (residual {asym:e})"
                ));
            }
            Ok((
                PlacementPattern::InternalZone,
                vec![
                    Condition {
                        axis: 0,
                        ratio: c[0] / a1,
                    },
                    Condition {
                        axis: 1,
                        ratio: c[1] / a2,
                    },
                ],
            ))
        }
        SensorSpec::Filament { start, end, profile } => {
            let axis = if (start[1] - end[1]).abs() == 0.0 {
                0
            } else if (start[0] - end[0]).abs() == 0.0 {
                1
            } else {
                return Err("filament is not axis-aligned".into());
            };
            let mid = [0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1])];
            let half = 0.5 * (end[axis] - start[axis]).abs();
            let asym = line_asymmetry(
                |s| {
                    let mut p = mid;
                    p[axis] += s;
                    profile.eval(p, domain)
                },
                half,
            );
            if asym >= SYMMETRY_TOL {
                return Err(format!(
                    "filament weight is not symmetric about its midpoint (residual {asym:e})"
                ));
            }
            Ok((
                PlacementPattern::Filament,
                vec![
                    Condition {
                        axis: 0,
                        ratio: mid[0] / a1,
                    },
                    Condition {
                        axis: 1,
                        ratio: mid[1] / a2,
                    },
                ],
            ))
        }
        SensorSpec::BoundaryPointwise { location, measurement } => {
            if *measurement != Measurement::Flux {
                return Err("boundary point criterion needs a flux measurement".into());
            }
            let side = boundary_side_of(*location, domain).map_err(|e| e.to_string())?;
            Ok((
                PlacementPattern::BoundaryPointwise,
                vec![tangent_condition(side, *location, domain)],
            ))
        }
        SensorSpec::BoundaryZone { segments, measurement } => {
            if *measurement != Measurement::Flux {
                return Err("boundary zone criterion needs a flux measurement".into());
            }
            for (seg, profile) in segments {
                let mid = seg.midpoint();
                let asym = line_asymmetry(
                    |t| profile.eval(seg.side().point(mid + t, domain), domain),
                    0.5 * seg.length(),
                );
                if asym >= SYMMETRY_TOL {
                    return Err(format!(
                        "weight on side {} is not symmetric about the segment midpoint (residual {asym:e})",
                        seg.side().name()
                    ));
                }
            }
            match segments.as_slice() {
                [(seg, _)] => {
                    let p = seg.side().point(seg.midpoint(), domain);
                    Ok((
                        PlacementPattern::OneSideFluxZone,
                        vec![tangent_condition(seg.side(), p, domain)],
                    ))
                }
                [(s1, _), (s2, _)] => {
                    // The printed condition constrains only the horizontal segment's centre.
                    let horizontal = [s1, s2].into_iter().find(|s| s.side().tangent_axis() == 0);
                    let vertical = [s1, s2].into_iter().find(|s| s.side().tangent_axis() == 1);
                    match (horizontal, vertical) {
                        (Some(h), Some(_)) => {
                            let p = h.side().point(h.midpoint(), domain);
                            Ok((
                                PlacementPattern::TwoSideFluxZone,
                                vec![Condition {
                                    axis: 0,
                                    ratio: p[0] / a1,
                                }],
                            ))
                        }
                        _ => Err("two-segment criterion needs one horizontal and one vertical segment".into()),
                    }
                }
                _ => Err("boundary zone criterion covers one or two segments".into()),
            }
        }
    }
}

/// On a side, the flux of a sine mode carries `sin(k pi s / a)` in the tangential index only.
fn tangent_condition(side: Side, p: [f64; 2], domain: &RectDomain) -> Condition {
    let axis = side.tangent_axis();
    let len = if axis == 0 { domain.a1() } else { domain.a2() };
    Condition {
        axis,
        ratio: p[axis] / len,
    }
}

const SYMMETRY_SAMPLES: usize = 17;

fn line_asymmetry<F: Fn(f64) -> f64>(f: F, half: f64) -> f64 {
    (1..=SYMMETRY_SAMPLES)
        .map(|i| {
            let t = half * i as f64 / SYMMETRY_SAMPLES as f64;
            (f(t) - f(-t)).abs()
        })
        .fold(0.0, f64::max)
}

fn zone_asymmetry(profile: &Profile, c: [f64; 2], half: [f64; 2], domain: &RectDomain) -> f64 {
    let mut worst: f64 = 0.0;
    for axis in 0..2 {
        let other = 1 - axis;
        for j in 0..=SYMMETRY_SAMPLES {
            let mut base = c;
            base[other] += half[other] * (2.0 * j as f64 / SYMMETRY_SAMPLES as f64 - 1.0);
            worst = worst.max(line_asymmetry(
                |s| {
                    let mut p = base;
                    p[axis] += s;
                    profile.eval(p, domain)
                },
                half[axis],
            ));
        }
    }
    worst
}
