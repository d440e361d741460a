//! Named analytic profiles used for sensor weights, actuator shapes and initial data.

use std::f64::consts::PI;

use crate::domain::RectDomain;

/// One axis factor of a separable trigonometric profile: `cos(k pi s / a)`, `sin(k pi s / a)` or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrigFactor {
    One,
    Cos(u32),
    Sin(u32),
}

impl TrigFactor {
    fn eval(self, s: f64, len: f64) -> f64 {
        match self {
            TrigFactor::One => 1.0,
            TrigFactor::Cos(k) => (k as f64 * PI * s / len).cos(),
            TrigFactor::Sin(k) => (k as f64 * PI * s / len).sin(),
        }
    }

    fn derivative(self, s: f64, len: f64) -> f64 {
        match self {
            TrigFactor::One => 0.0,
            TrigFactor::Cos(k) => {
                let w = k as f64 * PI / len;
                -w * (w * s).sin()
            }
            TrigFactor::Sin(k) => {
                let w = k as f64 * PI / len;
                w * (w * s).cos()
            }
        }
    }
}

/// Scalar field on the closed rectangle.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `amplitude * fx(xi1) * fy(xi2)`, frequencies scaled by the side lengths.
    Trig {
        amplitude: f64,
        x: TrigFactor,
        y: TrigFactor,
    },
    /// `amplitude * exp(-|p - center|^2 / (2 width^2))`.
    Gaussian {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl Profile {
    pub fn eval(&self, p: [f64; 2], domain: &RectDomain) -> f64 {
        match *self {
            Profile::Constant(c) => c,
            Profile::Trig { amplitude, x, y } => amplitude * x.eval(p[0], domain.a1()) * y.eval(p[1], domain.a2()),
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                amplitude * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
            }
        }
    }

    pub fn gradient(&self, p: [f64; 2], domain: &RectDomain) -> [f64; 2] {
        match *self {
            Profile::Constant(_) => [0.0, 0.0],
            Profile::Trig { amplitude, x, y } => {
                let (a1, a2) = (domain.a1(), domain.a2());
                [
                    amplitude * x.derivative(p[0], a1) * y.eval(p[1], a2),
                    amplitude * x.eval(p[0], a1) * y.derivative(p[1], a2),
                ]
            }
            Profile::Gaussian { center, width, .. } => {
                let v = self.eval(p, domain);
                let s2 = width * width;
                [-(p[0] - center[0]) / s2 * v, -(p[1] - center[1]) / s2 * v]
            }
        }
    }

    /// The same profile multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Profile {
        match *self {
            Profile::Constant(c) => Profile::Constant(factor * c),
            Profile::Trig { amplitude, x, y } => Profile::Trig {
                amplitude: factor * amplitude,
                x,
                y,
            },
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } => Profile::Gaussian {
                amplitude: factor * amplitude,
                center,
                width,
            },
        }
    }
}
