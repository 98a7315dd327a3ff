//! Closed interface curves given in polar form about the origin.

use std::f64::consts::PI;

use crate::Vec2;

/// Absolute geometric tolerance in domain units.
pub const TOL_GEOM: f64 = 1e-12;

/// Which side of the interface a point lies on. `One` is the bounded region
/// enclosed by the curve, `Two` the exterior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subdomain {
    One,
    Two,
}

impl Subdomain {
    /// Slot index (0 for side one, 1 for side two).
    pub fn index(self) -> usize {
        match self {
            Subdomain::One => 0,
            Subdomain::Two => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Subdomain::One
        } else {
            Subdomain::Two
        }
    }

    /// Numeric label used in files and reports (1 or 2).
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }
}

/// Result of classifying a point against the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Inside,
    Outside,
    On,
}

/// A closed, counter-clockwise interface curve `r = R(θ)` centred at the origin,
/// parametrized by `t ∈ [0, 1)` with `θ = 2πt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterfaceCurve {
    Circle { radius: f64 },
    /// `R(θ) = base + amplitude · sin(frequency · θ)`.
    PolarStar {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl InterfaceCurve {
    pub fn circle(radius: f64) -> Self {
        InterfaceCurve::Circle { radius }
    }

    pub fn polar_star(base: f64, amplitude: f64, frequency: f64) -> Self {
        InterfaceCurve::PolarStar {
            base,
            amplitude,
            frequency,
        }
    }

    /// Kind tag used in the mesh file format.
    pub fn kind_name(&self) -> &'static str {
        match self {
            InterfaceCurve::Circle { .. } => "circle",
            InterfaceCurve::PolarStar { .. } => "polar_star",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            InterfaceCurve::Circle { radius } => vec![radius],
            InterfaceCurve::PolarStar {
                base,
                amplitude,
                frequency,
            } => vec![base, amplitude, frequency],
        }
    }

    pub fn from_kind(kind: &str, params: &[f64]) -> Option<Self> {
        match (kind, params) {
            ("circle", [r]) => Some(Self::circle(*r)),
            ("polar_star", [b, a, m]) => Some(Self::polar_star(*b, *a, *m)),
            _ => None,
        }
    }

    /// Checks that the curve is a simple closed curve around the origin
    /// (strictly positive radius, integer frequency for periodicity).
    pub fn is_simple(&self) -> bool {
        match *self {
            InterfaceCurve::Circle { radius } => radius > 0.0,
            InterfaceCurve::PolarStar {
                base,
                amplitude,
                frequency,
            } => base - amplitude.abs() > TOL_GEOM && frequency.fract() == 0.0,
        }
    }

    /// Largest distance from the origin.
    pub fn max_radius(&self) -> f64 {
        match *self {
            InterfaceCurve::Circle { radius } => radius,
            InterfaceCurve::PolarStar {
                base, amplitude, ..
            } => base + amplitude.abs(),
        }
    }

    /// `R(θ)`, `R'(θ)`, `R''(θ)`.
    pub fn radius(&self, theta: f64) -> (f64, f64, f64) {
        match *self {
            InterfaceCurve::Circle { radius } => (radius, 0.0, 0.0),
            InterfaceCurve::PolarStar {
                base,
                amplitude,
                frequency,
            } => {
                let (s, c) = (frequency * theta).sin_cos();
                (
                    base + amplitude * s,
                    amplitude * frequency * c,
                    -amplitude * frequency * frequency * s,
                )
            }
        }
    }

    /// Point `p(t)`.
    pub fn point(&self, t: f64) -> Vec2 {
        let theta = 2.0 * PI * t;
        let (r, _, _) = self.radius(theta);
        let (s, c) = theta.sin_cos();
        Vec2::new(r * c, r * s)
    }

    /// `dp/dt`.
    pub fn derivative(&self, t: f64) -> Vec2 {
        let theta = 2.0 * PI * t;
        let (r, dr, _) = self.radius(theta);
        let (s, c) = theta.sin_cos();
        2.0 * PI * Vec2::new(dr * c - r * s, dr * s + r * c)
    }

    /// `d²p/dt²`.
    pub fn second_derivative(&self, t: f64) -> Vec2 {
        let theta = 2.0 * PI * t;
        let (r, dr, ddr) = self.radius(theta);
        let (s, c) = theta.sin_cos();
        let k = 4.0 * PI * PI;
        k * Vec2::new(
            ddr * c - 2.0 * dr * s - r * c,
            ddr * s + 2.0 * dr * c - r * s,
        )
    }

    /// Unit normal pointing out of the enclosed region at `p(t)`.
    pub fn outward_normal(&self, t: f64) -> Vec2 {
        let d = self.derivative(t);
        Vec2::new(d.y, -d.x) / d.norm()
    }

    /// Parameter of the ray through `x` (the curve point at the same polar angle).
    pub fn parameter_of(&self, x: &Vec2) -> f64 {
        let t = x.y.atan2(x.x) / (2.0 * PI);
        if t < 0.0 {
            t + 1.0
        } else {
            t
        }
    }

    /// Signed level `|x| − R(θ(x))`: negative inside, positive outside, zero on the curve.
    pub fn level(&self, x: &Vec2) -> f64 {
        let theta = x.y.atan2(x.x);
        x.norm() - self.radius(theta).0
    }

    pub fn classify(&self, x: &Vec2) -> Side {
        let l = self.level(x);
        if l.abs() <= TOL_GEOM {
            Side::On
        } else if l < 0.0 {
            Side::Inside
        } else {
            Side::Outside
        }
    }

    /// Parameter and distance of the closest curve point to `x`.
    pub fn closest_point(&self, x: &Vec2) -> (f64, f64) {
        const SAMPLES: usize = 512;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            let d = (self.point(t) - x).norm_squared();
            if d < best.1 {
                best = (t, d);
            }
        }
        let mut t = best.0;
        for _ in 0..50 {
            let r = self.point(t) - x;
            let d1 = self.derivative(t);
            let g = r.dot(&d1);
            let h = d1.norm_squared() + r.dot(&self.second_derivative(t));
            if h <= 0.0 {
                break;
            }
            let step = (g / h).clamp(-0.5 / SAMPLES as f64, 0.5 / SAMPLES as f64);
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let t = t.rem_euclid(1.0);
        (t, (self.point(t) - x).norm())
    }
}
