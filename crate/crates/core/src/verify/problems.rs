use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::VerifyError;
use crate::assembly::ProblemData;
use crate::mesh::{InterfaceCurve, Side, Subdomain};
use crate::{Mat2, Vec2};

/// Closed-form velocity and pressure fields, one pair per subdomain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Field {
    /// Discontinuous trigonometric velocity with piecewise constant pressure on a circle.
    TrigonometricJump,
    /// Trigonometric inside, polynomial-exponential outside, zero pressure.
    SinePolynomial,
    /// One divergence-free polynomial of the given degree on the whole domain, with a
    /// pressure of one degree less.
    Polynomial(usize),
}

/// A manufactured two-phase problem on `[-1, 1]²`: exact fields plus the data derived
/// from them.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedProblem {
    /// 1, 2, 3 for the built-in interface problems, 0 for polynomial patch data.
    pub id: u32,
    pub curve: Option<InterfaceCurve>,
    pub coefficients: [Mat2; 2],
    pub field: Field,
    /// Take the body force from the side of the curve a point lies on rather than from the
    /// side the caller names, and read interface data at the closest curve point. Used
    /// with chord meshes, whose cells do not follow the curve; the exact fields stay
    /// those of the named side.
    pub true_sides: bool,
}

/// Per-component second derivatives: `h[i][(j, l)] = ∂_j ∂_l u_i`.
pub type Hessians = [Mat2; 2];

impl ManufacturedProblem {
    pub fn new(id: u32) -> Result<Self, VerifyError> {
        let eye = Mat2::identity();
        let p = match id {
            1 => ManufacturedProblem {
                id,
                curve: Some(InterfaceCurve::circle(0.5)),
                coefficients: [eye, eye],
                field: Field::TrigonometricJump,
                true_sides: false,
            },
            2 => ManufacturedProblem {
                id,
                curve: Some(InterfaceCurve::polar_star(1.0 / 7.0, 1.0 / 7.0, 5.0)),
                coefficients: [eye, eye],
                field: Field::SinePolynomial,
                true_sides: false,
            },
            3 => ManufacturedProblem {
                id,
                curve: Some(InterfaceCurve::polar_star(0.5, 0.25, 2.0)),
                coefficients: [eye, 10.0 * eye],
                field: Field::SinePolynomial,
                true_sides: false,
            },
            _ => return Err(VerifyError::UnknownProblem(id)),
        };
        Ok(p)
    }

    /// Polynomial data without an interface, reproduced exactly by degree `k`.
    pub fn patch(k: usize) -> Self {
        ManufacturedProblem {
            id: 0,
            curve: None,
            coefficients: [Mat2::identity(), Mat2::identity()],
            field: Field::Polynomial(k),
            true_sides: false,
        }
    }

    pub fn with_true_sides(mut self) -> Self {
        self.true_sides = true;
        self
    }

    /// Side whose body force applies at `x`.
    pub fn side_at(&self, side: Subdomain, x: &Vec2) -> Subdomain {
        match (self.true_sides, self.curve) {
            (true, Some(curve)) => match curve.classify(x) {
                Side::Inside => Subdomain::One,
                Side::Outside => Subdomain::Two,
                Side::On => side,
            },
            _ => side,
        }
    }

    /// Point and unit normal (oriented like `normal`) where interface data is read.
    fn interface_point(&self, x: &Vec2, normal: &Vec2) -> (Vec2, Vec2) {
        match (self.true_sides, self.curve) {
            (true, Some(curve)) => {
                let (t, _) = curve.closest_point(x);
                let n = curve.outward_normal(t);
                (curve.point(t), if n.dot(normal) < 0.0 { -n } else { n })
            }
            _ => (*x, *normal),
        }
    }

    pub fn coefficient_of(&self, side: Subdomain) -> Mat2 {
        self.coefficients[side.index()]
    }

    pub fn velocity(&self, side: Subdomain, x: &Vec2) -> Vec2 {
        let (x, y) = (x.x, x.y);
        match (self.field, side) {
            (Field::TrigonometricJump, Subdomain::One) => {
                Vec2::new(2.0 * y.sin() * y.cos() * x.cos(), (y.sin().powi(2) - 2.0) * x.sin())
            }
            (Field::TrigonometricJump, Subdomain::Two) => {
                Vec2::new(-(PI * x).cos() * (PI * y).sin(), (PI * x).sin() * (PI * y).cos())
            }
            (Field::SinePolynomial, Subdomain::One) => Vec2::new(
                2.0 * PI * (PI * x).sin().powi(2) * (PI * y).cos() * (PI * y).sin(),
                -2.0 * PI * (PI * x).sin() * (PI * y).sin().powi(2) * (PI * x).cos(),
            ),
            (Field::SinePolynomial, Subdomain::Two) => Vec2::new(
                x * x * y * y + (-y).exp(),
                -2.0 / 3.0 * x * y.powi(3) + 2.0 - PI * (PI * x).sin(),
            ),
            (Field::Polynomial(k), _) => match k {
                1 => Vec2::new(y, x),
                2 => Vec2::new(x * x, -2.0 * x * y),
                _ => Vec2::new(x.powi(3) - 3.0 * x * y * y, y.powi(3) - 3.0 * x * x * y),
            },
        }
    }

    /// `g[(i, j)] = ∂_j u_i`.
    pub fn velocity_gradient(&self, side: Subdomain, x: &Vec2) -> Mat2 {
        let (x, y) = (x.x, x.y);
        match (self.field, side) {
            (Field::TrigonometricJump, Subdomain::One) => {
                let s2y = (2.0 * y).sin();
                Mat2::new(
                    -s2y * x.sin(),
                    2.0 * (2.0 * y).cos() * x.cos(),
                    (y.sin().powi(2) - 2.0) * x.cos(),
                    s2y * x.sin(),
                )
            }
            (Field::TrigonometricJump, Subdomain::Two) => {
                let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
                Mat2::new(PI * sx * sy, -PI * cx * cy, PI * cx * cy, -PI * sx * sy)
            }
            (Field::SinePolynomial, Subdomain::One) => {
                let (s2x, s2y, c2x, c2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin(), (2.0 * PI * x).cos(), (2.0 * PI * y).cos());
                let (sx2, sy2) = ((PI * x).sin().powi(2), (PI * y).sin().powi(2));
                let p2 = PI * PI;
                Mat2::new(p2 * s2x * s2y, 2.0 * p2 * sx2 * c2y, -2.0 * p2 * c2x * sy2, -p2 * s2x * s2y)
            }
            (Field::SinePolynomial, Subdomain::Two) => Mat2::new(
                2.0 * x * y * y,
                2.0 * x * x * y - (-y).exp(),
                -2.0 / 3.0 * y.powi(3) - PI * PI * (PI * x).cos(),
                -2.0 * x * y * y,
            ),
            (Field::Polynomial(k), _) => match k {
                1 => Mat2::new(0.0, 1.0, 1.0, 0.0),
                2 => Mat2::new(2.0 * x, 0.0, -2.0 * y, -2.0 * x),
                _ => Mat2::new(3.0 * (x * x - y * y), -6.0 * x * y, -6.0 * x * y, 3.0 * (y * y - x * x)),
            },
        }
    }

    pub fn velocity_hessians(&self, side: Subdomain, x: &Vec2) -> Hessians {
        let (x, y) = (x.x, x.y);
        let sym = |xx: f64, xy: f64, yy: f64| Mat2::new(xx, xy, xy, yy);
        match (self.field, side) {
            (Field::TrigonometricJump, Subdomain::One) => {
                let (s2y, c2y) = ((2.0 * y).sin(), (2.0 * y).cos());
                [
                    sym(-s2y * x.cos(), -2.0 * c2y * x.sin(), -4.0 * s2y * x.cos()),
                    sym(-(y.sin().powi(2) - 2.0) * x.sin(), s2y * x.cos(), 2.0 * c2y * x.sin()),
                ]
            }
            (Field::TrigonometricJump, Subdomain::Two) => {
                let (sx, cx, sy, cy) = ((PI * x).sin(), (PI * x).cos(), (PI * y).sin(), (PI * y).cos());
                let p2 = PI * PI;
                [
                    sym(p2 * cx * sy, p2 * sx * cy, p2 * cx * sy),
                    sym(-p2 * sx * cy, -p2 * cx * sy, -p2 * sx * cy),
                ]
            }
            (Field::SinePolynomial, Subdomain::One) => {
                let (s2x, s2y, c2x, c2y) = ((2.0 * PI * x).sin(), (2.0 * PI * y).sin(), (2.0 * PI * x).cos(), (2.0 * PI * y).cos());
                let (sx2, sy2) = ((PI * x).sin().powi(2), (PI * y).sin().powi(2));
                let p3 = PI.powi(3);
                [
                    sym(2.0 * p3 * c2x * s2y, 2.0 * p3 * s2x * c2y, -4.0 * p3 * sx2 * s2y),
                    sym(4.0 * p3 * s2x * sy2, -2.0 * p3 * c2x * s2y, -2.0 * p3 * s2x * c2y),
                ]
            }
            (Field::SinePolynomial, Subdomain::Two) => [
                sym(2.0 * y * y, 4.0 * x * y, 2.0 * x * x + (-y).exp()),
                sym(PI.powi(3) * (PI * x).sin(), -2.0 * y * y, -4.0 * x * y),
            ],
            (Field::Polynomial(k), _) => match k {
                1 => [Mat2::zeros(), Mat2::zeros()],
                2 => [sym(2.0, 0.0, 0.0), sym(0.0, -2.0, 0.0)],
                _ => [sym(6.0 * x, -6.0 * y, -6.0 * x), sym(-6.0 * y, -6.0 * x, 6.0 * y)],
            },
        }
    }

    /// Pressure as stated, before any mean-zero shift.
    pub fn pressure(&self, side: Subdomain, x: &Vec2) -> f64 {
        match (self.field, side) {
            (Field::TrigonometricJump, Subdomain::One) => 1.0,
            (Field::TrigonometricJump, Subdomain::Two) => PI / (16.0 - PI),
            (Field::SinePolynomial, _) => 0.0,
            (Field::Polynomial(k), _) => match k {
                1 => 0.0,
                2 => x.x,
                _ => x.x * x.x - x.y * x.y,
            },
        }
    }

    pub fn pressure_gradient(&self, _side: Subdomain, x: &Vec2) -> Vec2 {
        match self.field {
            Field::TrigonometricJump | Field::SinePolynomial => Vec2::zeros(),
            Field::Polynomial(k) => match k {
                1 => Vec2::zeros(),
                2 => Vec2::new(1.0, 0.0),
                _ => Vec2::new(2.0 * x.x, -2.0 * x.y),
            },
        }
    }

    /// Normal stress `(A ∇u - p I) n` of one subdomain.
    pub fn traction(&self, side: Subdomain, x: &Vec2, n: &Vec2) -> Vec2 {
        let g = self.velocity_gradient(side, x);
        // component i: Σ_jl n_j A_jl ∂_l u_i
        g * self.coefficient_of(side).transpose() * n - self.pressure(side, x) * n
    }

    /// Compares closed-form derivatives with central differences at `samples` random
    /// points on both sides.
    pub fn check_derivatives(&self, seed: u64, samples: usize) -> Result<(), VerifyError> {
        const STEP: f64 = 1e-5;
        const TOL: f64 = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);
        for _ in 0..samples {
            let x = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            for side in [Subdomain::One, Subdomain::Two] {
                let g = self.velocity_gradient(side, &x);
                let h = self.velocity_hessians(side, &x);
                let gp = self.pressure_gradient(side, &x);
                for l in 0..2 {
                    let mut d = Vec2::zeros();
                    d[l] = STEP;
                    let (xp, xm) = (x + d, x - d);
                    let du = (self.velocity(side, &xp) - self.velocity(side, &xm)) / (2.0 * STEP);
                    let dg = (self.velocity_gradient(side, &xp) - self.velocity_gradient(side, &xm)) / (2.0 * STEP);
                    let dp = (self.pressure(side, &xp) - self.pressure(side, &xm)) / (2.0 * STEP);
                    let mut worst = rel(dp, gp[l]);
                    for i in 0..2 {
                        worst = worst.max(rel(du[i], g[(i, l)]));
                        for j in 0..2 {
                            worst = worst.max(rel(dg[(i, j)], h[i][(j, l)]));
                        }
                    }
                    if worst > TOL {
                        return Err(VerifyError::DerivativeMismatch {
                            problem: self.id,
                            x: x.x,
                            y: x.y,
                            error: worst,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl ProblemData for ManufacturedProblem {
    fn coefficient(&self, side: Subdomain) -> Mat2 {
        self.coefficient_of(side)
    }

    /// `-∇·(A ∇u) + ∇p`.
    fn body_force(&self, side: Subdomain, x: &Vec2) -> Vec2 {
        let side = self.side_at(side, x);
        let a = self.coefficient_of(side);
        let h = self.velocity_hessians(side, x);
        let div = |i: usize| (0..2).flat_map(|j| (0..2).map(move |l| (j, l))).map(|(j, l)| a[(j, l)] * h[i][(j, l)]).sum::<f64>();
        Vec2::new(-div(0), -div(1)) + self.pressure_gradient(side, x)
    }

    fn boundary_velocity(&self, side: Subdomain, x: &Vec2) -> Vec2 {
        self.velocity(side, x)
    }

    fn velocity_jump(&self, x: &Vec2) -> Vec2 {
        let (x, _) = self.interface_point(x, &Vec2::zeros());
        self.velocity(Subdomain::One, &x) - self.velocity(Subdomain::Two, &x)
    }

    fn flux_jump(&self, x: &Vec2, normal: &Vec2) -> Vec2 {
        let (x, n) = self.interface_point(x, normal);
        self.traction(Subdomain::One, &x, &n) + self.traction(Subdomain::Two, &x, &-n)
    }
}
