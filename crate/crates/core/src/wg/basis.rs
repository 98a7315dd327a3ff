use nalgebra::DMatrix;

use crate::refmap::legendre_values;
use crate::Vec2;

/// Dimension of `P_k` in two variables.
pub fn poly_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Scaled monomials `((x - x_c)/h)^i ((y - y_c)/h)^j`, `i + j ≤ degree`, ordered by total
/// degree so that `P_{k-1}` is a prefix of `P_k`.
///
/// An optional lower-triangular transform replaces the monomials by combinations of
/// themselves (an orthonormalized basis keeps the prefix property).
#[derive(Clone, Debug)]
pub struct CellBasis {
    pub center: Vec2,
    pub scale: f64,
    pub degree: usize,
    exponents: Vec<(u32, u32)>,
    transform: Option<DMatrix<f64>>,
}

impl CellBasis {
    pub fn new(center: Vec2, scale: f64, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(poly_dim(degree));
        for d in 0..=degree as u32 {
            for j in 0..=d {
                exponents.push((d - j, j));
            }
        }
        CellBasis {
            center,
            scale,
            degree,
            exponents,
            transform: None,
        }
    }

    /// Basis `φ_a = Σ_b T[a, b] m_b` for a lower-triangular `T` over the monomials `m_b`.
    pub fn with_transform(mut self, t: DMatrix<f64>) -> Self {
        assert_eq!(t.shape(), (self.dim(), self.dim()));
        self.transform = Some(t);
        self
    }

    fn apply(&self, out: &mut [f64]) {
        if let Some(t) = &self.transform {
            let m: Vec<f64> = out.to_vec();
            for (a, o) in out.iter_mut().enumerate() {
                *o = (0..=a).map(|b| t[(a, b)] * m[b]).sum();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exponents
    }

    fn powers(&self, x: &Vec2) -> (Vec<f64>, Vec<f64>) {
        let r = (x - self.center) / self.scale;
        let n = self.degree + 1;
        let (mut px, mut py) = (vec![1.0; n], vec![1.0; n]);
        for i in 1..n {
            px[i] = px[i - 1] * r.x;
            py[i] = py[i - 1] * r.y;
        }
        (px, py)
    }

    /// Values of all basis functions at `x`.
    pub fn values(&self, x: &Vec2, out: &mut [f64]) {
        let (px, py) = self.powers(x);
        for (o, &(i, j)) in out.iter_mut().zip(&self.exponents) {
            *o = px[i as usize] * py[j as usize];
        }
        self.apply(&mut out[..self.dim()]);
    }

    /// Values and physical gradients of all basis functions at `x`.
    pub fn values_and_gradients(&self, x: &Vec2, val: &mut [f64], dx: &mut [f64], dy: &mut [f64]) {
        let (px, py) = self.powers(x);
        let s = 1.0 / self.scale;
        for (a, &(i, j)) in self.exponents.iter().enumerate() {
            let (i, j) = (i as usize, j as usize);
            val[a] = px[i] * py[j];
            dx[a] = if i > 0 { s * i as f64 * px[i - 1] * py[j] } else { 0.0 };
            dy[a] = if j > 0 { s * j as f64 * px[i] * py[j - 1] } else { 0.0 };
        }
        let n = self.dim();
        self.apply(&mut val[..n]);
        self.apply(&mut dx[..n]);
        self.apply(&mut dy[..n]);
    }

    /// Evaluates the polynomial with coefficients `coef` (a prefix of the basis) at `x`.
    pub fn eval(&self, coef: &[f64], x: &Vec2) -> f64 {
        let mut v = vec![0.0; self.dim()];
        self.values(x, &mut v);
        coef.iter().zip(&v).map(|(c, p)| c * p).sum()
    }
}

/// Legendre polynomials `P_0..P_degree` in the edge parameter `s ∈ [-1, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct EdgeBasis {
    pub degree: usize,
}

impl EdgeBasis {
    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn values(&self, s: f64, out: &mut Vec<f64>) {
        legendre_values(self.degree, s, out);
    }

    pub fn eval(&self, coef: &[f64], s: f64) -> f64 {
        let mut v = Vec::new();
        self.values(s, &mut v);
        coef.iter().zip(&v).map(|(c, p)| c * p).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        for k in 0..5 {
            assert_eq!(CellBasis::new(Vec2::zeros(), 1.0, k).dim(), poly_dim(k));
            assert_eq!(EdgeBasis { degree: k }.dim(), k + 1);
        }
    }

    #[test]
    fn lower_degree_is_prefix() {
        let b2 = CellBasis::new(Vec2::new(0.1, 0.2), 0.5, 2);
        let b3 = CellBasis::new(Vec2::new(0.1, 0.2), 0.5, 3);
        assert_eq!(b2.exponents(), &b3.exponents()[..6]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let t = DMatrix::from_fn(10, 10, |i, j| if j <= i { 1.0 + (i * 3 + j) as f64 * 0.1 } else { 0.0 });
        let b = CellBasis::new(Vec2::new(0.3, -0.1), 0.25, 3).with_transform(t);
        let x = Vec2::new(0.41, 0.02);
        let n = b.dim();
        let (mut v, mut dx, mut dy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        b.values_and_gradients(&x, &mut v, &mut dx, &mut dy);
        let eps = 1e-6;
        let (mut vp, mut vm) = (vec![0.0; n], vec![0.0; n]);
        for (dir, d) in [(Vec2::x(), &dx), (Vec2::y(), &dy)] {
            b.values(&(x + eps * dir), &mut vp);
            b.values(&(x - eps * dir), &mut vm);
            for a in 0..n {
                assert!(((vp[a] - vm[a]) / (2.0 * eps) - d[a]).abs() < 1e-6);
            }
        }
    }
}
