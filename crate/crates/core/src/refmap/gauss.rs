//! One-dimensional Gauss–Legendre rules and the reference-element rules built from them.

use std::sync::OnceLock;

const MAX_TABULATED: usize = 64;

/// Gauss–Legendre nodes and weights on [-1, 1], `n` points, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    static TABLE: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    assert!(
        (1..=MAX_TABULATED).contains(&n),
        "Gauss-Legendre rule with {n} points not supported"
    );
    let table = TABLE.get_or_init(|| (1..=MAX_TABULATED).map(compute_rule).collect());
    let (x, w) = &table[n - 1];
    (x, w)
}

/// Number of Gauss points needed to integrate degree `m` exactly.
pub fn points_for_exactness(m: usize) -> usize {
    m / 2 + 1
}

/// Legendre polynomial P_n(x) and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint: P_n'(±1) = (±1)^{n-1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Values P_0(x), ..., P_deg(x).
pub fn legendre_values(deg: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if deg == 0 {
        return;
    }
    out.push(x);
    for j in 2..=deg {
        let jf = j as f64;
        let v = ((2.0 * jf - 1.0) * x * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
        out.push(v);
    }
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [0, 1].
pub fn gauss_unit(n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    x.iter()
        .zip(w)
        .map(|(&xi, &wi)| (0.5 * (xi + 1.0), 0.5 * wi))
        .collect()
}

/// Points `(xi, eta)` and weights of a collapsed (Duffy) rule on the unit triangle
/// (0,0), (1,0), (0,1), exact for total degree `m`.
pub fn unit_triangle_rule(m: usize) -> Vec<(f64, f64, f64)> {
    let nr = m.div_ceil(2) + 1;
    let ns = points_for_exactness(m);
    let mut out = Vec::with_capacity(nr * ns);
    for &(r, wr) in &gauss_unit(nr) {
        for &(s, ws) in &gauss_unit(ns) {
            out.push((r * (1.0 - s), r * s, wr * ws * r));
        }
    }
    out
}

/// Tensor Gauss rule on the unit square, exact for degree `m` in each variable.
pub fn unit_square_rule(m: usize) -> Vec<(f64, f64, f64)> {
    let n = points_for_exactness(m);
    let g = gauss_unit(n);
    let mut out = Vec::with_capacity(n * n);
    for &(x, wx) in &g {
        for &(y, wy) in &g {
            out.push((x, y, wx * wy));
        }
    }
    out
}
