//! Quadrature building blocks: Gauss–Legendre rules, composite integration
//! of closures, cumulative rules on sampled data, and definite integrals of
//! local polynomial interpolants (used by the segment integrals along grid
//! diagonals).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; accurate to machine
/// precision for the orders used here.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be >= 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre integration of a complex-valued closure.
pub fn integrate_gl(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    order: usize,
    panels: usize,
) -> Complex64 {
    let (nodes, weights) = gauss_legendre(order);
    let panels = panels.max(1);
    let dx = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * dx;
        let mid = lo + 0.5 * dx;
        let half = 0.5 * dx;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            acc += f(mid + half * x) * *w;
        }
        total += acc * half;
    }
    total
}

/// Cumulative integral of uniformly sampled data, composite Simpson.
///
/// Even prefixes are sums of Simpson pairs; odd nodes add the integral of
/// the local cubic over the trailing cell, so every prefix is exact for
/// cubics and fourth-order for smooth data. Returns `F` with
/// `F[k] = integral from x_0 to x_k`.
pub fn cumulative_simpson(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (values[0] + values[1]) * (0.5 * h);
        return out;
    }
    let mut even_acc = Complex64::new(0.0, 0.0);
    for pair in 0..(n - 1) / 2 {
        let j = 2 * pair;
        let pair_integral = (values[j] + values[j + 1] * 4.0 + values[j + 2]) * (h / 3.0);
        out[j + 2] = even_acc + pair_integral;
        even_acc = out[j + 2];
    }
    // odd nodes: cubic through the four nodes bracketing the trailing cell
    for j in (1..n).step_by(2) {
        let cell = j - 1;
        let base = (cell as isize - 1).clamp(0, n as isize - 4) as usize;
        let offsets: [f64; 4] = std::array::from_fn(|k| (base + k) as f64 - cell as f64);
        let w = poly_integral_weights(&offsets, 0.0, 1.0).expect("cubic stencil");
        let mut inc = Complex64::new(0.0, 0.0);
        for k in 0..4 {
            inc += values[base + k] * w[k];
        }
        out[j] = out[cell] + inc * h;
    }
    out
}

/// Trapezoid weights for `n` nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Definite integral over `[a, b]` (in node-index coordinates) of the
/// polynomial interpolating `(offsets[i], values[i])`.
///
/// Returns the weight vector so that `sum(w[i] * y[i])` is the integral.
/// Solved through the Vandermonde system in the monomial basis; intended
/// for stencils of at most 4 points.
pub fn poly_integral_weights(offsets: &[f64], a: f64, b: f64) -> Result<Vec<f64>> {
    let n = offsets.len();
    if n == 0 || n > 8 {
        return Err(Error::Parameter(format!("stencil size {n} unsupported")));
    }
    // V^T w = m, with V[i][j] = offsets[i]^j and m[j] = integral of s^j over [a, b]
    let mut mat = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for j in 0..n {
        for (i, &s) in offsets.iter().enumerate() {
            mat[j][i] = s.powi(j as i32);
        }
        let p = (j + 1) as f64;
        rhs[j] = (b.powi(j as i32 + 1) - a.powi(j as i32 + 1)) / p;
    }
    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if mat[r][col].abs() > mat[piv][col].abs() {
                piv = r;
            }
        }
        if mat[piv][col].abs() < 1e-14 {
            return Err(Error::Singular("poly_integral_weights".into()));
        }
        mat.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let factor = mat[r][col] / mat[col][col];
            let (pivot_rows, rest) = mat.split_at_mut(col + 1);
            let pivot = &pivot_rows[col];
            for (c, entry) in rest[r - col - 1].iter_mut().enumerate().skip(col) {
                *entry -= factor * pivot[c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut w = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for c in col + 1..n {
            acc -= mat[col][c] * w[c];
        }
        w[col] = acc / mat[col][col];
    }
    Ok(w)
}
