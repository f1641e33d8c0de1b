//! Small dense complex linear algebra: 2x2 matrices with an exact traceless
//! exponential, a scaling-and-squaring matrix exponential for n x n systems,
//! and Hermitian positive-definite helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: C64 = Complex64 { re: 0.0, im: 1.0 };

/// Dense 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Exponential of a traceless 2x2 matrix.
    ///
    /// For trace-free `B`, `B^2 = mu^2 I` with `mu^2 = a^2 + b c`, hence
    /// `exp(B) = cosh(mu) I + sinhc(mu) B`. Both `cosh` and `sinhc` are even,
    /// so the square-root branch does not matter. Preserves `det = 1` up to
    /// rounding.
    pub fn exp_traceless(&self) -> Mat2 {
        debug_assert!(self.trace().norm() < 1e-12 * (1.0 + self.norm()));
        let mu2 = self.a * self.a + self.b * self.c;
        let mu = mu2.sqrt();
        let cosh = mu.cosh();
        let sinhc = complex_sinhc(mu);
        Mat2::new(
            cosh + sinhc * self.a,
            sinhc * self.b,
            sinhc * self.c,
            cosh + sinhc * self.d,
        )
    }
}

/// sinh(z)/z, stable near the origin.
fn complex_sinhc(z: C64) -> C64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        ONE + z2 / 6.0 * (ONE + z2 / 20.0 * (ONE + z2 / 42.0))
    } else {
        z.sinh() / z
    }
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// The argument is scaled until its 1-norm is below 1/4, the series is summed
/// to machine precision, and the result squared back. Adequate for the small
/// parameter matrices used here.
pub fn matexp(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let norm1 = one_norm(m);
    let squarings = if norm1 > 0.25 {
        (norm1 / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / C64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &scaled) / C64::new(k as f64, 0.0);
        result += &term;
        if one_norm(&term) < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

pub fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Frobenius norm; an upper bound for the spectral norm.
pub fn frobenius_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    let eig = m
        .clone()
        .try_symmetric_eigen(1e-13, 10_000)
        .ok_or_else(|| Error::Singular("hermitian eigensolve did not converge".into()))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// In-place Cholesky factorization `A = L L^H` of a Hermitian
/// positive-definite matrix stored row-major in `a` (the lower triangle is
/// referenced and overwritten by `L`, so the inner dot products run over
/// contiguous rows). Returns the failing row on a non-positive pivot,
/// which is the positivity gate for the structured operators.
///
/// A Cholesky factor of a leading principal block is the leading block of
/// the factor, so one factorization serves all nested subsystems through
/// [`cholesky_solve_leading`].
pub fn cholesky_in_place(a: &mut [C64], n: usize) -> std::result::Result<(), usize> {
    debug_assert_eq!(a.len(), n * n);
    for i in 0..n {
        let (done, row_i) = a.split_at_mut(i * n);
        let row_i = &mut row_i[..n];
        for j in 0..i {
            let row_j = &done[j * n..j * n + j];
            let mut s = row_i[j];
            for (lik, ljk) in row_i[..j].iter().zip(row_j) {
                s -= lik * ljk.conj();
            }
            row_i[j] = s / done[j * n + j].re;
        }
        let mut d = row_i[i].re;
        for lik in &row_i[..i] {
            d -= lik.norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || !d.is_finite() {
            return Err(i);
        }
        row_i[i] = C64::new(d.sqrt(), 0.0);
    }
    Ok(())
}

/// Solves the leading `k x k` system `L L^H x = b` given the row-major
/// factor of the full `n x n` matrix.
pub fn cholesky_solve_leading(l: &[C64], n: usize, k: usize, b: &mut [C64]) {
    debug_assert!(k <= n);
    debug_assert!(b.len() >= k);
    for i in 0..k {
        let row = &l[i * n..i * n + i];
        let mut s = b[i];
        for (lik, bk) in row.iter().zip(b.iter()) {
            s -= lik * bk;
        }
        b[i] = s / l[i * n + i].re;
    }
    for i in (0..k).rev() {
        let mut s = b[i];
        for kk in i + 1..k {
            s -= l[kk * n + i].conj() * b[kk];
        }
        b[i] = s / l[i * n + i].re;
    }
}

/// LU-based solve of `(z I - m) x = rhs`, returning the solution and the
/// determinant of the shifted matrix (used for pole detection). The
/// determinant is reported through the error payload when the shift is
/// singular.
pub fn resolvent_solve(
    m: &DMatrix<C64>,
    z: C64,
    rhs: &DVector<C64>,
) -> Result<(DVector<C64>, C64)> {
    let n = m.nrows();
    let shifted = DMatrix::<C64>::from_fn(n, n, |i, j| {
        if i == j {
            z - m[(i, j)]
        } else {
            -m[(i, j)]
        }
    });
    let lu = shifted.lu();
    let det = lu.determinant();
    match lu.solve(rhs) {
        Some(x) => Ok((x, det)),
        None => Err(Error::Pole { distance: det.norm() }),
    }
}
