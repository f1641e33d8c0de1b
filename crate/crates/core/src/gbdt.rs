//! Explicit pseudo-exponential potentials built from a matrix triple
//! `(A, theta1, theta2)` by a generalized Baecklund-Darboux transformation.
//!
//! The family comes with closed-form Weyl functions (rational Herglotz),
//! response functions (matrix exponentials) and potentials, which makes it
//! the oracle for everything else in the crate: the triple determines
//!
//! * `v(x)   = -2i theta1^* e^{i x A^*} S(x)^{-1} e^{i x A} theta2`,
//! * `phiH(z) = i + 2 theta2^* (z I - alpha)^{-1} theta1`,
//! * `r(t)   = -2i theta2^* e^{-i t alpha} theta1`,
//! * `rhat(z) = 2 theta2^* (z I - alpha)^{-1} theta1`,
//!
//! with `alpha = A - i theta1 (theta1 + theta2)^*` and
//! `S(x) = I + int_0^x Lambda(t) Lambda(t)^* dt`,
//! `Lambda(t) = [e^{-i t A} theta1, e^{i t A} theta2]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, matexp, one_norm, resolvent_solve, C64, I, ONE, ZERO};
use crate::potential::SpectralPotential;
use crate::quad::gauss_legendre;

/// Validated parameter triple of the explicit family.
#[derive(Debug, Clone)]
pub struct GbdtParams {
    n: usize,
    a: DMatrix<C64>,
    theta1: DVector<C64>,
    theta2: DVector<C64>,
    alpha: DMatrix<C64>,
}

/// Tolerance for the structure identity `A - A^* = i (t1 t1^* - t2 t2^*)`.
const IDENTITY_TOL: f64 = 1e-12;

impl GbdtParams {
    /// Checks the structure identity, computes `alpha`, and cross-checks the
    /// equivalent identity `alpha - alpha^* = -i (t1+t2)(t1+t2)^*`.
    pub fn new(a: DMatrix<C64>, theta1: DVector<C64>, theta2: DVector<C64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || theta1.len() != n || theta2.len() != n || n == 0 {
            return Err(Error::Parameter(format!(
                "inconsistent dimensions: A is {}x{}, theta1 has {}, theta2 has {}",
                a.nrows(),
                a.ncols(),
                theta1.len(),
                theta2.len()
            )));
        }
        let scale = 1.0 + one_norm(&a) + theta1.norm() + theta2.norm();
        let lhs = &a - a.adjoint();
        let rhs = (&theta1 * theta1.adjoint() - &theta2 * theta2.adjoint()) * I;
        let defect = one_norm(&(lhs - rhs)) / scale;
        if defect > IDENTITY_TOL {
            return Err(Error::InvalidGbdtParams { defect });
        }

        let sum = &theta1 + &theta2;
        let alpha = &a - (&theta1 * sum.adjoint()) * I;
        let alt = (&alpha - alpha.adjoint()) + (&sum * sum.adjoint()) * I;
        let alt_defect = one_norm(&alt) / scale;
        if alt_defect > 10.0 * IDENTITY_TOL {
            return Err(Error::InvalidGbdtParams { defect: alt_defect });
        }

        Ok(GbdtParams { n, a, theta1, theta2, alpha })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn theta1(&self) -> &DVector<C64> {
        &self.theta1
    }

    pub fn theta2(&self) -> &DVector<C64> {
        &self.theta2
    }

    pub fn alpha(&self) -> &DMatrix<C64> {
        &self.alpha
    }

    /// Upper bound for the spectral norm of `alpha` (Frobenius), delimiting
    /// the half-plane where `rhat` is guaranteed.
    pub fn alpha_norm_bound(&self) -> f64 {
        frobenius_norm(&self.alpha)
    }

    /// `Lambda(t) Lambda(t)^* = L1 L1^* + L2 L2^*` at one point.
    fn gram_integrand(&self, t: f64) -> DMatrix<C64> {
        let it = C64::new(0.0, t);
        let e_minus = matexp(&(&self.a * (-it)));
        let e_plus = matexp(&(&self.a * it));
        let l1 = &e_minus * &self.theta1;
        let l2 = &e_plus * &self.theta2;
        &l1 * l1.adjoint() + &l2 * l2.adjoint()
    }

    /// `S(x) = I + int_0^x Lambda Lambda^* dt` by composite Gauss-Legendre.
    ///
    /// Panel count scales with `x * ||A||` so the entrywise exponentials are
    /// resolved; order 12 puts the quadrature error at machine precision for
    /// the panel sizes used.
    pub fn gram(&self, x: f64) -> Result<DMatrix<C64>> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("S(x) needs x >= 0, got {x}")));
        }
        let mut s = DMatrix::<C64>::identity(self.n, self.n);
        if x == 0.0 {
            return Ok(s);
        }
        let rate = 1.0 + one_norm(&self.a);
        let panels = ((x * rate * 2.0).ceil() as usize).clamp(4, 4096);
        let (nodes, weights) = gauss_legendre(12);
        let dx = x / panels as f64;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * dx;
            let half = 0.5 * dx;
            for (xi, w) in nodes.iter().zip(&weights) {
                let t = mid + half * xi;
                s += self.gram_integrand(t) * C64::new(w * half, 0.0);
            }
        }
        Ok(s)
    }

    /// The potential `v(x)` of the frequency-domain system.
    pub fn potential(&self, x: f64) -> Result<C64> {
        let s = self.gram(x)?;
        let ix = C64::new(0.0, x);
        let right = matexp(&(&self.a * ix)) * &self.theta2;
        let sol = s
            .lu()
            .solve(&right)
            .ok_or_else(|| Error::Singular("S(x) solve; quadrature failure".into()))?;
        let left = matexp(&(self.a.adjoint() * ix)) * &sol;
        let val = self.theta1.dotc(&left);
        Ok(val * C64::new(0.0, -2.0))
    }

    /// The Herglotz-form Weyl function `phiH(z)`.
    pub fn weyl(&self, z: C64) -> Result<C64> {
        Ok(self.rhat_raw(z)? + I)
    }

    /// The response function `r(t) = -2i theta2^* e^{-i t alpha} theta1`.
    pub fn response(&self, t: f64) -> C64 {
        let e = matexp(&(&self.alpha * C64::new(0.0, -t)));
        let v = &e * &self.theta1;
        self.theta2.dotc(&v) * C64::new(0.0, -2.0)
    }

    /// Fourier image `rhat(z) = 2 theta2^* (z I - alpha)^{-1} theta1`,
    /// guaranteed for `Im z > ||alpha||`; outside that half-plane the value
    /// is still computed off poles — check [`Self::in_guaranteed_region`].
    pub fn response_hat(&self, z: C64) -> Result<C64> {
        self.rhat_raw(z)
    }

    /// Whether `z` lies in the half-plane where the Fourier image of the
    /// response is guaranteed to equal the resolvent formula.
    pub fn in_guaranteed_region(&self, z: C64) -> bool {
        z.im > self.alpha_norm_bound()
    }

    fn rhat_raw(&self, z: C64) -> Result<C64> {
        let scale = (z.norm() + one_norm(&self.alpha)).powi(self.n as i32).max(1e-300);
        let (sol, det) = match resolvent_solve(&self.alpha, z, &self.theta1) {
            Ok(pair) => pair,
            Err(Error::Pole { distance }) => {
                return Err(Error::Pole { distance: distance / scale })
            }
            Err(other) => return Err(other),
        };
        let distance = det.norm() / scale;
        if distance < 1e-12 {
            return Err(Error::Pole { distance });
        }
        Ok(self.theta2.dotc(&sol) * 2.0)
    }

    /// The potential as a closure-backed [`SpectralPotential`], for feeding
    /// the solvers and the Weyl estimator.
    pub fn spectral_potential(&self) -> SpectralPotential {
        let params = self.clone();
        SpectralPotential::from_closure(move |x| {
            params.potential(x).expect("pseudo-exponential potential evaluation")
        })
    }
}

/// State of the transformation at one point: the propagated generators
/// `Lambda1 = e^{-ixA} theta1`, `Lambda2 = e^{ixA} theta2` and the Gram
/// matrix `S(x)`, which starts at the identity and stays Hermitian
/// positive definite.
#[derive(Debug, Clone)]
pub struct GbdtState {
    pub x: f64,
    pub lambda1: DVector<C64>,
    pub lambda2: DVector<C64>,
    pub gram: DMatrix<C64>,
}

impl GbdtState {
    /// `max(||S - S^*||, positivity defect)`; zero for a healthy state.
    pub fn defect(&self) -> f64 {
        let herm = one_norm(&(&self.gram - self.gram.adjoint()));
        let eigs = crate::linalg::hermitian_eigenvalues(&self.gram);
        let pos = match eigs {
            Ok(vals) => (-vals[0]).max(0.0),
            Err(_) => f64::INFINITY,
        };
        herm.max(pos)
    }
}

impl GbdtParams {
    /// The propagated generators and Gram matrix at `x`.
    pub fn state_at(&self, x: f64) -> Result<GbdtState> {
        let it = C64::new(0.0, x);
        let lambda1 = matexp(&(&self.a * (-it))) * &self.theta1;
        let lambda2 = matexp(&(&self.a * it)) * &self.theta2;
        Ok(GbdtState {
            x,
            lambda1,
            lambda2,
            gram: self.gram(x)?,
        })
    }

    /// Builds from row-major `A` entries and generator columns.
    pub fn from_entries(n: usize, a: &[C64], theta1: &[C64], theta2: &[C64]) -> Result<Self> {
        if a.len() != n * n || theta1.len() != n || theta2.len() != n {
            return Err(Error::Parameter(format!(
                "expected {n}x{n} matrix and {n}-entry generators, got {} / {} / {}",
                a.len(),
                theta1.len(),
                theta2.len()
            )));
        }
        GbdtParams::new(
            DMatrix::from_row_slice(n, n, a),
            DVector::from_column_slice(theta1),
            DVector::from_column_slice(theta2),
        )
    }
}

/// Convenience constructor for scalar (n = 1) triples.
pub fn scalar_params(a: C64, theta1: C64, theta2: C64) -> Result<GbdtParams> {
    GbdtParams::new(
        DMatrix::from_element(1, 1, a),
        DVector::from_element(1, theta1),
        DVector::from_element(1, theta2),
    )
}

/// `A = 0, theta1 = theta2 = 1`: `v(x) = -2i/(1+2x)`, `r(t) = -2i e^{-2t}`.
pub fn example_decay() -> GbdtParams {
    scalar_params(ZERO, ONE, ONE).expect("valid triple")
}

/// `A = -3i/2, theta1 = 1, theta2 = 2`:
/// `v(x) = -12i/(4 e^{3x} - e^{-3x})`, `r(t) = -4i e^{-9t/2}`.
pub fn example_steep() -> GbdtParams {
    scalar_params(C64::new(0.0, -1.5), ONE, C64::new(2.0, 0.0)).expect("valid triple")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn validates_scalar_triples() {
        // A = 0, theta1 = theta2 = 1: identity 0 = i(1 - 1)
        let p = scalar_params(ZERO, ONE, ONE).unwrap();
        assert!((p.alpha()[(0, 0)] - c(0.0, -2.0)).norm() < 1e-15);

        // A = -3i/2: A - A* = -3i = i(1 - 4)
        let p = scalar_params(c(0.0, -1.5), ONE, c(2.0, 0.0)).unwrap();
        assert!((p.alpha()[(0, 0)] - c(0.0, -4.5)).norm() < 1e-15);

        // A = 0 with theta2 = 2 violates the identity (0 != -3i)
        assert!(scalar_params(ZERO, ONE, c(2.0, 0.0)).is_err());
    }

    #[test]
    fn gram_matches_closed_forms() {
        // A=0, theta1=theta2=1: S(x) = 1 + 2x
        let p = example_decay();
        for x in [0.0, 0.1, 0.5, 1.0, 2.0] {
            let s = p.gram(x).unwrap()[(0, 0)];
            assert!((s - c(1.0 + 2.0 * x, 0.0)).norm() < 1e-12, "x = {x}");
        }
        // A=-3i/2, thetas (1,2): S(x) = (4 e^{3x} - e^{-3x})/3
        let p = example_steep();
        for x in [0.0, 0.3, 1.0, 2.0] {
            let s = p.gram(x).unwrap()[(0, 0)];
            let want = (4.0 * (3.0 * x).exp() - (-3.0 * x).exp()) / 3.0;
            assert!((s - c(want, 0.0)).norm() < 1e-10 * want, "x = {x}");
        }
    }

    #[test]
    fn potential_matches_closed_forms() {
        let p = example_decay();
        for x in [0.0, 0.25, 1.0, 1.7] {
            let v = p.potential(x).unwrap();
            let want = c(0.0, -2.0 / (1.0 + 2.0 * x));
            assert!((v - want).norm() < 1e-12, "x = {x}: {v} vs {want}");
        }
        let p = example_steep();
        for x in [0.0, 0.25, 1.0] {
            let v = p.potential(x).unwrap();
            let want = c(0.0, -12.0 / (4.0 * (3.0 * x).exp() - (-3.0 * x).exp()));
            assert!((v - want).norm() < 1e-11, "x = {x}: {v} vs {want}");
        }
    }

    #[test]
    fn potential_vanishes_without_second_generator() {
        // theta2 = 0 needs A - A* = i theta1 theta1*
        let p = scalar_params(c(0.0, 0.5), ONE, ZERO).unwrap();
        for x in [0.0, 0.5, 2.0] {
            assert!(p.potential(x).unwrap().norm() < 1e-13);
        }
    }

    #[test]
    fn weyl_matches_scalar_resolvent() {
        let p = example_decay();
        // phiH(z) = i + 2/(z + 2i); at z = 5i this is (5/7) i
        let got = p.weyl(c(0.0, 5.0)).unwrap();
        assert!((got - c(0.0, 5.0 / 7.0)).norm() < 1e-14);

        let p = example_steep();
        // phiH(z) = i + 4/(z + 9i/2)
        let z = c(1.0, 3.0);
        let want = I + 4.0 / (z + c(0.0, 4.5));
        assert!((p.weyl(z).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn weyl_is_constant_without_first_generator() {
        // theta1 = 0 needs A - A* = -i theta2 theta2*
        let p = scalar_params(c(0.0, -0.5), ZERO, ONE).unwrap();
        assert!((p.weyl(c(0.0, 2.0)).unwrap() - I).norm() < 1e-15);
        assert!(p.response_hat(c(0.0, 2.0)).unwrap().norm() < 1e-15);
        assert!(p.response(1.3).norm() < 1e-15);
    }

    #[test]
    fn response_matches_scalar_exponentials() {
        let p = example_decay();
        for t in [0.0f64, 0.5, 1.0, 3.0] {
            let want = c(0.0, -2.0) * (-2.0 * t).exp();
            assert!((p.response(t) - want).norm() < 1e-13, "t = {t}");
        }
        let p = example_steep();
        for t in [0.0f64, 0.5, 2.0] {
            let want = c(0.0, -4.0) * (-4.5 * t).exp();
            assert!((p.response(t) - want).norm() < 1e-13, "t = {t}");
        }
    }

    #[test]
    fn bridge_identity_weyl_equals_rhat_plus_i() {
        for params in [example_decay(), example_steep()] {
            let bound = params.alpha_norm_bound();
            for k in 0..20 {
                let z = c(0.4 * k as f64 - 3.0, bound + 1.0 + k as f64);
                let w = params.weyl(z).unwrap();
                let rh = params.response_hat(z).unwrap();
                assert!((w - rh - I).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn contractive_form_value() {
        // rhat(5i) = 2/(7i) = -(2/7) i, and phi = rhat/(rhat + 2i) = -1/6
        let p = example_decay();
        let rh = p.response_hat(c(0.0, 5.0)).unwrap();
        assert!((rh - c(0.0, -2.0 / 7.0)).norm() < 1e-14);
        let phi = rh / (rh + 2.0 * I);
        assert!((phi - c(-1.0 / 6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pole_detection() {
        let p = example_decay();
        // alpha = -2i
        assert!(matches!(p.response_hat(c(0.0, -2.0)), Err(Error::Pole { .. })));
        // off the pole the formula still evaluates outside the guaranteed
        // half-plane, and the region flag says so
        assert!(!p.in_guaranteed_region(c(0.0, 1.0)));
        assert!(p.in_guaranteed_region(c(0.0, 3.0)));
        let below = p.response_hat(c(0.0, 1.0)).unwrap();
        assert!((below - 2.0 / c(0.0, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn herglotz_property_on_sampled_upper_halfplane() {
        for params in [example_decay(), example_steep()] {
            for re in [-5.0, -1.0, 0.0, 2.0, 7.0] {
                for im in [0.1, 0.5, 2.0, 10.0] {
                    let w = params.weyl(c(re, im)).unwrap();
                    assert!(w.im >= -1e-10, "Im phiH = {} at {re}+{im}i", w.im);
                }
            }
            // phiH(i tau) -> i along the imaginary axis
            let far = params.weyl(c(0.0, 1e8)).unwrap();
            assert!((far - I).norm() < 1e-7);
        }
    }

    #[test]
    fn fourier_image_reached_by_quadrature() {
        // int_0^T e^{izt} r(t) dt -> rhat(z), error ~ e^{-(Im z - ||alpha||) T}
        use crate::quad::integrate_gl;
        let p = example_decay();
        let z = c(0.0, 6.0);
        let rhat = p.response_hat(z).unwrap();
        for (t_max, tol) in [(2.0, 1e-3), (5.0, 1e-8)] {
            let num = integrate_gl(
                |t| (z * C64::new(0.0, t)).exp() * p.response(t),
                0.0,
                t_max,
                12,
                (8.0 * t_max) as usize,
            );
            let err = (num - rhat).norm();
            let bound = ((z.im - 2.0) * -t_max).exp() * 2.0;
            assert!(err < tol && err < bound, "T = {t_max}: err {err:.3e}");
        }
    }

    #[test]
    fn response_at_zero_matches_potential_trace() {
        // r(0) = p(0) + i q(0) with p = -Re v, q = Im v
        for params in [example_decay(), example_steep()] {
            let r0 = params.response(0.0);
            let v0 = params.potential(0.0).unwrap();
            let trace = C64::new(-v0.re, v0.im);
            assert!((r0 - trace).norm() < 1e-12);
        }
    }

    #[test]
    fn state_starts_at_identity_and_stays_positive() {
        let p = example_steep();
        let s0 = p.state_at(0.0).unwrap();
        assert!((s0.gram[(0, 0)] - ONE).norm() < 1e-14);
        assert!((s0.lambda1[0] - ONE).norm() < 1e-14);
        assert!((s0.lambda2[0] - c(2.0, 0.0)).norm() < 1e-14);
        for x in [0.3, 1.0, 2.5] {
            let s = p.state_at(x).unwrap();
            assert!(s.defect() < 1e-10, "x = {x}: defect {}", s.defect());
            // Lambda picks up the exponential factors of A = -3i/2
            assert!((s.lambda1[0] - c((-1.5 * x).exp(), 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn gram_positive_definite_at_tested_points() {
        use crate::linalg::hermitian_eigenvalues;
        let two = GbdtParams::new(
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.5), c(0.2, 0.1), c(0.2, 0.1), c(0.0, 0.5)]),
            DVector::from_column_slice(&[ONE, ZERO]),
            DVector::from_column_slice(&[ZERO, ONE]),
        );
        // A - A* = i diag(1,1) - i? For theta1=e1, theta2=e2: i(e1 e1* - e2 e2*) = i diag(1,-1).
        // The matrix above has A - A* = i diag(1,1): invalid, so expect an error.
        assert!(two.is_err());

        // A 2x2 valid triple: A = i/2 (t1 t1* - t2 t2*) + H for Hermitian H
        let t1 = DVector::from_column_slice(&[ONE, c(0.5, 0.0)]);
        let t2 = DVector::from_column_slice(&[c(0.0, 1.0), ONE]);
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(-0.7, 0.0)]);
        let skew = (&t1 * t1.adjoint() - &t2 * t2.adjoint()) * c(0.0, 0.5);
        let p = GbdtParams::new(h + skew, t1, t2).unwrap();
        for x in [0.0, 0.5, 1.5] {
            let s = p.gram(x).unwrap();
            let vals = hermitian_eigenvalues(&((&s + s.adjoint()) * c(0.5, 0.0))).unwrap();
            assert!(vals[0] > 0.0, "S({x}) must be positive definite");
        }
    }
}
