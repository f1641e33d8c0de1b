//! Frequency-domain side: fundamental solutions of
//! `y' = i (z j + j V(x)) y`, numerical Weyl-function estimation by the
//! finite-interval least-growth minimizer, and the bridge between the two
//! system forms through the Fourier transform in `t`.


use crate::dynamical::{characteristics_march, BoundaryControl};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{C64, I, Mat2, ONE, ZERO};
use crate::potential::{dyn_to_spec, DynamicalPotential, SpectralPotential};

/// The constant frames tying the two system forms together:
/// `j = diag(1, -1)`, the flip `J = [[0,1],[1,0]]`, the evolution-form
/// `J_dyn = [[0,1],[-1,0]]`, and the unitary maps `K`, `K_cal`.
#[derive(Debug, Clone)]
pub struct FrameConstants {
    pub j_sig: Mat2,
    pub j_flip: Mat2,
    pub j_dyn: Mat2,
    pub k: Mat2,
    pub k_cal: Mat2,
}

impl FrameConstants {
    /// Builds the frames and validates their algebra by direct
    /// multiplication: `K K* = I`, `Kcal Kcal* = I`, `K j K* = J`,
    /// `Kcal J_dyn Kcal* = i j`, and the potential dictionary
    /// `Kcal J_dyn V Kcal* = i j V` with `v = iq - p` on a sample pair.
    pub fn validated() -> Result<Self> {
        let s = 1.0 / std::f64::consts::SQRT_2;
        let fc = FrameConstants {
            j_sig: Mat2::new(ONE, ZERO, ZERO, -ONE),
            j_flip: Mat2::new(ZERO, ONE, ONE, ZERO),
            j_dyn: Mat2::new(ZERO, ONE, -ONE, ZERO),
            k: Mat2::new(C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0)),
            k_cal: Mat2::new(C64::new(0.0, s), C64::new(s, 0.0), C64::new(0.0, -s), C64::new(s, 0.0)),
        };
        let id = Mat2::identity();
        let checks = [
            (fc.k.mul(&fc.k.adjoint()), id, "K K* = I"),
            (fc.k_cal.mul(&fc.k_cal.adjoint()), id, "Kcal Kcal* = I"),
            (fc.k.mul(&fc.j_sig).mul(&fc.k.adjoint()), fc.j_flip, "K j K* = J"),
            (
                fc.k_cal.mul(&fc.j_dyn).mul(&fc.k_cal.adjoint()),
                fc.j_sig.scale(I),
                "Kcal J_dyn Kcal* = i j",
            ),
        ];
        for (got, want, label) in checks {
            if got.sub(&want).norm() > 1e-14 {
                return Err(Error::Parameter(format!("frame identity failed: {label}")));
            }
        }
        // dictionary check on a sample pair (p, q)
        let (p, q) = (0.7, -1.3);
        let pot_dyn = Mat2::new(C64::new(p, 0.0), C64::new(q, 0.0), C64::new(q, 0.0), C64::new(-p, 0.0));
        let v = C64::new(-p, q);
        let pot_spec = Mat2::new(ZERO, v, v.conj(), ZERO);
        let lhs = fc.k_cal.mul(&fc.j_dyn).mul(&pot_dyn).mul(&fc.k_cal.adjoint());
        let rhs = fc.j_sig.mul(&pot_spec).scale(I);
        if lhs.sub(&rhs).norm() > 1e-14 {
            return Err(Error::Parameter("frame identity failed: potential dictionary".into()));
        }
        Ok(fc)
    }
}

/// Fundamental solution `Y(x, z)` sampled along an `x`-grid, normalized by
/// `Y(0) = I`; the generator is trace-free, so `det Y = 1` along the way.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    grid: Grid,
    z: C64,
    matrices: Vec<Mat2>,
    /// Rough a-priori estimate of the one-step integrator error summed over
    /// the interval.
    pub step_error_estimate: f64,
}

impl FundamentalSolution {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn at_node(&self, k: usize) -> &Mat2 {
        &self.matrices[k]
    }

    pub fn last(&self) -> &Mat2 {
        self.matrices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `max_k |det Y(x_k) - 1|`.
    pub fn det_defect(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| (m.det() - ONE).norm())
            .fold(0.0, f64::max)
    }

    /// `max_k ||Y* j Y - j||`; a conserved quantity for real `z`.
    pub fn j_unitarity_defect(&self) -> f64 {
        let j = Mat2::new(ONE, ZERO, ZERO, -ONE);
        self.matrices
            .iter()
            .map(|m| m.adjoint().mul(&j).mul(m).sub(&j).norm())
            .fold(0.0, f64::max)
    }
}

/// Integrates `Y' = i (z j + j V) Y`, `Y(0) = I`, with the exponential
/// midpoint rule: one exact traceless-exponential per step, which keeps
/// `det Y = 1` to rounding and is second-order accurate in `h`.
pub fn fundamental_solution(
    v: &SpectralPotential,
    z: C64,
    l: f64,
    h: f64,
) -> Result<FundamentalSolution> {
    if l.is_nan() || h.is_nan() || l <= 0.0 || h <= 0.0 {
        return Err(Error::Parameter(format!("need positive extent and step, got L = {l}, h = {h}")));
    }
    let n = (l / h).round() as usize;
    if n < 1 || ((n as f64) * h - l).abs() > 1e-9 * l.max(1.0) {
        return Err(Error::Parameter(format!("extent {l} is not a multiple of the step {h}")));
    }
    let grid = Grid::new(0.0, h, n + 1)?;
    let mut matrices = Vec::with_capacity(n + 1);
    let mut y = Mat2::identity();
    matrices.push(y);
    let mut gen_norm_max = 0.0f64;
    for k in 0..n {
        let xm = (k as f64 + 0.5) * h;
        let vv = v.v(xm);
        // B = i (z j + j V) = [[iz, iv], [-i conj(v), -iz]]
        let b = Mat2::new(I * z, I * vv, -I * vv.conj(), -I * z);
        gen_norm_max = gen_norm_max.max(b.norm());
        let step = b.scale(C64::new(h, 0.0)).exp_traceless();
        y = step.mul(&y);
        matrices.push(y);
    }
    // midpoint rule: local error ~ h^3 [B', B]/24 plus h^3 B''/24
    let step_error_estimate = l * h * h * gen_norm_max.powi(3) / 24.0;
    Ok(FundamentalSolution {
        grid,
        z,
        matrices,
        step_error_estimate,
    })
}

/// One Weyl-function evaluation: the contractive form `phi`, the Herglotz
/// form `phiH = i (1 + phi)/(1 - phi)`, and the length-doubling defect
/// `|phi_L - phi_{L/2}|` as a convergence diagnostic.
#[derive(Debug, Clone)]
pub struct WeylValue {
    pub z: C64,
    pub phi: C64,
    pub phi_h: C64,
    pub richardson_defect: f64,
}

impl WeylValue {
    /// `|phi| <= 1`, `Im phiH >= 0`, and the Moebius relation between the
    /// two forms, within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        if self.phi.norm() > 1.0 + tol {
            return Err(Error::NonContractiveEstimate { phi_abs: self.phi.norm() });
        }
        if self.phi_h.im < -tol {
            return Err(Error::Precondition(format!("Im phiH = {} < 0", self.phi_h.im)));
        }
        let back = (self.phi_h - I) / (self.phi_h + I);
        if (back - self.phi).norm() > 1e-12 * (1.0 + self.phi_h.norm()) {
            return Err(Error::Parameter("Moebius consistency failed".into()));
        }
        Ok(())
    }
}

/// Minimum `Im z` accepted by the estimator by default.
pub const DEFAULT_ETA_MIN: f64 = 0.5;

/// Moebius map from the contractive to the Herglotz form:
/// `phiH = i (1 + phi) / (1 - phi)`.
pub fn contractive_to_herglotz(phi: C64) -> Result<C64> {
    let denom = ONE - phi;
    if denom.norm() < 1e-9 {
        return Err(Error::MobiusPole { defect: denom.norm() });
    }
    Ok(I * (ONE + phi) / denom)
}

/// Inverse Moebius map: `phi = (phiH - i) / (phiH + i)`.
pub fn herglotz_to_contractive(phi_h: C64) -> Result<C64> {
    let denom = phi_h + I;
    if denom.norm() < 1e-12 {
        return Err(Error::MobiusPole { defect: denom.norm() });
    }
    Ok((phi_h - I) / denom)
}

/// Estimates the Weyl function at `z` (`Im z >= eta_min`) as the
/// least-growth minimizer over `[0, L]`:
/// `phi = argmin_w ||Y(L,z) [1; w]|| = -<col2, col1> / ||col2||^2`,
/// with the same minimizer at `L/2` as a Richardson-style convergence check.
pub fn weyl_estimate(
    v: &SpectralPotential,
    z: C64,
    l: f64,
    h: f64,
    eta_min: f64,
) -> Result<WeylValue> {
    if z.im < eta_min {
        return Err(Error::Precondition(format!(
            "Im z = {} below eta_min = {eta_min}",
            z.im
        )));
    }
    let sol = fundamental_solution(v, z, l, h)?;
    let phi = least_growth_minimizer(sol.last());
    let half = sol.at_node((sol.len() - 1) / 2);
    let phi_half = least_growth_minimizer(half);
    let defect = (phi - phi_half).norm();

    if phi.norm() > 1.0 + 1e-6 {
        return Err(Error::NonContractiveEstimate { phi_abs: phi.norm() });
    }
    let phi_h = contractive_to_herglotz(phi)?;
    Ok(WeylValue {
        z,
        phi,
        phi_h,
        richardson_defect: defect,
    })
}

fn least_growth_minimizer(y: &Mat2) -> C64 {
    let col1 = [y.a, y.c];
    let col2 = [y.b, y.d];
    let inner = col2[0].conj() * col1[0] + col2[1].conj() * col1[1];
    let norm2 = col2[0].norm_sqr() + col2[1].norm_sqr();
    -inner / norm2
}

/// Report of the frequency bridge between a forward solve and the
/// frequency-domain system.
#[derive(Debug, Clone)]
pub struct BridgeReport {
    /// `max_x || z uhat + J_dyn uhat' + V uhat ||` over interior report nodes.
    pub residual: f64,
    /// Relative distance of `Kcal uhat(x)` from the span of `Y(x) [1; phi]`.
    pub collinearity_defect: f64,
    pub t_used: f64,
    pub x_solve: f64,
    pub phi: C64,
}

/// Fourier-transforms a forward solve in `t` and checks that the transform
/// solves the frequency-domain system and is collinear with the Weyl
/// solution `Y(x, z) [1; phi(z)]`.
///
/// Requires `Im z > M = 2 sqrt(2) M1`; the time horizon is chosen so
/// `e^{-(Im z - M) T} < tail_tol`. The solve marches a strip wide enough
/// that the zero-fed right edge never contaminates `[0, x_report]` before
/// `T`, and accumulates the transform on the fly, so the long-horizon field
/// is never materialized.
pub fn verify_frequency_bridge(
    pot: &DynamicalPotential,
    ctrl: &BoundaryControl,
    z: C64,
    h: f64,
    x_report: f64,
    tail_tol: f64,
    weyl_length: f64,
) -> Result<BridgeReport> {
    let m = pot.m();
    if z.im <= m {
        return Err(Error::Precondition(format!(
            "Im z = {} must exceed M = {m}",
            z.im
        )));
    }
    let t_needed = (1.0 / tail_tol).ln() / (z.im - m);
    let nt = ((t_needed / h).ceil() as usize).max(2) + 1;
    let t_used = (nt - 1) as f64 * h;
    let i_rep = (x_report / h).round() as usize;
    if i_rep < 2 {
        return Err(Error::Parameter("x_report too small for the step".into()));
    }
    // zero right-edge feed is exact until t = x_edge; beyond that the
    // contaminated cone x > x_edge - (t - x_edge) must miss [0, x_report]
    let x_solve = x_report.max((x_report + t_used) / 2.0) + 2.0 * h;
    let nx = (x_solve / h).ceil() as usize + 1;
    // a gap Im z - M near zero blows the horizon up; refuse absurd marches
    if (nx as u64).saturating_mul(nt as u64) > 4_000_000_000 {
        return Err(Error::Parameter(format!(
            "horizon T = {t_used:.3e} at step {h:.3e} needs {nx} x {nt} nodes; \
             increase Im z - M or loosen the tail tolerance"
        )));
    }

    let mut uhat1 = vec![ZERO; i_rep + 1];
    let mut uhat2 = vec![ZERO; i_rep + 1];
    characteristics_march(pot, ctrl, nx, nt, h, |j, u1, u2| {
        let t = j as f64 * h;
        // trapezoid in t; the integrand at T is ~ tail_tol by construction
        let w = if j == 0 || j == nt - 1 { 0.5 * h } else { h };
        let phase = (I * z * t).exp() * w;
        for i in 0..=i_rep {
            uhat1[i] += u1[i] * phase;
            uhat2[i] += u2[i] * phase;
        }
    });

    // (a) residual of z uhat + J_dyn uhat' + V uhat = 0
    let mut residual = 0.0f64;
    for i in 1..i_rep {
        let x = i as f64 * h;
        let d1 = (uhat1[i + 1] - uhat1[i - 1]) / (2.0 * h);
        let d2 = (uhat2[i + 1] - uhat2[i - 1]) / (2.0 * h);
        let (p, q) = (pot.p(x), pot.q(x));
        let r1 = z * uhat1[i] + d2 + uhat1[i] * p + uhat2[i] * q;
        let r2 = z * uhat2[i] - d1 + uhat1[i] * q - uhat2[i] * p;
        residual = residual.max((r1.norm_sqr() + r2.norm_sqr()).sqrt());
    }

    // (b) collinearity with the Weyl solution
    let v = dyn_to_spec(pot);
    let weyl = weyl_estimate(&v, z, weyl_length, h, DEFAULT_ETA_MIN)?;
    let y = fundamental_solution(&v, z, x_report, h)?;
    let frames = FrameConstants::validated()?;
    let mut stack_a: Vec<C64> = Vec::with_capacity(2 * (i_rep + 1));
    let mut stack_b: Vec<C64> = Vec::with_capacity(2 * (i_rep + 1));
    for i in 0..=i_rep {
        let mapped = frames.k_cal.apply([uhat1[i], uhat2[i]]);
        let weyl_dir = y.at_node(i).apply([ONE, weyl.phi]);
        stack_a.extend_from_slice(&mapped);
        stack_b.extend_from_slice(&weyl_dir);
    }
    let inner: C64 = stack_b.iter().zip(&stack_a).map(|(b, a)| b.conj() * a).sum();
    let norm_b: f64 = stack_b.iter().map(|b| b.norm_sqr()).sum();
    let norm_a: f64 = stack_a.iter().map(|a| a.norm_sqr()).sum();
    let lambda = inner / norm_b;
    let defect2: f64 = stack_a
        .iter()
        .zip(&stack_b)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum();
    let collinearity_defect = (defect2 / norm_a).sqrt();

    Ok(BridgeReport {
        residual,
        collinearity_defect,
        t_used,
        x_solve,
        phi: weyl.phi,
    })
}
