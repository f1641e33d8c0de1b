//! Accelerant machinery: conversions among the response function `r`, the
//! kernel data `(s, omega)` of the structured convolution operators, and the
//! Herglotz-form Weyl function, plus the high-energy asymptotics check.
//!
//! The algebra behind the conversions:
//! `r(t) = 2i conj(s'(t))`, so `omega(t) = s'(t) = (i/2) conj(r(t))` for
//! `t > 0`, extended by `omega(-x) = conj(omega(x))`, and
//! `s(x) = (1 + i int_0^x conj(r))/2` with `s(+0) = 1/2`.


use crate::dynamical::{ResponseFunction, ResponseOrigin};
use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::linalg::{C64, I};
use crate::quad::{cumulative_simpson, gauss_legendre, integrate_gl};

/// Kernel data of the structured operators on `[0, 2L]`: `s` and its
/// derivative `omega = s'`, carried on the positive half; negative
/// arguments come from the Hermitian extension.
#[derive(Debug, Clone)]
pub struct Accelerant {
    s: SampledFunction,
    omega: SampledFunction,
}

impl Accelerant {
    pub fn new(s: SampledFunction, omega: SampledFunction) -> Result<Self> {
        if s.grid() != omega.grid() {
            return Err(Error::GridMismatch("s and omega on different grids".into()));
        }
        Ok(Accelerant { s, omega })
    }

    pub fn s(&self) -> &SampledFunction {
        &self.s
    }

    pub fn omega(&self) -> &SampledFunction {
        &self.omega
    }

    pub fn grid(&self) -> &Grid {
        self.s.grid()
    }

    /// `omega` with the Hermitian extension `omega(-x) = conj(omega(x))`,
    /// linearly interpolated between nodes.
    pub fn omega_at(&self, x: f64) -> C64 {
        if x >= 0.0 {
            self.omega.eval(x)
        } else {
            self.omega.eval(-x).conj()
        }
    }

    pub fn s_at(&self, x: f64) -> C64 {
        self.s.eval(x)
    }
}

/// Builds the accelerant from a sampled response function:
/// `s` by cumulative composite Simpson of `(i/2) conj(r)`, `omega`
/// algebraically, on the grid of `r`.
pub fn accelerant_from_response(r: &ResponseFunction) -> Result<Accelerant> {
    let samples = r.samples();
    let grid = samples.grid().clone();
    let omega_values: Vec<C64> = samples.values().iter().map(|&v| v.conj() * I * 0.5).collect();
    let cum = cumulative_simpson(&omega_values, grid.h());
    let s_values: Vec<C64> = cum.iter().map(|&c| c + 0.5).collect();
    let omega = SampledFunction::new(grid.clone(), omega_values)?;
    let s = SampledFunction::new(grid, s_values)?;
    Accelerant::new(s, omega)
}

/// Reconstructs `r(t) = 2i conj(omega(t))` from accelerant data; the exact
/// pointwise inverse of [`accelerant_from_response`].
pub fn response_from_accelerant(acc: &Accelerant) -> Result<ResponseFunction> {
    let values: Vec<C64> = acc
        .omega
        .values()
        .iter()
        .map(|&w| w.conj() * C64::new(0.0, 2.0))
        .collect();
    let samples = SampledFunction::new(acc.grid().clone(), values)?;
    Ok(ResponseFunction::new(samples, ResponseOrigin::Explicit))
}

/// Default contour height for [`response_from_weyl`] when the potential
/// bound is known: `eta = M + 2` with `M = 2 sqrt(2) M1`.
pub fn default_eta(pot: &crate::potential::DynamicalPotential) -> f64 {
    pot.m() + 2.0
}

/// Diagnostics of the inverse Fourier reconstruction in
/// [`response_from_weyl`].
#[derive(Debug, Clone)]
pub struct InverseFourierReport {
    /// Per-node bound for the neglected `|xi| > a` tail, including the
    /// `e^{eta t}` amplification.
    pub tail_bound: Vec<f64>,
    pub max_tail_bound: f64,
    pub xi_step: f64,
    pub a_max: f64,
}

/// Recovers `r` on `grid` from the Herglotz-form Weyl function along the
/// horizontal contour `Im z = eta`:
/// `r(t) = (e^{eta t}/2pi) int_{-a}^{a} e^{-i xi t} (phiH(xi + i eta) - i) dxi`,
/// by the trapezoid rule with a step small enough that aliased copies are
/// damped by at least `e^{-8 eta t_max}`.
///
/// At `t = 0` the inversion converges to the jump midpoint; since `r`
/// vanishes for `t < 0` by convention, the `t = 0` node is doubled.
pub fn response_from_weyl(
    phi_h: impl Fn(C64) -> C64,
    eta: f64,
    a_max: f64,
    grid: &Grid,
    tail_tol: f64,
) -> Result<(ResponseFunction, InverseFourierReport)> {
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::Parameter(format!("eta must be positive, got {eta}")));
    }
    if a_max.is_nan() || a_max <= 0.0 {
        return Err(Error::Parameter(format!("a_max must be positive, got {a_max}")));
    }
    let t_max = grid.last().max(grid.h());
    let g = |xi: f64| phi_h(C64::new(xi, eta)) - I;

    let g_hi = g(a_max).norm();
    let g_lo = g(-a_max).norm();
    let edge = g_hi.max(g_lo);
    if edge > tail_tol {
        return Err(Error::Truncation {
            tail: edge,
            // 1/xi decay model for the integrand
            suggested_a: a_max * edge / tail_tol,
        });
    }

    let step_cap = std::f64::consts::PI / (4.0 * t_max);
    let n_steps = ((2.0 * a_max) / step_cap).ceil() as usize;
    if (n_steps as u64).saturating_mul(grid.len() as u64) > 2_000_000_000 {
        return Err(Error::Parameter(format!(
            "contour needs {n_steps} samples for {} output nodes; \
             reduce a_max or the grid span",
            grid.len()
        )));
    }
    let dxi = 2.0 * a_max / n_steps as f64;

    let g_values: Vec<C64> = (0..=n_steps).map(|k| g(-a_max + k as f64 * dxi)).collect();

    let mut values = Vec::with_capacity(grid.len());
    let mut tail_bound = Vec::with_capacity(grid.len());
    for (node_idx, t) in grid.nodes().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (k, gv) in g_values.iter().enumerate() {
            let xi = -a_max + k as f64 * dxi;
            let w = if k == 0 || k == n_steps { 0.5 } else { 1.0 };
            acc += *gv * (C64::new(0.0, -xi * t)).exp() * w;
        }
        let amp = (eta * t).exp() / (2.0 * std::f64::consts::PI);
        let mut val = acc * dxi * amp;
        if node_idx == 0 && t == 0.0 {
            val *= 2.0;
        }
        values.push(val);
        // leading integration-by-parts term of the neglected tail
        let denom = t.max(grid.h());
        tail_bound.push(amp * (g_hi + g_lo) / denom);
    }
    let max_tail = tail_bound.iter().copied().fold(0.0, f64::max);
    let samples = SampledFunction::new(grid.clone(), values)?;
    Ok((
        ResponseFunction::new(samples, ResponseOrigin::InverseFourier),
        InverseFourierReport {
            tail_bound,
            max_tail_bound: max_tail,
            xi_step: dxi,
            a_max,
        },
    ))
}

/// One row of the asymptotics report.
#[derive(Debug, Clone)]
pub struct AsymptoticsRow {
    pub tau: f64,
    /// `|Delta(i tau)|` with `Delta = phiH - i - 2i int_0^l e^{-tau x} conj(omega) dx`.
    pub delta_abs: f64,
    /// `|Delta| / (tau e^{-tau l})`.
    pub normalized: f64,
    /// True when the defect was resolved by the direct difference; false
    /// when it fell below the f64 cancellation floor and was evaluated
    /// through the tail integral of `omega` beyond `l` instead.
    pub direct: bool,
}

#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub rows: Vec<AsymptoticsRow>,
    pub strictly_decreasing: bool,
}

/// Checks the high-energy expansion of `phiH` against accelerant data on
/// `[0, l]` along the imaginary ray: the normalized defect
/// `|Delta(i tau)| / (tau e^{-tau l})` should decrease toward 0.
///
/// The direct difference cancels to `e^{-tau l}` relative accuracy, which
/// for large `tau` falls below what f64 can represent. When that happens,
/// the defect is evaluated through the equivalent tail form
/// `Delta = 2i int_l^{x_max} e^{-tau x} conj(omega) dx`, which needs
/// `omega` beyond `l` (available whenever `l < x_max`).
pub fn check_asymptotics(
    phi_h: impl Fn(C64) -> C64,
    omega: impl Fn(f64) -> C64,
    omega_extent: f64,
    l: f64,
    tau_grid: &[f64],
) -> Result<AsymptoticsReport> {
    if l.is_nan() || l <= 0.0 || l > omega_extent {
        return Err(Error::Parameter(format!(
            "window l = {l} must lie in (0, {omega_extent}]"
        )));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) || tau_grid.first().is_none_or(|&t| t <= 0.0) {
        return Err(Error::Parameter("tau grid must be positive and increasing".into()));
    }

    let (nodes, weights) = gauss_legendre(16);
    // panels sized by the decay rate so the integrand is resolved everywhere
    let laplace = |tau: f64, a: f64, b: f64| -> C64 {
        let panels = (((b - a) * (tau + 1.0) / 4.0).ceil() as usize).clamp(2, 4096);
        let dx = (b - a) / panels as f64;
        let mut total = C64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * dx;
            let half = 0.5 * dx;
            let mut acc = C64::new(0.0, 0.0);
            for (xi, w) in nodes.iter().zip(&weights) {
                let x = mid + half * xi;
                acc += omega(x).conj() * (-tau * x).exp() * *w;
            }
            total += acc * half;
        }
        total
    };

    let mut rows = Vec::with_capacity(tau_grid.len());
    for &tau in tau_grid {
        let weyl_term = phi_h(C64::new(0.0, tau)) - I;
        let window = laplace(tau, 0.0, l) * C64::new(0.0, 2.0);
        let direct = weyl_term - window;
        let floor = 64.0 * f64::EPSILON * (weyl_term.norm() + window.norm());
        let (delta_abs, used_direct) = if direct.norm() > floor || l >= omega_extent {
            (direct.norm(), true)
        } else {
            let tail = laplace(tau, l, omega_extent) * C64::new(0.0, 2.0);
            (tail.norm(), false)
        };
        let normalized = delta_abs / (tau * (-tau * l).exp());
        rows.push(AsymptoticsRow {
            tau,
            delta_abs,
            normalized,
            direct: used_direct,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].normalized < w[0].normalized);
    Ok(AsymptoticsReport { rows, strictly_decreasing })
}

/// Truncated Fourier image `int_0^T e^{izt} r(t) dt` of a sampled response,
/// for the bridge check `rhat(z) + i = phiH(z)`.
pub fn response_fourier_image(r: &ResponseFunction, z: C64, t_max: f64) -> C64 {
    let samples = r.samples();
    let t_end = t_max.min(samples.grid().last());
    integrate_gl(
        |t| samples.eval(t) * (z * C64::new(0.0, t)).exp(),
        0.0,
        t_end,
        8,
        ((t_end / samples.grid().h()).ceil() as usize).max(1),
    )
}
