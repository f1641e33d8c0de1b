//! Solution-series solver: `u = u_* + sum_k A^k u_*` with
//! `u_*(x,t) = f(t-x) [1; i]` and `(A g)(x,t) = -S(V(x) g(x,t))`, iterated
//! on the square lattice through the diagonal sweep machinery.

use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::potential::DynamicalPotential;

use super::s_operator::GridSweep;
use super::{BoundaryControl, WaveField};

/// Convergence metadata of a series solve.
#[derive(Debug, Clone)]
pub struct NeumannInfo {
    pub iterations: usize,
    /// A-priori tail bound `c0 * sum_{k > k_max} (M T)^k / k!`.
    pub truncation_bound: f64,
    /// Sup norm of the last added iterate; the observed truncation scale.
    pub last_iterate_sup: f64,
    pub warning: Option<String>,
}

/// Solves the evolution system on the square `[0, X] x [0, T]`, `X = T`,
/// with `k_max` series terms. Values for `t < x` are pinned to zero every
/// iteration. Returns the field and the truncation report; the a-priori
/// bound above `trunc_tol` only warns, since it is far looser than the
/// observed term decay.
pub fn neumann_solve(
    pot: &DynamicalPotential,
    ctrl: &BoundaryControl,
    domain: (f64, f64),
    h: f64,
    k_max: usize,
    trunc_tol: f64,
) -> Result<(WaveField, NeumannInfo)> {
    let (x_extent, t_extent) = domain;
    if (x_extent - t_extent).abs() > 1e-12 * t_extent.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "series solver needs a square domain, got X = {x_extent}, T = {t_extent}"
        )));
    }
    if k_max < 1 {
        return Err(Error::Parameter("k_max must be >= 1".into()));
    }
    let n = grid_steps(t_extent, h)?;
    let nx = n + 1;

    let pv: Vec<f64> = (0..nx).map(|i| pot.p(i as f64 * h)).collect();
    let qv: Vec<f64> = (0..nx).map(|i| pot.q(i as f64 * h)).collect();

    // u_* = f(t - x) [1; i]
    let zero = C64::new(0.0, 0.0);
    let mut g1 = vec![zero; nx * nx];
    let mut g2 = vec![zero; nx * nx];
    for j in 0..nx {
        for i in 0..=j.min(nx - 1) {
            let val = ctrl.f((j - i) as f64 * h);
            g1[j * nx + i] = val;
            g2[j * nx + i] = I * val;
        }
    }
    let mut u1 = g1.clone();
    let mut u2 = g2.clone();

    let sweep = GridSweep::new(n, h);
    let mut h1 = vec![zero; nx * nx];
    let mut h2 = vec![zero; nx * nx];
    let mut s1 = vec![zero; nx * nx];
    let mut s2 = vec![zero; nx * nx];

    let mut last_sup = 0.0f64;
    for _k in 0..k_max {
        // h = V g, nonzero only on t >= x
        for j in 0..nx {
            for i in 0..=j.min(nx - 1) {
                let idx = j * nx + i;
                let (p, q) = (pv[i], qv[i]);
                let (a, b) = (g1[idx], g2[idx]);
                h1[idx] = a * p + b * q;
                h2[idx] = a * q - b * p;
            }
        }
        sweep.apply(&h1, &h2, &mut s1, &mut s2);
        last_sup = 0.0;
        for idx in 0..nx * nx {
            g1[idx] = -s1[idx];
            g2[idx] = -s2[idx];
            u1[idx] += g1[idx];
            u2[idx] += g2[idx];
            let m = (g1[idx].norm_sqr() + g2[idx].norm_sqr()).sqrt();
            if m > last_sup {
                last_sup = m;
            }
        }
    }

    let truncation_bound = series_tail(ctrl.c0(), pot.m() * t_extent, k_max);
    let warning = (truncation_bound > trunc_tol).then(|| {
        format!(
            "a-priori truncation bound {truncation_bound:.3e} above tolerance {trunc_tol:.3e} \
             (observed last-term sup {last_sup:.3e})"
        )
    });

    Ok((
        WaveField::from_parts(h, nx, nx, u1, u2),
        NeumannInfo {
            iterations: k_max,
            truncation_bound,
            last_iterate_sup: last_sup,
            warning,
        },
    ))
}

pub(super) fn grid_steps(extent: f64, h: f64) -> Result<usize> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Parameter(format!("step must be positive, got {h}")));
    }
    let n = (extent / h).round();
    if n < 2.0 || (n * h - extent).abs() > 1e-9 * extent.max(1.0) {
        return Err(Error::Parameter(format!(
            "extent {extent} is not a multiple of the step {h}"
        )));
    }
    Ok(n as usize)
}

/// `c0 * sum_{k > k_max} lam^k / k!`, summed forward from the first tail
/// term (all terms positive, no cancellation).
fn series_tail(c0: f64, lam: f64, k_max: usize) -> f64 {
    let mut term = 1.0f64;
    for k in 1..=k_max + 1 {
        term *= lam / k as f64;
    }
    let mut sum = term;
    let mut k = k_max + 2;
    while term > 1e-300 && k < 10_000 {
        term *= lam / k as f64;
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
        k += 1;
    }
    c0 * sum
}
