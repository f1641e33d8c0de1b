//! Cross-check solver: exact unit-speed transport along the lattice
//! diagonals with an upwind update of the characteristic amplitudes.
//!
//! In the basis `e+ = [1; i]`, `e- = [1; -i]` the system decouples into
//! `R_t + R_x = (i h1 + h2)/2` (rightward, carries the control) and
//! `L_t - L_x = (i h1 - h2)/2` (leftward), with `h = V u`. The lattice step
//! equals the characteristic speed, so transport is exact and both the
//! domain of influence and the boundary condition hold to the bit; the
//! source terms are integrated along each characteristic with a
//! predictor-corrector (trapezoid) update.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{C64, I};
use crate::potential::DynamicalPotential;

use super::neumann::grid_steps;
use super::{BoundaryControl, WaveField};

/// Marches the solution over `nt` time steps on `nx` spatial nodes, handing
/// each time level `(j, u1, u2)` to `sink`.
///
/// The right edge is fed with zeros, which is exact as long as the level
/// `t` satisfies `t <= x(nx-1)`; callers that march beyond the square must
/// size `nx` so the contaminated cone `x > x_max - (t - x_max)` stays
/// outside their report window.
pub fn characteristics_march(
    pot: &DynamicalPotential,
    ctrl: &BoundaryControl,
    nx: usize,
    nt: usize,
    h: f64,
    mut sink: impl FnMut(usize, &[C64], &[C64]),
) {
    let zero = C64::new(0.0, 0.0);
    let pv: Vec<f64> = (0..nx).map(|i| pot.p(i as f64 * h)).collect();
    let qv: Vec<f64> = (0..nx).map(|i| pot.q(i as f64 * h)).collect();

    // characteristic amplitudes: u = right*e+ + left*e-
    let mut right = vec![zero; nx];
    let mut left = vec![zero; nx];
    let mut new_right = vec![zero; nx];
    let mut new_left = vec![zero; nx];
    let mut u1 = vec![zero; nx];
    let mut u2 = vec![zero; nx];

    let sources = |r: &[C64], l: &[C64], i: usize, pv: &[f64], qv: &[f64]| -> (C64, C64) {
        let v1 = r[i] + l[i];
        let v2 = I * (r[i] - l[i]);
        let h1 = v1 * pv[i] + v2 * qv[i];
        let h2 = v1 * qv[i] - v2 * pv[i];
        ((I * h1 + h2) * 0.5, (I * h1 - h2) * 0.5)
    };

    sink(0, &u1, &u2);
    for j in 1..nt {
        let t = j as f64 * h;
        // predictor: explicit Euler along each characteristic
        for i in 0..nx {
            new_left[i] = if i + 1 < nx {
                let (_, src_l) = sources(&right, &left, i + 1, &pv, &qv);
                left[i + 1] + src_l * h
            } else {
                zero
            };
        }
        for i in (1..nx).rev() {
            let (src_r, _) = sources(&right, &left, i - 1, &pv, &qv);
            new_right[i] = right[i - 1] + src_r * h;
        }
        new_right[0] = ctrl.f(t) - new_left[0];

        // corrector: average the source at the foot and at the predicted head
        for i in 0..nx {
            if i + 1 < nx {
                let (_, src_foot) = sources(&right, &left, i + 1, &pv, &qv);
                let (_, src_head) = sources(&new_right, &new_left, i, &pv, &qv);
                new_left[i] = left[i + 1] + (src_foot + src_head) * (0.5 * h);
            }
        }
        for i in (1..nx).rev() {
            let (src_foot, _) = sources(&right, &left, i - 1, &pv, &qv);
            let (src_head, _) = sources(&new_right, &new_left, i, &pv, &qv);
            new_right[i] = right[i - 1] + (src_foot + src_head) * (0.5 * h);
        }
        new_right[0] = ctrl.f(t) - new_left[0];

        std::mem::swap(&mut right, &mut new_right);
        std::mem::swap(&mut left, &mut new_left);
        for i in 0..nx {
            u1[i] = right[i] + left[i];
            u2[i] = I * (right[i] - left[i]);
        }
        // the boundary column carries the control exactly
        u1[0] = ctrl.f(t);
        sink(j, &u1, &u2);
    }
}

/// Solves on the square `[0, X] x [0, T]`, `X = T`, with equal steps in `x`
/// and `t` (unit characteristic speed); unequal extents are rejected.
pub fn characteristics_solve(
    pot: &DynamicalPotential,
    ctrl: &BoundaryControl,
    domain: (f64, f64),
    h: f64,
) -> Result<WaveField> {
    let (x_extent, t_extent) = domain;
    if (x_extent - t_extent).abs() > 1e-12 * t_extent.abs().max(1.0) {
        return Err(Error::Parameter(format!(
            "characteristics solver needs equal extents, got X = {x_extent}, T = {t_extent}"
        )));
    }
    let n = grid_steps(t_extent, h)?;
    let nx = n + 1;
    let mut u1 = vec![Complex64::new(0.0, 0.0); nx * nx];
    let mut u2 = vec![Complex64::new(0.0, 0.0); nx * nx];
    characteristics_march(pot, ctrl, nx, nx, h, |j, lv1, lv2| {
        u1[j * nx..(j + 1) * nx].copy_from_slice(lv1);
        u2[j * nx..(j + 1) * nx].copy_from_slice(lv2);
    });
    Ok(WaveField::from_parts(h, nx, nx, u1, u2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential_transports_exactly() {
        let pot = DynamicalPotential::zero();
        let ctrl = BoundaryControl::t2exp();
        let field = characteristics_solve(&pot, &ctrl, (1.0, 1.0), 1.0 / 128.0).unwrap();
        for j in 0..field.nt() {
            for i in 0..field.nx() {
                let want = ctrl.f((j as f64 - i as f64) * field.h());
                assert!((field.u1(i, j) - want).norm() < 1e-13, "({i},{j})");
                assert!((field.u2(i, j) - I * want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_control_stays_zero() {
        let pot = DynamicalPotential::from_closures(|_| 0.3, |x| x.sin(), 1.1).unwrap();
        let ctrl = BoundaryControl::new(|_| Complex64::new(0.0, 0.0), 1e-12, 1e-12, "zero");
        let field = characteristics_solve(&pot, &ctrl, (1.0, 1.0), 1.0 / 64.0).unwrap();
        for idx in 0..field.nx() * field.nt() {
            assert_eq!(field.u1_slice()[idx], Complex64::new(0.0, 0.0));
            assert_eq!(field.u2_slice()[idx], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn causality_is_bitwise_exact() {
        let pot =
            DynamicalPotential::from_closures(|_| 0.0, |x| -2.0 / (1.0 + 2.0 * x), 2.0).unwrap();
        let ctrl = BoundaryControl::t2exp();
        let field = characteristics_solve(&pot, &ctrl, (1.0, 1.0), 1.0 / 64.0).unwrap();
        for j in 0..field.nt() {
            for i in 0..field.nx() {
                if j <= i {
                    assert_eq!(field.norm_at(i, j), 0.0, "below/on the characteristic");
                }
            }
        }
    }

    #[test]
    fn boundary_condition_exact() {
        let pot =
            DynamicalPotential::from_closures(|_| 0.0, |x| -2.0 / (1.0 + 2.0 * x), 2.0).unwrap();
        let ctrl = BoundaryControl::t2exp();
        let field = characteristics_solve(&pot, &ctrl, (1.0, 1.0), 1.0 / 64.0).unwrap();
        for j in 0..field.nt() {
            assert_eq!(field.u1(0, j), ctrl.f(j as f64 * field.h()));
        }
    }

    #[test]
    fn rejects_unequal_extents() {
        let pot = DynamicalPotential::zero();
        let ctrl = BoundaryControl::t2exp();
        assert!(characteristics_solve(&pot, &ctrl, (1.0, 2.0), 0.25).is_err());
    }
}
