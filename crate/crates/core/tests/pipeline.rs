//! Cross-module flows: the full dynamical round trip (simulate, extract
//! the kernel, invert back to the potential), the frequency-side path
//! through the Weyl function, and consistency checks between the explicit
//! family and the numeric estimators.

use dirac_echo::amplitude::{accelerant_from_response, response_from_weyl};
use dirac_echo::dynamical::{characteristics_solve, extract_response, BoundaryControl};
use dirac_echo::gbdt::{example_decay, example_steep};
use dirac_echo::grid::Grid;
use dirac_echo::inverse::{invert_response, recover_theta1, recover_theta2};
use dirac_echo::potential::{dyn_to_spec, spec_to_dyn, DynamicalPotential};
use dirac_echo::spectral::{verify_frequency_bridge, weyl_estimate};
use num_complex::Complex64;

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn decay_potential() -> DynamicalPotential {
    DynamicalPotential::from_closures(|_| 0.0, |x| -2.0 / (1.0 + 2.0 * x), 2.0).unwrap()
}

#[test]
fn dynamical_roundtrip_recovers_the_potential() {
    // simulate on [0,2]^2, read the kernel off the boundary, invert it
    let pot = decay_potential();
    let ctrl = BoundaryControl::t2exp();
    let h = 1.0 / 256.0;
    let field = characteristics_solve(&pot, &ctrl, (2.0, 2.0), h).unwrap();
    let (r, _) = extract_response(&field.boundary_trace_u2().unwrap(), &ctrl, 1.0).unwrap();
    let out = invert_response(&r, 513).unwrap();
    let mut worst = 0.0f64;
    for (k, x) in out.v.grid().nodes().enumerate() {
        let want = c(0.0, -2.0 / (1.0 + 2.0 * x));
        worst = worst.max((out.v.value(k) - want).norm() / want.norm());
    }
    assert!(worst < 2e-2, "sup relative error {worst:.3e}");
    // the evolution-form pair: p stays numerically zero for this family
    assert!(out.p.sup_norm() < 2e-2, "p leak {:.3e}", out.p.sup_norm());
}

#[test]
fn frequency_side_roundtrip_through_the_weyl_function() {
    // explicit Weyl function -> kernel by contour inversion -> potential
    let params = example_decay();
    let grid = Grid::span(0.0, 2.0, 401).unwrap();
    let weyl = move |z: C64| params.weyl(z).unwrap();
    let (r, _) = response_from_weyl(weyl, 4.0, 4.0e4, &grid, 1e-4).unwrap();
    let out = invert_response(&r, 401).unwrap();
    let mut worst = 0.0f64;
    for (k, x) in out.v.grid().nodes().enumerate() {
        let want = c(0.0, -2.0 / (1.0 + 2.0 * x));
        worst = worst.max((out.v.value(k) - want).norm() / want.norm());
    }
    assert!(worst < 2e-2, "sup relative error {worst:.3e}");
}

#[test]
fn weyl_estimator_matches_the_steep_family() {
    let params = example_steep();
    let v = params.spectral_potential();
    let z = c(0.0, 6.0);
    let w = weyl_estimate(&v, z, 8.0, 1.0 / 256.0, 0.5).unwrap();
    let want = params.weyl(z).unwrap();
    assert!(
        (w.phi_h - want).norm() < 1e-4,
        "phiH {} vs closed form {want}",
        w.phi_h
    );
}

#[test]
fn theta_frame_invariants_along_the_recovery() {
    let grid = Grid::span(0.0, 2.0, 401).unwrap();
    let r = dirac_echo::dynamical::ResponseFunction::new(
        dirac_echo::grid::SampledFunction::from_fn(grid, |t| c(0.0, -2.0) * (-2.0 * t).exp())
            .unwrap(),
        dirac_echo::dynamical::ResponseOrigin::Explicit,
    );
    let out = invert_response(&r, 401).unwrap();
    // theta1 J theta2^* vanishes along the grid, and the scalar shortcut
    // theta1 = -conj(theta2) j holds by construction
    assert!(out.thetas.frame_defect() < 5e-3, "{:.3e}", out.thetas.frame_defect());
    for (t1, t2) in out.thetas.theta1().iter().zip(out.thetas.theta2()) {
        let shortcut = recover_theta1(*t2);
        assert_eq!(t1[0], shortcut[0]);
        assert_eq!(t1[1], shortcut[1]);
    }
    // spot-check the standalone theta2 recovery against the pipeline
    let acc = accelerant_from_response(&r).unwrap();
    let direct = recover_theta2(&acc, 0.5, 201).unwrap();
    let k_mid = out
        .thetas
        .grid()
        .nodes()
        .position(|x| (x - 0.5).abs() < 1e-12)
        .unwrap();
    let from_pipeline = out.thetas.theta2()[k_mid];
    assert!((direct[0] - from_pipeline[0]).norm() < 1e-4);
    assert!((direct[1] - from_pipeline[1]).norm() < 1e-4);
}

#[test]
fn series_solution_satisfies_the_evolution_system_pointwise() {
    // independent of both the oracle family and the cross-check solver:
    // central finite differences of i u_t + J u_x + V u over interior
    // nodes away from the characteristic must vanish at the scheme order
    let pot = decay_potential();
    let ctrl = BoundaryControl::t2exp();
    let mut residuals = Vec::new();
    for n in [128usize, 256] {
        let h = 2.0 / n as f64;
        let (field, _) =
            dirac_echo::dynamical::neumann_solve(&pot, &ctrl, (2.0, 2.0), h, 24, 1e30).unwrap();
        let mut worst = 0.0f64;
        for j in 1..field.nt() - 1 {
            for i in 1..field.nx() - 1 {
                // skip the kink neighbourhood along t = x
                if j <= i + 2 {
                    continue;
                }
                let du1_dt = (field.u1(i, j + 1) - field.u1(i, j - 1)) / (2.0 * h);
                let du2_dt = (field.u2(i, j + 1) - field.u2(i, j - 1)) / (2.0 * h);
                let du1_dx = (field.u1(i + 1, j) - field.u1(i - 1, j)) / (2.0 * h);
                let du2_dx = (field.u2(i + 1, j) - field.u2(i - 1, j)) / (2.0 * h);
                let x = i as f64 * h;
                let (p, q) = (pot.p(x), pot.q(x));
                let i_unit = c(0.0, 1.0);
                // J = [[0,1],[-1,0]], V = [[p,q],[q,-p]]
                let r1 = i_unit * du1_dt + du2_dx + field.u1(i, j) * p + field.u2(i, j) * q;
                let r2 = i_unit * du2_dt - du1_dx + field.u1(i, j) * q - field.u2(i, j) * p;
                worst = worst.max((r1.norm_sqr() + r2.norm_sqr()).sqrt());
            }
        }
        residuals.push(worst);
    }
    // second-order differences of the (smooth away from t = x) solution
    let order = (residuals[0] / residuals[1]).log2();
    assert!(residuals[1] < 5e-3, "residual {:.3e}", residuals[1]);
    assert!(order > 1.5, "order {order:.2}, residuals {residuals:?}");
}

#[test]
fn steep_family_forward_trace_matches_convolution() {
    // same consistency check as the decaying family, on the second oracle
    let params = example_steep();
    let v = params.spectral_potential();
    let pot = spec_to_dyn(&v, 4.0).unwrap();
    let ctrl = BoundaryControl::t2exp();
    let h = 1.0 / 128.0;
    let field = characteristics_solve(&pot, &ctrl, (1.0, 1.0), h).unwrap();
    let mut worst = 0.0f64;
    for j in 0..field.nt() {
        let t = j as f64 * h;
        let conv = dirac_echo::quad::integrate_gl(
            |s| params.response(t - s) * ctrl.f(s),
            0.0,
            t,
            8,
            (j + 1).max(1),
        );
        let want = c(0.0, 1.0) * ctrl.f(t) + conv;
        worst = worst.max((field.u2(0, j) - want).norm());
    }
    assert!(worst < 5e-4, "trace error {worst:.3e}");
}

#[test]
fn zero_potential_bridge_residual_small() {
    // closed form: uhat = fhat(z) e^{izx} [1; i]
    let ctrl = BoundaryControl::t2exp();
    let report = verify_frequency_bridge(
        &DynamicalPotential::zero(),
        &ctrl,
        c(0.0, 3.0),
        1.0 / 512.0,
        2.0,
        1e-6,
        8.0,
    )
    .unwrap();
    assert!(report.residual <= 1e-4, "residual {:.3e}", report.residual);
    assert!(report.collinearity_defect <= 1e-3);
}

#[test]
fn potential_dictionary_composes_with_the_explicit_family() {
    // gbdt potential -> evolution pair -> back, against closed forms
    let params = example_steep();
    let v = params.spectral_potential();
    let pot = spec_to_dyn(&v, 4.0).unwrap();
    for x in [0.0f64, 0.3, 0.9] {
        let want = c(0.0, -12.0 / (4.0 * (3.0 * x).exp() - (-3.0 * x).exp()));
        assert!((pot.p(x) - (-want.re)).abs() < 1e-11);
        assert!((pot.q(x) - want.im).abs() < 1e-11);
    }
    let back = dyn_to_spec(&pot);
    for x in [0.1, 0.7, 1.4] {
        assert!((back.v(x) - v.v(x)).norm() < 1e-12);
    }
}

#[test]
fn extracted_kernel_value_at_zero_approaches_potential_trace() {
    // |r(0) - (p(0) + i q(0))| = O(h) on solver output
    let pot = decay_potential();
    let ctrl = BoundaryControl::t2exp();
    let trace = c(pot.p(0.0), pot.q(0.0));
    let mut errs = Vec::new();
    for n in [256usize, 512] {
        let h = 2.0 / n as f64;
        let field = characteristics_solve(&pot, &ctrl, (2.0, 2.0), h).unwrap();
        let (r, _) = extract_response(&field.boundary_trace_u2().unwrap(), &ctrl, 1.0).unwrap();
        errs.push((r.samples().value(0) - trace).norm());
    }
    assert!(errs[1] < 25.0 * (2.0 / 512.0), "error {:.3e} not O(h)", errs[1]);
    assert!(errs[1] < errs[0], "error must shrink with the step");
}
