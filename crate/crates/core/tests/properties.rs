//! Property tests for the algebraic identities the pipeline leans on.

use dirac_echo::amplitude::{accelerant_from_response, response_from_accelerant};
use dirac_echo::dynamical::{ResponseFunction, ResponseOrigin};
use dirac_echo::gbdt::scalar_params;
use dirac_echo::grid::{Grid, SampledFunction};
use dirac_echo::inverse::invert_response;
use dirac_echo::potential::{dyn_to_spec_sampled, spec_to_dyn_sampled};
use dirac_echo::spectral::{contractive_to_herglotz, herglotz_to_contractive};
use num_complex::Complex64;
use proptest::prelude::*;

type C64 = Complex64;

fn sampled_values(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), n)
}

proptest! {
    #[test]
    fn potential_dictionary_roundtrips_exactly(values in sampled_values(33)) {
        let grid = Grid::span(0.0, 1.0, 33).unwrap();
        let v = SampledFunction::new(
            grid,
            values.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap();
        let (p, q) = spec_to_dyn_sampled(&v);
        let back = dyn_to_spec_sampled(&p, &q).unwrap();
        prop_assert_eq!(v, back);
    }

    #[test]
    fn moebius_maps_are_mutually_inverse(re in -0.95f64..0.95, im in -0.95f64..0.95) {
        let phi = C64::new(re, im);
        prop_assume!(phi.norm() < 0.97);
        let phi_h = contractive_to_herglotz(phi).unwrap();
        // contractive phi maps to the Herglotz class
        prop_assert!(phi_h.im >= -1e-12);
        let back = herglotz_to_contractive(phi_h).unwrap();
        prop_assert!((back - phi).norm() < 1e-12);
    }

    #[test]
    fn response_accelerant_roundtrip_is_algebraic(values in sampled_values(65)) {
        let grid = Grid::span(0.0, 2.0, 65).unwrap();
        let r = ResponseFunction::new(
            SampledFunction::new(
                grid,
                values.iter().map(|&(re, im)| C64::new(re, im)).collect(),
            )
            .unwrap(),
            ResponseOrigin::Explicit,
        );
        let acc = accelerant_from_response(&r).unwrap();
        let back = response_from_accelerant(&acc).unwrap();
        for k in 0..r.samples().len() {
            prop_assert!((r.samples().value(k) - back.samples().value(k)).norm() < 1e-15);
        }
        // omega(-x) = conj(omega(x)) by construction
        for x in [0.1, 0.9, 1.7] {
            prop_assert_eq!(acc.omega_at(-x), acc.omega_at(x).conj());
        }
    }

    #[test]
    fn csv_roundtrip_preserves_samples(values in sampled_values(17), x0 in -5.0f64..5.0, h in 0.001f64..10.0) {
        let grid = Grid::new(x0, h, 17).unwrap();
        let f = SampledFunction::new(
            grid,
            values.iter().map(|&(re, im)| C64::new(re, im)).collect(),
        )
        .unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = SampledFunction::read_csv(&buf[..]).unwrap();
        prop_assert_eq!(f.values(), back.values());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Scalar triples with `Im A = (|t1|^2 - |t2|^2)/2` always satisfy the
    /// structure identity; the bridge and Herglotz properties must follow.
    #[test]
    fn scalar_family_bridge_and_herglotz(
        a_re in -2.0f64..2.0,
        t1_re in -1.5f64..1.5,
        t1_im in -1.5f64..1.5,
        t2_re in -1.5f64..1.5,
        t2_im in -1.5f64..1.5,
    ) {
        let t1 = C64::new(t1_re, t1_im);
        let t2 = C64::new(t2_re, t2_im);
        let a = C64::new(a_re, (t1.norm_sqr() - t2.norm_sqr()) / 2.0);
        let params = scalar_params(a, t1, t2).unwrap();
        let bound = params.alpha_norm_bound();
        for k in 0..6 {
            let z = C64::new(1.3 * k as f64 - 3.0, bound + 0.5 + k as f64);
            let w = params.weyl(z).unwrap();
            let rh = params.response_hat(z).unwrap();
            prop_assert!((w - rh - C64::new(0.0, 1.0)).norm() < 1e-12);
        }
        for k in 0..5 {
            let z = C64::new(0.7 * k as f64 - 1.5, 0.3 + k as f64);
            let w = params.weyl(z).unwrap();
            prop_assert!(w.im >= -1e-9, "Herglotz violated: {w} at {z}");
        }
    }

    /// Scaled-down members of the decaying family keep the structured
    /// operators positive; inversion must emit only the half interval and
    /// a numerically real coupling (p stays zero for purely imaginary v).
    #[test]
    fn inversion_of_scaled_decay_family(gamma in 0.05f64..0.95) {
        let grid = Grid::span(0.0, 2.0, 201).unwrap();
        let r = ResponseFunction::new(
            SampledFunction::from_fn(grid, |t| {
                C64::new(0.0, -2.0 * gamma) * (-2.0 * t).exp()
            })
            .unwrap(),
            ResponseOrigin::Explicit,
        );
        let out = invert_response(&r, 201).unwrap();
        prop_assert!(out.v.grid().last() <= 1.0 + 1e-12);
        prop_assert!(out.p.sup_norm() < 1e-6, "p leak {:.3e}", out.p.sup_norm());
        // kernel trace at the origin: q(0) = Im r(0) = -2 gamma
        prop_assert!((out.q.value(0).re + 2.0 * gamma).abs() < 0.05 * gamma + 1e-3);
    }
}
