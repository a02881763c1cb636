use proptest::prelude::*;

use ultracoherent::circuit::{
    compile_steps, lower, no_files, parse, pretty_print, run, run_sequential, Gate,
};
use ultracoherent::linalg::{c, hs_norm, takagi, ComplexMatrix, ComplexVector, LogComplex};
use ultracoherent::representation::{act, check_composition, check_intertwining};
use ultracoherent::siegel::{make_point, moebius};
use ultracoherent::state::{
    norm, norm_closed_form, overlap, state_residual, weyl_apply, UltracoherentState,
};
use ultracoherent::symplectic::{compose, SymplecticElement};

fn complex() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

fn vector(d: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec(complex(), d)
        .prop_map(|v| ComplexVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| c(a, b))))
}

fn symmetric(d: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), d * d).prop_map(move |v| {
        let m = ComplexMatrix::from_iterator(d, d, v.into_iter().map(|(a, b)| c(a, b)));
        (&m + m.transpose()).scale(0.5)
    })
}

/// Siegel point with operator norm at most `radius`.
fn disc_point(d: usize, radius: f64) -> impl Strategy<Value = ComplexMatrix> {
    symmetric(d).prop_map(move |m| {
        let n = m.clone().svd(false, false).singular_values.max();
        if n == 0.0 {
            m
        } else {
            m.scale(radius / n.max(1.0))
        }
    })
}

fn state(d: usize) -> impl Strategy<Value = UltracoherentState> {
    (disc_point(d, 0.8), vector(d), complex()).prop_map(|(z, f, (a, p))| {
        let z = make_point(z, 1e-10).unwrap();
        UltracoherentState::new(z, f, LogComplex::new(0.5 * a, 3.0 * p)).unwrap()
    })
}

fn squeeze_element(d: usize) -> impl Strategy<Value = SymplecticElement> {
    (symmetric(d), vector(d)).prop_map(|(a, phases)| {
        let s = SymplecticElement::squeeze(&a.map(|z| c(z.re, 0.0)), 1e-10).unwrap();
        let k = ComplexMatrix::from_diagonal(&phases.map(|z| c(0.0, 3.0 * z.re).exp()));
        compose(&SymplecticElement::from_unitary(&k, 1e-10).unwrap(), &s).unwrap()
    })
}

fn gate(dim: usize) -> impl Strategy<Value = Gate> {
    let mode = 0..dim;
    prop_oneof![
        (mode.clone(), complex()).prop_map(|(mode, (a, b))| Gate::Displace {
            mode,
            amplitude: c(a, b)
        }),
        (mode.clone(), -1.0..1.0f64, -3.0..3.0f64).prop_map(|(mode, r, phi)| Gate::Squeeze {
            mode,
            r,
            phi
        }),
        (mode.clone(), -3.0..3.0f64).prop_map(|(mode, theta)| Gate::Rotate { mode, theta }),
        (mode.clone(), mode, -3.0..3.0f64, -3.0..3.0f64)
            .prop_filter("distinct modes", |(a, b, _, _)| a != b)
            .prop_map(|(mode1, mode2, theta, phi)| Gate::Beamsplitter {
                mode1,
                mode2,
                theta,
                phi
            }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_is_hermitian(x in state(2), y in state(2)) {
        let a = overlap(&x, &y).unwrap();
        let b = overlap(&y, &x).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn norm_routes_agree(x in state(3)) {
        let a = norm(&x);
        let b = norm_closed_form(&x).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn action_preserves_norm(r in squeeze_element(2), x in state(2)) {
        let before = norm(&x);
        let after = norm(&act(&r, &x).unwrap());
        prop_assert!((before - after).abs() <= 1e-9 * before);
    }

    #[test]
    fn composition_law(r1 in squeeze_element(2), r2 in squeeze_element(2), x in state(2)) {
        prop_assert!(check_composition(&r2, &r1, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn intertwining_law(r in squeeze_element(3), h in vector(3), x in state(3)) {
        prop_assert!(check_intertwining(&r, &h, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn moebius_stays_in_disc(r in squeeze_element(3), z in disc_point(3, 0.95)) {
        let z = make_point(z, 1e-10).unwrap();
        prop_assert!(moebius(&r, &z).unwrap().op_norm() < 1.0);
    }

    #[test]
    fn weyl_inverse(h in vector(2), x in state(2)) {
        let back = weyl_apply(&(-&h), &weyl_apply(&h, &x).unwrap()).unwrap();
        prop_assert!(state_residual(&back, &x) <= 1e-12);
    }

    #[test]
    fn takagi_reconstructs(a in symmetric(5)) {
        let t = takagi(&a, 1e-10 * (1.0 + hs_norm(&a))).unwrap();
        prop_assert!(hs_norm(&(&a - t.reconstruct())) <= 1e-10 * (1.0 + hs_norm(&a)));
    }

    #[test]
    fn parser_round_trip(gates in prop::collection::vec(gate(3), 0..8)) {
        prop_assert_eq!(parse(&pretty_print(&gates)).unwrap(), gates);
    }

    #[test]
    fn compiled_matches_sequential(gates in prop::collection::vec(gate(3), 0..8)) {
        let steps = lower(&gates, 3, no_files).unwrap();
        let compiled = run(&compile_steps(&steps, 3).unwrap()).unwrap();
        let sequential = run_sequential(&steps, 3).unwrap();
        prop_assert!(state_residual(&compiled, &sequential) <= 1e-9);
        prop_assert!((norm(&compiled) - 1.0).abs() <= 1e-9);
    }
}
