use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use fourpoint::hyperbolic::{collapse_front, HyperbolicCurve};
use fourpoint::population::TrigPolynomial;
use fourpoint::sphere::{equatorial_front, SphereCurve};
use fourpoint::sturm_hurwitz::verify_sturm_hurwitz;
use fourpoint::surface::Perturbation;
use fourpoint::wavefront::{critical_front, isoperimetric_defect, offset_curvature, propagate};
use fourpoint::{build_oval, count_mean_crossings, CurvatureProfile, SupportOval};

/// Harmonics 2..=5 small enough that `h + h''` stays positive.
fn oval_terms() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4).prop_map(|c| {
        let mut terms = vec![(0, 1.0, 0.0)];
        for (j, (a, b)) in c.into_iter().enumerate() {
            let n = j + 2;
            let scale = 0.1 / (n * n - 1) as f64;
            terms.push((n, a * scale, b * scale));
        }
        terms
    })
}

fn perturbations() -> impl Strategy<Value = Vec<Perturbation>> {
    prop::collection::vec((-1.0..1.0f64, 0.0..TAU), 3).prop_map(|c| {
        c.into_iter()
            .enumerate()
            .map(|(j, (a, phase))| {
                let n = j + 2;
                Perturbation {
                    n,
                    amp: 0.03 * a / (n * n) as f64,
                    phase,
                }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ovals_attain_their_mean_four_times(terms in oval_terms()) {
        let c = build_oval(&SupportOval::from_harmonics(&terms, 512)).unwrap();
        let profile = CurvatureProfile::of_curvature(&c);
        match count_mean_crossings(&profile, profile.default_tol()) {
            Ok(att) => prop_assert!(att.count() >= 4, "{} crossings", att.count()),
            // all perturbation amplitudes tiny: a circle
            Err(fourpoint::GeomError::DegenerateProfile) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn steiner_length_and_defect(terms in oval_terms(), t in -0.5..2.0f64) {
        let c = build_oval(&SupportOval::from_harmonics(&terms, 512)).unwrap();
        let f = propagate(&c, t).unwrap();
        prop_assert!((f.signed_length - (c.length + TAU * t)).abs() < 1e-9 * c.length);
        let at = c.area + c.length * t + PI * t * t;
        prop_assert!((f.area - at).abs() < 1e-9 * c.area);
        let d0 = isoperimetric_defect(&c, 0.0).unwrap();
        let dt = isoperimetric_defect(&c, t).unwrap();
        prop_assert!((dt - d0).abs() < 1e-8 * c.length * c.length);
    }

    #[test]
    fn critical_front_has_zero_length(terms in oval_terms()) {
        let c = build_oval(&SupportOval::from_harmonics(&terms, 512)).unwrap();
        if let Ok(cf) = critical_front(&c) {
            prop_assert!(cf.front.signed_length.abs() < 1e-9);
            prop_assert!(cf.cusp_count() >= 4);
        }
    }

    #[test]
    fn offset_curvature_matches_parallel_circles(r in 0.1..5.0f64, t in -0.09..5.0f64) {
        // a circle of radius r moves to radius r + t
        let k = offset_curvature(1.0 / r, t).unwrap();
        prop_assert!((k - 1.0 / (r + t)).abs() < 1e-12 / (r + t));
    }

    #[test]
    fn sturm_hurwitz_bound(m in 1usize..=6, coeffs in prop::collection::vec(-1.0..1.0f64, 2..12), lead in 0.1..1.0f64, angle in 0.0..TAU) {
        let mut terms = vec![(m, lead * angle.cos(), lead * angle.sin())];
        for (j, pair) in coeffs.chunks(2).enumerate() {
            terms.push((m + j + 1, pair[0], *pair.get(1).unwrap_or(&0.0)));
        }
        let p = TrigPolynomial { terms };
        let rep = verify_sturm_hurwitz(&p.sample(256)).unwrap();
        prop_assert_eq!(rep.first_harmonic, Some(m));
        prop_assert!(rep.sign_changes >= 2 * m);
        prop_assert!(rep.sign_changes.is_multiple_of(2));
    }

    #[test]
    fn equatorial_front_bisects_the_sphere(rho in 0.3..1.3f64, terms in perturbations()) {
        let c = SphereCurve::perturbed_circle(rho, &terms, 1024).unwrap();
        prop_assume!(c.is_convex());
        let ef = equatorial_front(&c).unwrap();
        prop_assert!(ef.area_error < 1e-8);
        prop_assert!(ef.inflections.at_least_four().unwrap_or(true));
    }

    #[test]
    fn hyperbolic_collapse(rho in 0.3..1.5f64, terms in perturbations()) {
        let c = HyperbolicCurve::perturbed_circle(rho, &terms, 1024).unwrap();
        prop_assume!(c.horocyclic_convex);
        let cf = collapse_front(&c, false).unwrap();
        prop_assert!(cf.front.signed_length.abs() < 1e-9);
        prop_assert!(cf.cusp_count().is_none_or(|n| n >= 4));
    }
}
