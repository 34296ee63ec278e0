//! Property suites over the public API: positivity and normalization of
//! tomograms, the Schrödinger-Robertson bound, subadditivity, and
//! entanglement bounds for random inputs.

use ftomo::entanglement::{linear_entropy, linear_entropy_series, reduce_mode2};
use ftomo::entropic::{information_parts, ProbabilityVector};
use ftomo::special_fn::trapezoid;
use ftomo::states::{f_coherent, two_mode_f_coherent_total, FockAmplitudes};
use ftomo::tomography::{husimi, optical_tomogram, photon_tomogram};
use ftomo::uncertainty::deformed_quadrature_stats;
use ftomo::{Complex64 as C64, DeformationSpec};
use proptest::prelude::*;

fn state_from(parts: &[(f64, f64)]) -> FockAmplitudes {
    let coeffs: Vec<C64> = parts.iter().map(|&(re, im)| C64::new(re, im)).collect();
    FockAmplitudes::from_coeffs(coeffs, 0.0).unwrap()
}

fn amplitudes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..10)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
}

fn deformation() -> impl Strategy<Value = DeformationSpec> {
    prop_oneof![
        Just(DeformationSpec::identity()),
        (0.01..3.0f64).prop_map(|l| DeformationSpec::kerr(l).unwrap()),
        (0.01..0.5f64).prop_map(|l| DeformationSpec::qosc(l).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optical_tomogram_is_a_density(parts in amplitudes(), theta in 0.0..std::f64::consts::TAU) {
        let s = state_from(&parts);
        let total = trapezoid(|x| optical_tomogram(&s, x, theta), -12.0, 12.0, 2001);
        prop_assert!((total - 1.0).abs() < 1e-8);
        for i in 0..40 {
            prop_assert!(optical_tomogram(&s, -6.0 + 0.3 * i as f64, theta) >= 0.0);
        }
    }

    #[test]
    fn photon_tomogram_sums_to_one(parts in amplitudes(), re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let s = state_from(&parts);
        let a = C64::new(re, im);
        let total: f64 = (0..120).map(|n| photon_tomogram(&s, n, a)).sum();
        prop_assert!((total - 1.0).abs() < 1e-8);
        prop_assert!((husimi(&s, a) - photon_tomogram(&s, 0, -a)).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_robertson_holds(re in -1.5..1.5f64, im in -1.5..1.5f64, spec in deformation()) {
        let s = f_coherent(C64::new(re, im), &spec, 1e-14).unwrap();
        let st = deformed_quadrature_stats(&s, &spec).unwrap();
        prop_assert!(st.sr_residual() >= -1e-10, "residual {}", st.sr_residual());
    }

    #[test]
    fn subadditivity(raw in prop::collection::vec(0.0..1.0f64, 4..40), s in 2usize..6) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let parts = information_parts(&ProbabilityVector::new(p, 0.0).unwrap(), s).unwrap();
        prop_assert!(parts.information() >= -1e-12);
    }

    #[test]
    fn two_mode_entropy_is_bounded(a1 in 0.0..1.5f64, a2 in 0.0..1.5f64, lambda in 0.05..4.0f64) {
        let spec = DeformationSpec::kerr(lambda).unwrap();
        let series = linear_entropy_series(C64::new(a1, 0.0), C64::new(a2, 0.0), &spec, 1e-12).unwrap();
        prop_assert!((-1e-12..1.0).contains(&series));
        let state = two_mode_f_coherent_total(C64::new(a1, 0.0), C64::new(a2, 0.0), &spec, 1e-12).unwrap();
        let rho = reduce_mode2(&state);
        prop_assert!(rho.is_positive_semidefinite(1e-12));
        prop_assert!((linear_entropy(&rho) - series).abs() < 1e-8);
    }
}
