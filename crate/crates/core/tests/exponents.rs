use ibnls_core::exponents::*;
use num_traits::Zero;
use proptest::prelude::*;

/// Rational in `[lo, hi)` on a 1/1000 lattice of the interval.
fn lattice(lo: &Rational, hi: &Rational, k: u32) -> Rational {
    lo + (hi - lo) * rat(k as i64, 1000)
}

/// A tuple inside the window of the five-dimensional system:
/// `0 < b ≤ 12/5`, `7 − 2b ≤ α < 8 − 2b`, small positive `η`, `θ̃`.
fn window_tuple(kb: u32, ka: u32, ke: u32, kt: u32) -> (Rational, Rational, Rational, Rational) {
    let b = lattice(&rat(1, 1000), &rat(12, 5), kb);
    let alpha = lattice(&(int(7) - int(2) * &b), &(int(8) - int(2) * &b), ka);
    let cap = [rat(1, 100), (int(5) - int(2) * &b) / int(100), (int(8) - int(2) * &b - &alpha) / int(4)]
        .into_iter()
        .min()
        .unwrap();
    let eta = &cap * rat(ke as i64 + 1, 1001);
    let theta = rat(kt as i64 + 1, 100_100);
    (b, alpha, eta, theta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identities_hold_exactly_in_window(kb in 0u32..1000, ka in 0u32..1000, ke in 0u32..1000, kt in 0u32..1000) {
        let (b, alpha, eta, theta) = window_tuple(kb, ka, ke, kt);
        for region in [Region::Ball, Region::Exterior] {
            let report = verify_exponent_system(&b, &alpha, &eta, &theta, region).unwrap();
            let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
            prop_assert!(failed.is_empty(), "b={} alpha={} eta={} theta={}: {:?}", b, alpha, eta, theta, failed);
            let s = &report.system;
            prop_assert_eq!(&s.alpha1 + &s.alpha2 + &theta * &eta, alpha.clone());
            prop_assert_eq!(s.holder_sum(), rat(7, 10));
            prop_assert_eq!(s.time_interpolation_sum(), rat(1, 2));
        }
    }

    #[test]
    fn admissible_pairs_lie_on_scaling_line(qn in 1i64..60, qd in 1i64..20, rn in 1i64..60, rd in 1i64..20, dim in 3u32..9) {
        let pair = AdmissiblePair::biharmonic(
            ExtRational::Finite(rat(qn, qd)),
            ExtRational::Finite(rat(rn, rd)),
        );
        if is_admissible(&pair, dim) {
            prop_assert!(pair.scaling_defect(dim).is_zero());
        }
    }

    #[test]
    fn window_contains_shifted_exponent(dim in 5u32..12, k in 1i64..1000) {
        // 2N/(N+4+8δ) for δ ∈ (0, 1/100)
        let delta = rat(k, 100_000);
        let n = int(dim as i64);
        let r = int(2) * &n / (&n + int(4) + int(8) * delta);
        let w = embedding_window(dim, &int(1), &int(2));
        prop_assert!(w.low < r && r < w.high);
    }
}

#[test]
fn identity_b_on_rational_grid() {
    // 10 × 10 grid over (b, α) with fixed small η, θ̃
    let mut count = 0;
    for i in 0..10 {
        for j in 0..10 {
            let (b, alpha, eta, theta) = window_tuple(i * 100 + 7, j * 100 + 3, 500, 500);
            let s = ExponentSystem::build(&b, &alpha, &eta, &theta, Region::Ball);
            assert_eq!(&s.alpha1 + &s.alpha2, &alpha - &theta * &eta);
            count += 1;
        }
    }
    assert_eq!(count, 100);
}

#[test]
fn printed_mixed_interpolation_line_is_not_an_identity() {
    let report = verify_exponent_system(&int(2), &rat(7, 2), &rat(1, 100), &rat(1, 100), Region::Ball).unwrap();
    let printed = report.system.printed_interpolation_sum();
    assert!(printed != rat(1, 2));
    assert!((to_f64(&printed) - 1.4225).abs() < 1e-3);
}

#[test]
fn embedding_samples_pass_for_valid_parameters() {
    for (dim, b, alpha) in [(5, int(1), int(2)), (6, rat(1, 2), int(3)), (8, int(2), int(1))] {
        let w = embedding_window(dim, &b, &alpha);
        assert_eq!(w.samples.len(), 10);
        assert!(w.all_samples_pass(), "N={dim}");
    }
}

#[test]
fn serde_roundtrip_of_pairs() {
    let pair = AdmissiblePair::new(ExtRational::Infinite, ExtRational::Finite(rat(10, 3)), int(1));
    let text = serde_json::to_string(&pair).unwrap();
    assert_eq!(text, r#"{"q":"inf","r":"10/3","s":"1"}"#);
    let back: AdmissiblePair = serde_json::from_str(&text).unwrap();
    assert_eq!(back, pair);
}
