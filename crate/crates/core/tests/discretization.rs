use std::f64::consts::PI;

use ibnls_core::radial::*;
use ibnls_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNIT_5_BALL: f64 = 5.263789013914324;

fn random_field(m: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn order(e1: f64, e2: f64) -> f64 {
    (e1.abs() / e2.abs()).log2()
}

#[test]
fn unit_ball_volume() {
    let g = build_grid(1.0, 1024, 5).unwrap();
    assert!((g.volume() - UNIT_5_BALL).abs() < 0.01 * UNIT_5_BALL);
    let errs: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&m| build_grid(1.0, m, 5).unwrap().volume() - UNIT_5_BALL)
        .collect();
    for w in errs.windows(2) {
        assert!((order(w[0], w[1]) - 2.0).abs() < 0.05);
    }
}

#[test]
fn gaussian_mass() {
    let g = build_grid(12.0, 1024, 5).unwrap();
    let u = g.sample_real(|r| (-r * r / 2.0).exp());
    let m = g.norm_sq(&u.values);
    assert!((m - PI.powf(2.5)).abs() < 1e-3 * PI.powf(2.5));
}

#[test]
fn paraboloid_laplacian_second_order() {
    let err = |m: usize| {
        let g = build_grid(1.0, m, 5).unwrap();
        let lap = build_laplacian(&g);
        let f: Vec<f64> = g.nodes.iter().map(|r| 1.0 - r * r).collect();
        let lf = lap.apply_real(&f);
        g.nodes
            .iter()
            .zip(&lf)
            .filter(|(r, _)| **r >= 0.25 && **r <= 0.75)
            .map(|(_, v)| (v + 10.0).abs())
            .fold(0.0, f64::max)
    };
    // leading term 2·N(N−1)(N−2)/24 · Δr²/r² at r = 1/4
    let e = err(256);
    let predicted = 2.0 * 60.0 / 24.0 * (1.0 / 256.0f64).powi(2) * 16.0;
    assert!((e - predicted).abs() < 0.05 * predicted, "{e} vs {predicted}");
    assert!(order(err(256), err(512)) > 1.9);
}

#[test]
fn random_fields_are_weighted_symmetric() {
    let g = build_grid(10.0, 300, 5).unwrap();
    let lap = build_laplacian(&g);
    let f = random_field(300, 1);
    let h = random_field(300, 2);
    let lhs = g.inner(&lap.apply(&f), &h);
    let rhs = g.inner(&f, &lap.apply(&h));
    let scale = g.norm_sq(&lap.apply(&f)).sqrt() * g.norm_sq(&h).sqrt();
    assert!((lhs - rhs).norm() < 1e-12 * scale);
}

#[test]
fn eigenbasis_is_orthonormal_and_complete() {
    let g = build_grid(8.0, 128, 5).unwrap();
    let lap = build_laplacian(&g);
    let basis = eigendecompose(&lap).unwrap();
    assert!(basis.eigenvalues.iter().all(|&l| l <= 0.0));

    for (i, k) in [(0, 0), (0, 1), (5, 5), (17, 90), (127, 127)] {
        let ei: Vec<f64> = basis.eigenfunction(i);
        let ek: Vec<f64> = basis.eigenfunction(k);
        let ip = g.inner_real(&ei, &ek);
        let expected = if i == k { 1.0 } else { 0.0 };
        assert!((ip - expected).abs() < 1e-10, "⟨e{i}, e{k}⟩ = {ip}");
    }

    let u = random_field(128, 3);
    let c = basis.coefficients(&u);
    let back = basis.synthesize(&c);
    let diff: Vec<Complex64> = back.iter().zip(&u).map(|(a, b)| a - b).collect();
    assert!(g.norm_sq(&diff).sqrt() <= 1e-10 * g.norm_sq(&u).sqrt());

    let parseval: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    assert!((parseval - g.norm_sq(&u)).abs() <= 1e-10 * g.norm_sq(&u));

    // L u = Σ λ_k c_k e_k
    let lam: Vec<f64> = basis.eigenvalues.clone();
    let lu_spec = basis.apply_real_symbol(&u, &lam);
    let lu = lap.apply(&u);
    let d: Vec<Complex64> = lu_spec.iter().zip(&lu).map(|(a, b)| a - b).collect();
    assert!(g.norm_sq(&d).sqrt() <= 1e-8 * g.norm_sq(&lu).sqrt());
}

#[test]
fn eigenvectors_have_positive_leading_component() {
    let g = build_grid(5.0, 64, 5).unwrap();
    let basis = eigendecompose(&build_laplacian(&g)).unwrap();
    for k in 0..64 {
        let col = basis.vectors.column(k);
        let peak = col.amax();
        let first = col.iter().find(|x| x.abs() > 1e-10 * peak).unwrap();
        assert!(*first > 0.0, "mode {k}");
    }
}

#[test]
fn ground_eigenvalue_converges_at_second_order() {
    // Dirichlet unit ball in ℝ^5: λ₀ = −j²_{3/2,1}, j_{3/2,1} = 4.493409457909064
    let exact = -(4.493409457909064f64).powi(2);
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&m| {
            let g = build_grid(1.0, m, 5).unwrap();
            eigendecompose(&build_laplacian(&g)).unwrap().eigenvalues[0] - exact
        })
        .collect();
    let ratio = errs[0] / errs[1];
    assert!((ratio - 4.0).abs() < 0.2, "{errs:?}");
    assert!((errs[1] / errs[2] - 4.0).abs() < 0.2, "{errs:?}");
}

#[test]
fn gaussian_norms_and_ball_mass() {
    let g = build_grid(12.0, 1024, 5).unwrap();
    let lap = build_laplacian(&g);
    let u = g.sample_real(|r| (-r * r / 2.0).exp()).values;
    let n = norms(&g, &lap, &u, 1.0, 2.0, &[2.0]);
    assert!((n.l2 * n.l2 - PI.powf(2.5)).abs() < 1e-3 * PI.powf(2.5));
    assert!((n.lp[0].1 - n.l2).abs() < 1e-12 * n.l2);
    // ∫_{B(0,1)} e^{−|x|²} dx = σ₄ ∫₀¹ r⁴ e^{−r²} dr; the ball edge sits
    // on a cell face when Δr = 1/128
    let g = build_grid(8.0, 1024, 5).unwrap();
    let u = g.sample_real(|r| (-r * r / 2.0).exp()).values;
    let sigma = sphere_area(5);
    let radial = 3.0 / 8.0 * PI.sqrt() * libm_erf(1.0) - (-1.0f64).exp() * (0.5 + 0.75);
    let exact = sigma * radial;
    let ball = ibnls_core::diagnostics::mass_in_ball(&g, &u, 1.0);
    assert!((ball - exact).abs() < 5e-3 * exact, "{ball} vs {exact}");
}

/// `erf` by its Maclaurin series; accurate to roundoff for `|x| ≤ 1`.
fn libm_erf(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for n in 1..40 {
        term *= -x * x / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    2.0 / PI.sqrt() * sum
}

#[test]
fn potential_converges_under_refinement() {
    let value = |m: usize| {
        let g = build_grid(12.0, m, 5).unwrap();
        let u = g.sample_real(|r| (-r * r / 2.0).exp()).values;
        potential_integral(&g, &u, 1.0, 2.0)
    };
    let reference = value(8192);
    let e1 = value(256) - reference;
    let e2 = value(512) - reference;
    assert!(e2.abs() < e1.abs());
    assert!(e2.abs() < 1e-4 * reference);
}

#[test]
fn container_roundtrip_through_file() {
    let g = build_grid(30.0, 64, 5).unwrap();
    let u = random_field(64, 9);
    let header = FieldHeader { dim: 5, m: 64, r_max: 30.0, b: 1.0, alpha: 2.0, t: 0.5, precision: Precision::Complex128 };
    let path = std::env::temp_dir().join(format!("ibnls-field-{}.bin", std::process::id()));
    write_field(std::fs::File::create(&path).unwrap(), &header, &u).unwrap();
    let (h, back) = read_field(std::fs::File::open(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    h.check_grid(&g).unwrap();
    assert_eq!(back, u);
    let other = build_grid(30.0, 128, 5).unwrap();
    assert!(h.check_grid(&other).is_err());
}
