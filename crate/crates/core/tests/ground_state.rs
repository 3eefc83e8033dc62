use ibnls_core::diagnostics::{check_below_threshold, coercivity_gap};
use ibnls_core::ground_state::*;
use ibnls_core::{Complex64, Model, ModelParams};

fn params() -> ModelParams {
    ModelParams::new(5, 1.0, 2.0, true).unwrap()
}

fn canonical() -> (Model, ModelParams) {
    let p = params();
    (Model::new(p, 30.0, 1024).unwrap(), p)
}

fn solve(model: &Model, controls: &GroundStateControls) -> GroundState {
    solve_ground_state(&model.params, &model.grid, &model.lap, &model.basis, controls).unwrap()
}

fn scaled(gs: &GroundState, c: f64) -> Vec<Complex64> {
    gs.field().into_iter().map(|z| z * c).collect()
}

#[test]
fn canonical_ground_state() {
    let (model, p) = canonical();
    let gs = solve(&model, &GroundStateControls::default());
    assert!(gs.converged);
    assert!(gs.residual <= 1e-6, "residual {}", gs.residual);
    assert!(gs.identity_defect <= 1e-6, "identity {}", gs.identity_defect);
    assert!((gs.final_multiplier() - 1.0).abs() < 1e-8);
    let recomputed = stationary_residual(&model.grid, &model.lap, &gs.profile, &p, StationarySign::Plus);
    assert_eq!(recomputed, gs.residual);
    // positive and decreasing core; the tail of a fourth-order profile
    // oscillates in sign
    assert!(gs.profile[..100].iter().all(|&q| q > 0.0));
    assert!(gs.profile.windows(2).take(100).all(|w| w[1] < w[0]));

    let th = threshold_quantities(&gs, &p).unwrap();
    assert!(th.energy_mass > 0.0 && th.gradient_mass > 0.0);
    assert_eq!(th.sc, 1.0);
    assert_eq!(th.energy_mass, gs.energy * gs.mass);
    let again = threshold_quantities(&gs, &p).unwrap();
    assert_eq!(th, again);

    // independent seeds reach the same profile
    for width in [0.5, 2.0] {
        let other = solve(&model, &GroundStateControls { seed_width: width, ..Default::default() });
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(other.energy, gs.energy) < 1e-5);
        assert!(rel(other.mass, gs.mass) < 1e-5);
        let diff: Vec<f64> = other.profile.iter().zip(&gs.profile).map(|(a, b)| a - b).collect();
        assert!(model.grid.inner_real(&diff, &diff).sqrt() < 1e-5 * gs.mass.sqrt());
    }
}

#[test]
fn threshold_comparisons_of_scaled_profiles() {
    let (model, p) = canonical();
    let gs = solve(&model, &GroundStateControls::default());
    let check = |c: f64| check_below_threshold(&model.grid, &model.lap, &scaled(&gs, c), &gs, &p).unwrap();

    let zero = check(0.0);
    assert!(zero.cond_1_4 && zero.cond_1_5);
    for c in [0.5, 0.9] {
        let v = check(c);
        assert!(v.cond_1_4 && v.cond_1_5 && v.cond_1_6, "c = {c}");
        // ‖Δ(cQ)‖‖cQ‖ = c²‖ΔQ‖‖Q‖ at s_c = 1
        assert!((v.gradient_mass - c * c * v.gradient_mass_threshold).abs() < 1e-12 * v.gradient_mass_threshold);
    }
    let at = check(1.0);
    assert!(!at.cond_1_5, "Q itself is not strictly below");
    assert!((at.gradient_mass / at.gradient_mass_threshold - 1.0).abs() < 1e-12);
    assert!((at.energy_mass / at.energy_mass_threshold - 1.0).abs() < 1e-12);
    assert!(!check(1.1).cond_1_5);
}

#[test]
fn ground_state_is_never_strictly_below_itself() {
    for (r_max, cells) in [(20.0, 40), (60.0, 120), (100.0, 200), (30.0, 256)] {
        let model = Model::new(params(), r_max, cells).unwrap();
        let gs = solve(&model, &GroundStateControls::default());
        let v = check_below_threshold(&model.grid, &model.lap, &gs.field(), &gs, &model.params).unwrap();
        assert!(!v.cond_1_4 && !v.cond_1_5, "R_max = {r_max}, M = {cells}: {v:?}");
        assert_eq!(v.energy_mass, v.energy_mass_threshold);
    }
    let model = Model::new(params(), 20.0, 40).unwrap();
    let other = Model::new(params(), 20.0, 48).unwrap();
    let gs = solve(&other, &GroundStateControls::default());
    let u = vec![Complex64::new(0.0, 0.0); 40];
    assert!(check_below_threshold(&model.grid, &model.lap, &u, &gs, &model.params).is_err());
}

#[test]
fn coercivity_gap_vanishes_on_the_ground_state() {
    let (model, p) = canonical();
    let gs = solve(&model, &GroundStateControls::default());
    let gap = |c: f64| coercivity_gap(&model.grid, &model.lap, &scaled(&gs, c), 30.0, &p);
    // ‖ΔQ‖² = (Nα+2b)/(4(α+2)) ∫|x|^{−b}Q^{α+2} in the continuum
    assert!(gap(1.0).gap.abs() < 1e-3, "{:?}", gap(1.0));
    // (c²‖ΔQ‖² − (3/4)c⁴P) / c⁴P = (3/4)(1 − c²)/c²
    let half = gap(0.5);
    assert!((half.gap - 2.25).abs() < 1e-3, "{half:?}");
    assert!(gap(0.0).vacuous);
}

#[test]
fn threshold_converges_at_second_order() {
    // E·M at Δr = 20/256, 20/512, 20/1024
    let p = ModelParams::new(5, 1.0, 2.0, true).unwrap();
    let em: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&m| {
            let gs = solve(&Model::new(p, 20.0, m).unwrap(), &GroundStateControls::default());
            gs.energy * gs.mass
        })
        .collect();
    let ratio = (em[0] - em[1]) / (em[1] - em[2]);
    assert!((ratio - 4.0).abs() < 0.2, "{em:?}");
    let rich = |coarse: f64, fine: f64| (4.0 * fine - coarse) / 3.0;
    let r1 = rich(em[0], em[1]);
    let r2 = rich(em[1], em[2]);
    assert!((r1 - r2).abs() < 5e-5 * r2.abs(), "{r1} vs {r2}");
}

#[test]
fn minus_convention_is_labeled() {
    // On a bounded grid λ² − 1 stays away from zero, so the iteration can
    // settle on a discrete solution; it is reported under its own label.
    let p = ModelParams::new(5, 1.0, 2.0, true).unwrap();
    let model = Model::new(p, 20.0, 256).unwrap();
    let controls = GroundStateControls { sign: StationarySign::Minus, ..Default::default() };
    let plus = solve(&model, &GroundStateControls::default());
    match solve_ground_state(&p, &model.grid, &model.lap, &model.basis, &controls) {
        Ok(minus) => {
            let th = threshold_quantities(&minus, &p).unwrap();
            assert_eq!(th.convention, "(Δ²-1)Q = |x|^-b |Q|^α Q");
            let r = stationary_residual(&model.grid, &model.lap, &minus.profile, &p, StationarySign::Minus);
            assert!(r < 1e-6);
            assert!((minus.energy - plus.energy).abs() > 1e-3 * plus.energy.abs());
        }
        Err(e) => assert!(!matches!(e, ibnls_core::GroundStateError::Params(_)), "{e}"),
    }
}

#[test]
fn summary_serializes_without_profile() {
    let p = ModelParams::new(5, 1.0, 2.0, true).unwrap();
    let model = Model::new(p, 20.0, 128).unwrap();
    let gs = solve(&model, &GroundStateControls::default());
    let text = serde_json::to_string(&gs).unwrap();
    assert!(!text.contains("profile"));
    let back: GroundState = serde_json::from_str(&text).unwrap();
    assert_eq!(back.energy, gs.energy);
    assert_eq!(back.multipliers, gs.multipliers);
}
