//! Per-snapshot records and post-processing of stored runs.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::functionals::{boundary_fraction, energy, gradient_product, mass, mass_in_ball, virial_quantity};
use super::weights::{build_virial_weight, VirialWeight};
use crate::error::DiagnosticsError;
use crate::exponents::{is_admissible, AdmissiblePair};
use crate::model::Model;
use crate::radial::{lp_norm, potential_integral};

/// Start of the outer shell watched by the boundary monitor, as a share of
/// `R_max`.
pub const BOUNDARY_SHELL: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub grad_l2: f64,
    pub grad_product: f64,
    pub potential: f64,
    pub z: f64,
    /// One entry per configured ball radius.
    pub mass_in_ball: Vec<f64>,
    pub boundary_fraction: f64,
}

/// What to measure at every recorded snapshot.
#[derive(Debug, Clone)]
pub struct RecordSpec {
    pub ball_radii: Vec<f64>,
    pub virial: VirialWeight,
}

impl RecordSpec {
    pub fn new(model: &Model, ball_radii: Vec<f64>, virial_radius: f64) -> Result<Self, DiagnosticsError> {
        for &r in &ball_radii {
            if !(r >= 0.0 && r <= model.grid.r_max) {
                return Err(DiagnosticsError::Radius { radius: r, limit: model.grid.r_max });
            }
        }
        let virial = build_virial_weight(virial_radius, &model.grid)?;
        Ok(Self { ball_radii, virial })
    }

    pub fn record(&self, model: &Model, t: f64, u: &[Complex64]) -> DiagnosticsRecord {
        let (grid, lap, p) = (&model.grid, &model.lap, &model.params);
        let grad_l2 = grid.norm_sq(&lap.apply(u)).sqrt();
        DiagnosticsRecord {
            t,
            mass: mass(grid, u),
            energy: energy(grid, lap, u, p),
            grad_l2,
            grad_product: gradient_product(grid, lap, u, p.critical_index()),
            potential: potential_integral(grid, u, p.b, p.alpha),
            z: virial_quantity(grid, u, &self.virial),
            mass_in_ball: self.ball_radii.iter().map(|&r| mass_in_ball(grid, u, r)).collect(),
            boundary_fraction: boundary_fraction(grid, u, BOUNDARY_SHELL),
        }
    }

    /// CSV header matching [`write_csv`].
    pub fn csv_header(&self) -> String {
        let mut cols: Vec<String> =
            ["t", "mass", "energy", "grad_L2", "grad_product", "potential", "Z"].map(String::from).into();
        cols.extend(self.ball_radii.iter().map(|r| format!("mass_in_ball_R{r}")));
        cols.push("boundary_fraction".into());
        cols.join(",")
    }
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes records with 17 significant digits in the fixed column order.
pub fn write_csv<W: Write>(mut w: W, spec: &RecordSpec, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(w, "{}", spec.csv_header())?;
    for r in records {
        let mut cells: Vec<String> =
            [r.t, r.mass, r.energy, r.grad_l2, r.grad_product, r.potential, r.z].iter().map(|&x| fmt17(x)).collect();
        cells.extend(r.mass_in_ball.iter().map(|&x| fmt17(x)));
        cells.push(fmt17(r.boundary_fraction));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Fit of `A(T) = T^{−1} ∫₀ᵀ P(t) dt` against `T` on a log-log scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorawetzFit {
    pub t_list: Vec<f64>,
    pub averages: Vec<f64>,
    pub slope: f64,
    /// `−min{2,b}/(1+min{2,b})`.
    pub predicted: f64,
}

pub fn morawetz_average(
    times: &[f64],
    potential: &[f64],
    t_list: &[f64],
    b: f64,
) -> Result<MorawetzFit, DiagnosticsError> {
    if times.len() != potential.len() {
        return Err(DiagnosticsError::TooFewSamples("times and potential differ in length".into()));
    }
    if t_list.len() < 2 {
        return Err(DiagnosticsError::TooFewSamples(format!("need two averaging horizons, got {}", t_list.len())));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let mut averages = Vec::with_capacity(t_list.len());
    for &horizon in t_list {
        if !(horizon > 0.0) || horizon > t_end * (1.0 + 1e-12) {
            return Err(DiagnosticsError::TooFewSamples(format!(
                "horizon {horizon} not covered by samples ending at {t_end}"
            )));
        }
        let mut integral = 0.0;
        let mut used = 0;
        for k in 1..times.len() {
            let (t0, t1) = (times[k - 1], times[k]);
            if t0 >= horizon {
                break;
            }
            let hi = t1.min(horizon);
            let p_hi = potential[k - 1] + (potential[k] - potential[k - 1]) * (hi - t0) / (t1 - t0);
            integral += 0.5 * (potential[k - 1] + p_hi) * (hi - t0);
            used += 1;
        }
        if used < 2 {
            return Err(DiagnosticsError::TooFewSamples(format!("fewer than two intervals below T = {horizon}")));
        }
        averages.push(integral / horizon);
    }
    let xs: Vec<f64> = t_list.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = averages.iter().map(|a| a.ln()).collect();
    Ok(MorawetzFit {
        t_list: t_list.to_vec(),
        slope: least_squares_slope(&xs, &ys),
        averages,
        predicted: crate::params::morawetz_exponent(b),
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringVerdict {
    pub met: bool,
    pub infimum: f64,
    pub at_time: f64,
    pub epsilon: f64,
}

/// Criterion `inf_{t ≥ tail_from} ∫_{B(0,R)} |u|² ≤ ε²` on a stored series.
pub fn scattering_indicator(times: &[f64], ball_mass: &[f64], epsilon: f64, tail_from: f64) -> ScatteringVerdict {
    let (infimum, at_time) = times
        .iter()
        .zip(ball_mass)
        .filter(|(t, _)| **t >= tail_from)
        .fold((f64::INFINITY, f64::NAN), |(m, at), (&t, &v)| if v < m { (v, t) } else { (m, at) });
    ScatteringVerdict { met: infimum <= epsilon * epsilon, infimum, at_time, epsilon }
}

/// Finite-window `L^q_t L^r_x` norm over stored snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzProxy {
    pub pair: AdmissiblePair,
    pub window: (f64, f64),
    pub value: f64,
    /// Always `"PROXY"`: a discrete finite-window stand-in for the norm.
    pub label: String,
}

/// `(Σ Δt ‖u(t)‖_{L^r}^q)^{1/q}` over snapshots in `window`, with `Δt` the
/// forward spacing of the stored times; the maximum when `q = ∞`.
pub fn strichartz_proxy(
    model: &Model,
    snapshots: &[(f64, Vec<Complex64>)],
    pair: &AdmissiblePair,
    window: (f64, f64),
) -> Result<StrichartzProxy, DiagnosticsError> {
    if !is_admissible(pair, model.grid.dim) {
        return Err(DiagnosticsError::Inadmissible(format!("({}, {}) at s = {}", pair.q, pair.r, pair.s)));
    }
    let inside: Vec<&(f64, Vec<Complex64>)> =
        snapshots.iter().filter(|(t, _)| *t >= window.0 && *t <= window.1).collect();
    let r = pair.r.as_f64();
    let q = pair.q.as_f64();
    let value = if q.is_infinite() {
        inside.iter().map(|(_, u)| lp_norm(&model.grid, u, r)).fold(0.0, f64::max)
    } else {
        let mut acc = 0.0;
        for k in 0..inside.len() {
            let dt = if k + 1 < inside.len() { inside[k + 1].0 - inside[k].0 } else { 0.0 };
            acc += dt * lp_norm(&model.grid, &inside[k].1, r).powf(q);
        }
        acc.powf(1.0 / q)
    };
    Ok(StrichartzProxy { pair: pair.clone(), window, value, label: "PROXY".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_potential_has_flat_average() {
        let times: Vec<f64> = (0..=200).map(|k| k as f64).collect();
        let pot = vec![3.5; times.len()];
        let fit = morawetz_average(&times, &pot, &[10.0, 50.0, 200.0], 1.0).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert_eq!(fit.predicted, -0.5);
    }

    #[test]
    fn power_law_slope_recovered() {
        // P = (1+t)^{-3/2} gives A(T) ~ T^{-1} for large T
        let times: Vec<f64> = (0..=20000).map(|k| k as f64 * 0.05).collect();
        let pot: Vec<f64> = times.iter().map(|t| (1.0 + t).powf(-1.5)).collect();
        let fit = morawetz_average(&times, &pot, &[200.0, 400.0, 800.0, 1000.0], 3.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.05, "{}", fit.slope);
        assert_eq!(fit.predicted, -2.0 / 3.0);
    }

    #[test]
    fn morawetz_refuses_short_input() {
        assert!(morawetz_average(&[0.0, 1.0], &[1.0, 1.0], &[1.0], 1.0).is_err());
        assert!(morawetz_average(&[0.0, 1.0, 2.0], &[1.0; 3], &[1.0, 5.0], 1.0).is_err());
    }

    #[test]
    fn scattering_verdicts() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let m = [5.0, 1.0, 0.02, 0.5];
        let v = scattering_indicator(&t, &m, 0.2, 1.5);
        assert!(v.met);
        assert_eq!((v.infimum, v.at_time), (0.02, 2.0));
        assert!(!scattering_indicator(&t, &m, 0.1, 0.0).met);
        assert!(scattering_indicator(&t, &m, 5.0f64.sqrt(), 0.0).met);
    }
}
