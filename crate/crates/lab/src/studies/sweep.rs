//! Dichotomy sweep over `u₀ = c·Q`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};

use ibnls_core::propagator::StopReason;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_bytes, RunOptions};
use crate::config::RunConfig;
use crate::error::LabError;
use crate::manifest::{RunDir, Verdict};
use crate::run::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub c: f64,
    /// Strict comparisons with the ground state at `t = 0`.
    pub below_threshold: Option<bool>,
    pub energy_mass: Option<f64>,
    pub gradient_mass: Option<f64>,
    pub threshold_error: Option<String>,
    pub stop: String,
    pub guard_time: Option<f64>,
    pub t_final: f64,
    pub mass_drift: f64,
    /// Final over initial mass in the first configured ball.
    pub ball_mass_ratio: f64,
    pub backprop_decreasing: bool,
    pub scattering: Vec<ProbeVerdict>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(c: f64, error: String) -> Self {
        Self {
            c,
            below_threshold: None,
            energy_mass: None,
            gradient_mass: None,
            threshold_error: None,
            stop: "error".into(),
            guard_time: None,
            t_final: 0.0,
            mass_drift: f64::NAN,
            ball_mass_ratio: f64::NAN,
            backprop_decreasing: false,
            scattering: Vec::new(),
            error: Some(error),
        }
    }
}

pub fn sweep_row(setup: &Setup, cfg: &RunConfig, c: f64) -> SweepRow {
    let u0 = setup.scaled_ground_state(c);
    let threshold = threshold_at_start(setup, &u0);
    let run = match evolve(setup, u0, cfg, true) {
        Ok(r) => r,
        Err(e) => return SweepRow::failed(c, e.to_string()),
    };
    let traj = &run.trajectory;
    let d = &cfg.diagnostics;
    let horizon = cfg.solver.map(|s| s.horizon).unwrap_or(0.0);
    let bp = backprop_summary(&setup.model, traj, d.backprop_boundary_limit, d.backprop_tail, d.monotone_margin);
    let ball = |r: &ibnls_core::diagnostics::DiagnosticsRecord| r.mass_in_ball.first().copied().unwrap_or(f64::NAN);
    let first = traj.records.first().map(ball).unwrap_or(f64::NAN);
    let last = traj.records.last().map(ball).unwrap_or(f64::NAN);
    SweepRow {
        c,
        below_threshold: threshold.as_ref().ok().map(|t| t.cond_1_4 && t.cond_1_5),
        energy_mass: threshold.as_ref().ok().map(|t| t.energy_mass),
        gradient_mass: threshold.as_ref().ok().map(|t| t.gradient_mass),
        threshold_error: threshold.err(),
        stop: stop_label(&traj.stop).into(),
        guard_time: match traj.stop {
            StopReason::BlowUpGuard { t, .. } => Some(t),
            _ => None,
        },
        t_final: traj.final_state.t,
        mass_drift: drift(&traj.records).mass,
        ball_mass_ratio: last / first,
        backprop_decreasing: bp.decreasing,
        scattering: scattering_probes(&run, &d.scattering, d.tail_from.unwrap_or(horizon / 2.0)),
        error: None,
    }
}

fn row_file(c: f64) -> String {
    format!("rows/c_{:016x}.json", c.to_bits())
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(mut w: W, cfg: &RunConfig, rows: &[SweepRow]) -> io::Result<()> {
    let mut head: Vec<String> = [
        "c",
        "below_threshold",
        "energy_mass",
        "gradient_mass",
        "stop",
        "guard_time",
        "t_final",
        "mass_drift",
        "ball_mass_ratio",
        "ball_mass_decreased",
        "backprop_decreasing",
    ]
    .map(String::from)
    .into();
    head.extend(cfg.diagnostics.scattering.iter().map(|p| format!("scatter_R{}_eps{}", p.radius, p.epsilon)));
    head.push("error".into());
    writeln!(w, "{}", head.join(","))?;
    for r in rows {
        let mut cells = vec![
            fmt17(r.c),
            opt(&r.below_threshold),
            r.energy_mass.map(fmt17).unwrap_or_default(),
            r.gradient_mass.map(fmt17).unwrap_or_default(),
            r.stop.clone(),
            r.guard_time.map(fmt17).unwrap_or_default(),
            fmt17(r.t_final),
            fmt17(r.mass_drift),
            fmt17(r.ball_mass_ratio),
            (r.ball_mass_ratio < 1.0).to_string(),
            r.backprop_decreasing.to_string(),
        ];
        cells.extend(r.scattering.iter().map(|p| p.met.to_string()));
        cells.push(r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"));
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir, opts: RunOptions) -> Result<Vec<Verdict>, LabError> {
    let mut amplitudes = cfg.sweep.as_ref().map(|s| s.amplitudes.clone()).unwrap_or_default();
    amplitudes.sort_by(f64::total_cmp);
    amplitudes.dedup();

    let mut done: BTreeMap<u64, SweepRow> = BTreeMap::new();
    if opts.resume {
        for &c in &amplitudes {
            let path = dir.path(&row_file(c));
            if let Ok(text) = fs::read_to_string(&path) {
                if let Ok(row) = serde_json::from_str::<SweepRow>(&text) {
                    if row.c.to_bits() == c.to_bits() {
                        done.insert(c.to_bits(), row);
                    }
                }
            }
        }
        println!("resume: {} of {} rows already complete", done.len(), amplitudes.len());
    }
    let pending: Vec<f64> = amplitudes.iter().copied().filter(|c| !done.contains_key(&c.to_bits())).collect();

    if !pending.is_empty() {
        let setup = Setup::new(cfg)?;
        fs::create_dir_all(dir.path("rows"))?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads.unwrap_or(0))
            .build()
            .map_err(|e| LabError::Internal(e.to_string()))?;
        let fresh: Vec<Result<SweepRow, io::Error>> = pool.install(|| {
            pending
                .par_iter()
                .map(|&c| {
                    let row = sweep_row(&setup, cfg, c);
                    let path = dir.path(&row_file(c));
                    let tmp = path.with_extension("partial");
                    fs::write(&tmp, serde_json::to_string_pretty(&row).map_err(io::Error::other)?)?;
                    fs::rename(&tmp, &path)?;
                    println!("c = {c}: {}", row.error.as_deref().unwrap_or(&row.stop));
                    Ok(row)
                })
                .collect()
        });
        for row in fresh {
            let row = row?;
            done.insert(row.c.to_bits(), row);
        }
    }

    let mut rows: Vec<SweepRow> = done.into_values().collect();
    rows.sort_by(|a, b| a.c.total_cmp(&b.c));
    for r in &rows {
        dir.track(&row_file(r.c));
    }
    dir.write("sweep.csv", &csv_bytes(|w| write_sweep_csv(w, cfg, &rows))?)?;
    dir.write_json("sweep_summary.json", &rows)?;

    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    let mut verdicts = vec![Verdict::armed("rows_completed", errors == 0, format!("{} rows, {errors} failed", rows.len()))];
    for r in &rows {
        verdicts.push(Verdict::finding(
            &format!("c={}_below_threshold", r.c),
            r.below_threshold.unwrap_or(false),
            format!("stop {}, backprop decreasing {}", r.stop, r.backprop_decreasing),
        ));
    }
    Ok(verdicts)
}
