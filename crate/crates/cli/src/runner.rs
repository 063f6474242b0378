//! Experiment orchestration: runs the configured metrics and emits CSV
//! data plus a JSON manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use spinqpt::dynamics::{evolve_schrodinger, track_ground_state};
use spinqpt::metrics::{chi_trace, macro_trace_of};
use spinqpt::observables::{
    block_witness, computational_basis_probabilities, moment_distribution,
};
use spinqpt::StateVector;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{fmt_f, write_csv, RunManifest, UNITS};
use crate::shots::sample_shots;

/// Executes `cfg`, writing one CSV per enabled metric plus
/// `manifest.json` into `out_dir`. On failure nothing is left behind:
/// all file contents are assembled in memory and written only after every
/// computation has succeeded.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest> {
    cfg.check_memory_budget()?;
    let started = Instant::now();
    let net = cfg.network()?;
    let sched = cfg.schedule();
    let grid = cfg.grid_points;
    let mut files: Vec<(&'static str, String, Vec<String>)> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut stats: BTreeMap<String, f64> = BTreeMap::new();

    // schedule trace is always emitted
    let mut rows = Vec::with_capacity(grid);
    for k in 0..grid {
        let s = k as f64 / (grid - 1) as f64;
        let t = s * sched.t_final;
        let (delta, j) = sched.at_fraction(s);
        rows.push(format!("{},{},{},{}", fmt_f(t), fmt_f(s), fmt_f(delta), fmt_f(j)));
    }
    files.push(("schedule.csv", "t_ns,s,delta_ghz,j_ghz".into(), rows));

    let need_traj =
        cfg.metrics.witness || cfg.metrics.macro_measure || cfg.shots > 0;
    let traj: Option<spinqpt::Trajectory> = if need_traj {
        Some(track_ground_state(&net, &sched, grid, cfg.gap_tol_ghz)?)
    } else {
        None
    };

    if let Some(traj) = &traj {
        let flagged = traj.flags.iter().filter(|&&f| f).count();
        if flagged > 0 {
            let min_gap = traj
                .gaps
                .iter()
                .zip(&traj.flags)
                .filter(|(_, &f)| f)
                .map(|(g, _)| *g)
                .fold(f64::INFINITY, f64::min);
            warnings.push(format!(
                "quasi-degenerate ground state at {flagged} of {grid} grid points \
                 (smallest flagged gap {min_gap:.3e} GHz)"
            ));
        }
        if let Some(ov) = traj.min_successive_overlap {
            stats.insert("min_successive_overlap".into(), ov);
        }

        let mut rows = Vec::with_capacity(grid);
        for k in 0..grid {
            let s = traj.times[k] / sched.t_final;
            rows.push(format!(
                "{},{},{},{},{}",
                fmt_f(traj.times[k]),
                fmt_f(s),
                fmt_f(traj.energies[k]),
                fmt_f(traj.gaps[k]),
                traj.flags[k] as u8
            ));
        }
        files.push((
            "trajectory.csv",
            "t_ns,s,energy_ghz,gap_ghz,flagged".into(),
            rows,
        ));

        let mut rows = Vec::new();
        for (t, state) in traj.times.iter().zip(&traj.states) {
            let s = t / sched.t_final;
            let hist = moment_distribution(state)?;
            for (m, p) in hist.support().iter().zip(hist.probabilities()) {
                rows.push(format!("{},{m},{}", fmt_f(s), fmt_f(*p)));
            }
        }
        files.push(("moments.csv", "s,moment,probability".into(), rows));

        let final_state = traj.states.last().expect("grid >= 2");
        let rows = computational_basis_probabilities(final_state)
            .iter()
            .enumerate()
            .map(|(b, p)| format!("{b},{}", fmt_f(*p)))
            .collect();
        files.push((
            "probabilities.csv",
            "basis_index,probability".into(),
            rows,
        ));

        if cfg.metrics.witness {
            let mut rows = Vec::new();
            for (t, state) in traj.times.iter().zip(&traj.states) {
                let s = t / sched.t_final;
                for a in 0..net.n() - 2 {
                    let w = block_witness(state, (a, a + 1, a + 2))?;
                    rows.push(format!(
                        "{},{a},{},{},{},{}",
                        fmt_f(s),
                        a,
                        a + 1,
                        a + 2,
                        fmt_f(w.value)
                    ));
                }
            }
            files.push((
                "witness.csv",
                "s,block,site_a,site_b,site_c,value".into(),
                rows,
            ));
        }

        if cfg.metrics.macro_measure {
            let trace = macro_trace_of(&net, traj)?;
            stats.insert("fit_alpha".into(), trace.fit.alpha);
            stats.insert("fit_goodness".into(), trace.fit.goodness);
            let rows = trace
                .s
                .iter()
                .zip(&trace.d)
                .zip(&trace.flags)
                .map(|((s, d), f)| format!("{},{},{}", fmt_f(*s), fmt_f(*d), *f as u8))
                .collect();
            files.push(("macro.csv", "s,d,flagged".into(), rows));
        }

        if cfg.shots > 0 {
            let hist = moment_distribution(final_state)?;
            let (counts, empirical) = sample_shots(&hist, cfg.shots, cfg.seed)?;
            let rows = hist
                .support()
                .iter()
                .zip(&counts)
                .zip(empirical.probabilities())
                .map(|((m, c), p)| format!("{m},{c},{}", fmt_f(*p)))
                .collect();
            files.push((
                "shots.csv",
                "moment,count,empirical_probability".into(),
                rows,
            ));
            stats.insert("shots".into(), cfg.shots as f64);
        }
    }

    if cfg.metrics.chi {
        let trace = chi_trace(&net, &sched, grid, cfg.delta_s, cfg.gap_tol_ghz)?;
        let rows = (0..grid)
            .map(|k| {
                format!(
                    "{},{},{},{},{},{}",
                    fmt_f(trace.s[k]),
                    fmt_f(trace.s_center[k]),
                    fmt_f(trace.chi_overlap[k]),
                    fmt_f(trace.chi_derivative[k]),
                    fmt_f(trace.gaps[k]),
                    trace.flags[k] as u8
                )
            })
            .collect();
        files.push((
            "chi.csv",
            "s,s_center,chi_overlap,chi_derivative,gap_ghz,flagged".into(),
            rows,
        ));
        if let Some((s_peak, chi_peak)) = trace.peak() {
            stats.insert("chi_peak_s".into(), s_peak);
            stats.insert("chi_peak_value".into(), chi_peak);
        }
    }

    if cfg.metrics.dynamics {
        let psi0 = StateVector::plus_state(net.n());
        let traj = evolve_schrodinger(&net, &sched, &psi0, cfg.dt_ns, grid)?;
        let drift = traj.norm_drift.expect("integrated trajectory");
        let fidelity = traj.adiabatic_fidelity.expect("integrated trajectory");
        stats.insert("norm_drift".into(), drift);
        stats.insert("adiabatic_fidelity".into(), fidelity);
        if fidelity < cfg.adiabatic_fidelity_threshold {
            warnings.push(format!(
                "adiabatic fidelity {fidelity:.6} below threshold {}",
                cfg.adiabatic_fidelity_threshold
            ));
        }
        let rows = (0..traj.times.len())
            .map(|k| {
                format!(
                    "{},{},{},{}",
                    fmt_f(traj.times[k]),
                    fmt_f(traj.energies[k]),
                    fmt_f(traj.gaps[k]),
                    traj.flags[k] as u8
                )
            })
            .collect();
        files.push((
            "dynamics.csv",
            "t_ns,energy_ghz,gap_ghz,flagged".into(),
            rows,
        ));
    }

    // all computation succeeded; now touch the filesystem
    fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();
    for (name, header, rows) in files {
        write_csv(out_dir, name, &header, rows, &mut outputs)?;
    }
    let manifest = RunManifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        units: UNITS.to_string(),
        duration_seconds: started.elapsed().as_secs_f64(),
        outputs,
        warnings,
        stats,
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}
