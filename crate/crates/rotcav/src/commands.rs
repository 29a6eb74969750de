//! Subcommand implementations: validate the config, compute, then write
//! deterministic CSV/JSON files (floats at 17 significant digits, fixed row
//! order), so identical config + seed reproduce byte-identical outputs.

use std::path::Path;

use serde::Serialize;

use crate::analytic::{
    spectrum_general, spectrum_nonrotating, spectrum_xy, SpectrumPrediction,
};
use crate::arrowhead::{
    benchmark_scaling, eigensolve_arrowhead, fit_scaling_exponent, BenchOptions,
};
use crate::atom_cavity::{
    build_ensemble, build_ensemble_full, build_nonrotating, CavitySpec, RotationSpec,
};
use crate::config::{InitialState, RunConfig};
use crate::dynamics::{
    assemble_hamiltonian_reduced, default_dt, frame_transform, propagate, FrameDirection,
    FrozenAngleConfig, PropagateOptions, RadialGrid, Wavepacket,
};
use crate::eigen::{eigensolve_dense, eigenvalues_dense};
use crate::error::RotcavError;
use crate::molecule::{adiabatic_scan, find_licis, LiciOptions};

/// Command failure with its process exit code.
#[derive(Debug)]
pub enum CmdError {
    /// Bad config or arguments (exit 2).
    Validation(String),
    /// A numeric check or assertion failed (exit 1).
    Numeric(String),
    /// No resonance crossing in the search window (exit 3).
    NoCrossing(String),
    /// Propagation aborted on norm drift (exit 4).
    Stability(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Numeric(_) => 1,
            CmdError::Validation(_) => 2,
            CmdError::NoCrossing(_) => 3,
            CmdError::Stability(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CmdError::Validation(m)
            | CmdError::Numeric(m)
            | CmdError::NoCrossing(m)
            | CmdError::Stability(m) => m,
        }
    }
}

impl From<RotcavError> for CmdError {
    fn from(e: RotcavError) -> Self {
        match &e {
            RotcavError::NoCrossing { .. } => CmdError::NoCrossing(e.to_string()),
            RotcavError::StabilityViolation { .. } => CmdError::Stability(e.to_string()),
            RotcavError::ConvergenceFailure { .. }
            | RotcavError::NonHermitianInput { .. }
            | RotcavError::PoleEvaluation { .. } => CmdError::Numeric(e.to_string()),
            _ => CmdError::Validation(e.to_string()),
        }
    }
}

type CmdResult = Result<(), CmdError>;

/// 17 significant digits; round-trips every f64 and keeps outputs stable.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_text(path: &Path, content: &str) -> CmdResult {
    std::fs::write(path, content)
        .map_err(|e| CmdError::Numeric(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CmdError::Numeric(format!("json: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn ensure_outdir(outdir: &Path) -> CmdResult {
    std::fs::create_dir_all(outdir)
        .map_err(|e| CmdError::Numeric(format!("cannot create {}: {e}", outdir.display())))
}

/// Parameter sweep for the spectrum command.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Omega,
    G,
    OmegaC,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Omega => "omega",
            SweepParam::G => "g",
            SweepParam::OmegaC => "omega_c",
        }
    }
}

impl Sweep {
    /// Parse `--sweep <param> <start:stop:count>`.
    pub fn parse(param: &str, range: &str) -> Result<Sweep, CmdError> {
        let param = match param {
            "omega" => SweepParam::Omega,
            "g" => SweepParam::G,
            "omega_c" => SweepParam::OmegaC,
            other => {
                return Err(CmdError::Validation(format!(
                    "unknown sweep parameter \"{other}\" (expected omega, g or omega_c)"
                )))
            }
        };
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(CmdError::Validation(format!(
                "sweep range must be start:stop:count, got \"{range}\""
            )));
        }
        let start: f64 = parts[0]
            .parse()
            .map_err(|e| CmdError::Validation(format!("sweep start: {e}")))?;
        let stop: f64 = parts[1]
            .parse()
            .map_err(|e| CmdError::Validation(format!("sweep stop: {e}")))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|e| CmdError::Validation(format!("sweep count: {e}")))?;
        if count == 0 {
            return Err(CmdError::Validation("sweep count must be >= 1".into()));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + i as f64 * step).collect()
        };
        Ok(Sweep { param, values })
    }
}

fn reject_sweep(sweep: Option<&Sweep>) -> CmdResult {
    if sweep.is_some() {
        return Err(CmdError::Validation(
            "--sweep is only supported by the spectrum subcommand".into(),
        ));
    }
    Ok(())
}

struct SpectrumPoint {
    sweep_value: Option<f64>,
    prediction: SpectrumPrediction,
    arrow_eigenvalues: Vec<f64>,
    arrow_darks: Vec<(f64, usize)>,
    dense_eigenvalues: Vec<f64>,
}

fn max_sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

fn spectrum_point(
    cavity: &CavitySpec,
    rot: &RotationSpec,
    n: usize,
    sweep_value: Option<f64>,
) -> Result<SpectrumPoint, CmdError> {
    let ens = crate::atom_cavity::EnsembleSpec::new(n).map_err(CmdError::from)?;
    let (prediction, arrow) = if rot.is_zero() {
        (spectrum_nonrotating(cavity, n), build_nonrotating(cavity, &ens))
    } else if rot.is_planar() {
        (spectrum_xy(cavity, rot, n), build_ensemble(cavity, rot, &ens)?)
    } else {
        (spectrum_general(cavity, rot, n), build_ensemble(cavity, rot, &ens)?)
    };
    let sol = eigensolve_arrowhead(&arrow, false).map_err(CmdError::from)?;
    let dense = eigenvalues_dense(&arrow.to_dense()).map_err(CmdError::from)?;
    Ok(SpectrumPoint {
        sweep_value,
        prediction,
        arrow_eigenvalues: sol.eigenvalues,
        arrow_darks: sol.dark_multiplicities,
        dense_eigenvalues: dense,
    })
}

#[derive(Serialize)]
struct SpectrumDiff {
    max_abs_analytic_vs_arrowhead: f64,
    max_abs_analytic_vs_dense: f64,
    max_abs_arrowhead_vs_dense: f64,
    note: &'static str,
}

pub fn cmd_spectrum(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    let cavity = cfg.cavity().map_err(CmdError::from)?;
    let rot = cfg.rotation().map_err(CmdError::from)?;
    let n = cfg.ensemble().map_err(CmdError::from)?.n_atoms;

    let mut points = Vec::new();
    match sweep {
        None => points.push(spectrum_point(&cavity, &rot, n, None)?),
        Some(sw) => {
            for &v in &sw.values {
                let (cavity_v, rot_v) = apply_sweep(&cavity, &rot, sw.param, v)?;
                points.push(spectrum_point(&cavity_v, &rot_v, n, Some(v))?);
            }
        }
    }

    let mut diff = SpectrumDiff {
        max_abs_analytic_vs_arrowhead: 0.0,
        max_abs_analytic_vs_dense: 0.0,
        max_abs_arrowhead_vs_dense: 0.0,
        note: "entangled per-atom dark states are outside the arrowhead space and excluded",
    };
    let mut csv = String::new();
    match sweep {
        None => csv.push_str("label,energy,multiplicity,source\n"),
        Some(sw) => csv.push_str(&format!("{},label,energy,multiplicity,source\n", sw.param.name())),
    }
    for point in &points {
        let prefix = point
            .sweep_value
            .map(|v| format!("{},", fmt_f64(v)))
            .unwrap_or_default();
        let mut push = |label: &str, energy: f64, mult: usize, source: &str| {
            csv.push_str(&format!("{prefix}{label},{},{mult},{source}\n", fmt_f64(energy)));
        };
        for (i, e) in point.prediction.branch_energies.iter().enumerate() {
            push(&format!("branch_{i}"), *e, 1, "analytic");
        }
        for (i, (e, m)) in point.prediction.dark_levels.iter().enumerate() {
            push(&format!("dark_{i}"), *e, *m, "analytic");
        }
        if point.prediction.entangled_dark_count > 0 {
            push(
                "entangled_dark",
                cavity.omega_c,
                point.prediction.entangled_dark_count,
                "analytic",
            );
        }
        let mut dark_copies: Vec<f64> = Vec::new();
        for (e, m) in &point.arrow_darks {
            for _ in 0..*m {
                dark_copies.push(*e);
            }
        }
        let mut roots = point.arrow_eigenvalues.clone();
        for d in &dark_copies {
            if let Some(pos) = roots.iter().position(|x| x == d) {
                roots.remove(pos);
            }
        }
        for (i, e) in roots.iter().enumerate() {
            push(&format!("root_{i}"), *e, 1, "arrowhead");
        }
        for (i, (e, m)) in point.arrow_darks.iter().enumerate() {
            push(&format!("dark_{i}"), *e, *m, "arrowhead");
        }
        for (i, e) in point.dense_eigenvalues.iter().enumerate() {
            push(&format!("eig_{i}"), *e, 1, "dense");
        }

        let analytic = point.prediction.reduced_multiset();
        diff.max_abs_analytic_vs_arrowhead = diff
            .max_abs_analytic_vs_arrowhead
            .max(max_sorted_diff(&analytic, &point.arrow_eigenvalues));
        diff.max_abs_analytic_vs_dense =
            diff.max_abs_analytic_vs_dense.max(max_sorted_diff(&analytic, &point.dense_eigenvalues));
        diff.max_abs_arrowhead_vs_dense = diff
            .max_abs_arrowhead_vs_dense
            .max(max_sorted_diff(&point.arrow_eigenvalues, &point.dense_eigenvalues));
    }

    ensure_outdir(outdir)?;
    write_text(&outdir.join("spectrum.csv"), &csv)?;
    write_json(&outdir.join("spectrum_diff.json"), &diff)
}

fn apply_sweep(
    cavity: &CavitySpec,
    rot: &RotationSpec,
    param: SweepParam,
    value: f64,
) -> Result<(CavitySpec, RotationSpec), CmdError> {
    match param {
        SweepParam::Omega => {
            let rot_v = RotationSpec::new(rot.axis(), value).map_err(CmdError::from)?;
            Ok((*cavity, rot_v))
        }
        SweepParam::G => {
            let c = CavitySpec::new(cavity.omega_c, value)
                .map_err(CmdError::from)?
                .with_detuning(cavity.detuning);
            Ok((c, *rot))
        }
        SweepParam::OmegaC => {
            let c = CavitySpec::new(value, cavity.g)
                .map_err(CmdError::from)?
                .with_detuning(cavity.detuning);
            Ok((c, *rot))
        }
    }
}

#[derive(Serialize)]
struct DarkstatesCheck {
    n_atoms: usize,
    case: &'static str,
    n_states: usize,
    max_abs_deviation: f64,
    tolerance: f64,
    matched: bool,
}

pub fn cmd_darkstates(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    reject_sweep(sweep)?;
    let cavity = cfg.cavity().map_err(CmdError::from)?;
    let rot = cfg.rotation().map_err(CmdError::from)?;
    let ens = cfg.ensemble().map_err(CmdError::from)?;
    let n = ens.n_atoms;
    let inject = cfg.darkstates.as_ref().is_some_and(|d| d.inject_mismatch);

    // predicted rows: branches plus every dark family over the full 3N+1 space
    let mut rows: Vec<(String, f64, usize)> = Vec::new();
    let case_name;
    if rot.is_zero() {
        case_name = "nonrotating";
        let p = spectrum_nonrotating(&cavity, n);
        for (i, e) in p.branch_energies.iter().enumerate() {
            rows.push((format!("branch_{i}"), *e, 1));
        }
        for (i, (e, m)) in p.dark_levels.iter().enumerate() {
            rows.push((format!("dark_{i}"), *e, *m));
        }
        // the m = +-1 states decouple entirely without rotation
        rows.push(("decoupled_m1".into(), cavity.omega_c + cavity.detuning, 2 * n));
    } else if rot.is_planar() {
        case_name = "xy";
        let p = spectrum_xy(&cavity, &rot, n);
        for (i, e) in p.branch_energies.iter().enumerate() {
            rows.push((format!("branch_{i}"), *e, 1));
        }
        for (i, (e, m)) in p.dark_levels.iter().enumerate() {
            rows.push((format!("dark_{i}"), *e, *m));
        }
        rows.push(("entangled_dark".into(), cavity.omega_c, p.entangled_dark_count));
    } else {
        case_name = "general";
        let p = spectrum_general(&cavity, &rot, n);
        for (i, e) in p.branch_energies.iter().enumerate() {
            rows.push((format!("branch_{i}"), *e, 1));
        }
        for (i, (e, m)) in p.dark_levels.iter().enumerate() {
            rows.push((format!("dark_{i}"), *e, *m));
        }
    }
    if inject {
        if let Some(first) = rows.first_mut() {
            first.1 += 1e-6;
        }
    }

    let full = build_ensemble_full(&cavity, &rot, &ens);
    let dense = eigenvalues_dense(&full).map_err(CmdError::from)?;
    let mut predicted: Vec<f64> = Vec::with_capacity(dense.len());
    for (_, e, m) in &rows {
        predicted.extend(std::iter::repeat_n(*e, *m));
    }
    predicted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tolerance = 1e-10 * full.max_abs_entry();
    let (max_abs_deviation, matched) = if predicted.len() == dense.len() {
        let d = max_sorted_diff(&predicted, &dense);
        (d, d <= tolerance)
    } else {
        (f64::INFINITY, false)
    };

    ensure_outdir(outdir)?;
    let mut csv = String::from("label,energy,multiplicity\n");
    for (label, e, m) in &rows {
        csv.push_str(&format!("{label},{},{m}\n", fmt_f64(*e)));
    }
    write_text(&outdir.join("darkstates.csv"), &csv)?;
    write_json(
        &outdir.join("darkstates_check.json"),
        &DarkstatesCheck {
            n_atoms: n,
            case: case_name,
            n_states: dense.len(),
            max_abs_deviation,
            tolerance,
            matched,
        },
    )?;
    if !matched {
        return Err(CmdError::Numeric(format!(
            "dark-state census deviates from the dense oracle by {max_abs_deviation:.3e} (tolerance {tolerance:.3e})"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanMeta {
    points: usize,
    max_adjacent_jump: f64,
}

pub fn cmd_scan(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    reject_sweep(sweep)?;
    let model = cfg.molecule().map_err(CmdError::from)?;
    let rot = cfg.rotation().map_err(CmdError::from)?;
    let section = cfg
        .scan
        .as_ref()
        .ok_or_else(|| CmdError::Validation("missing [scan] section".into()))?;
    let r_grid = section.r.points().map_err(CmdError::from)?;
    let theta_grid = section.theta.points().map_err(CmdError::from)?;
    let phi_grid = section.phi.points().map_err(CmdError::from)?;

    let scan =
        adiabatic_scan(&model, &rot, &r_grid, &theta_grid, &phi_grid).map_err(CmdError::from)?;

    ensure_outdir(outdir)?;
    let mut csv = String::from("r,theta,phi,e1,e2,e3\n");
    for (ir, r) in scan.r_grid.iter().enumerate() {
        for (it, theta) in scan.theta_grid.iter().enumerate() {
            for (ip, phi) in scan.phi_grid.iter().enumerate() {
                let e = scan.at(ir, it, ip);
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(*r),
                    fmt_f64(*theta),
                    fmt_f64(*phi),
                    fmt_f64(e[0]),
                    fmt_f64(e[1]),
                    fmt_f64(e[2]),
                ));
            }
        }
    }
    write_text(&outdir.join("scan.csv"), &csv)?;
    write_json(
        &outdir.join("scan_meta.json"),
        &ScanMeta { points: scan.surfaces.len(), max_adjacent_jump: scan.max_adjacent_jump },
    )
}

#[derive(Serialize)]
struct LiciRecord {
    r: f64,
    theta: f64,
    branch: crate::molecule::ShiftBranch,
    gap: f64,
    seam_max_gap: f64,
    phi_grid_size: usize,
}

#[derive(Serialize)]
struct LiciOutput {
    shift_degenerate: bool,
    distinct_r_values: Vec<f64>,
    points: Vec<LiciRecord>,
}

#[derive(Serialize)]
struct LiciFailure {
    error: &'static str,
    r_window: [f64; 2],
}

pub fn cmd_lici(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    reject_sweep(sweep)?;
    let model = cfg.molecule().map_err(CmdError::from)?;
    let rot = cfg.rotation().map_err(CmdError::from)?;
    let section = cfg
        .lici
        .as_ref()
        .ok_or_else(|| CmdError::Validation("missing [lici] section".into()))?;
    let opts = LiciOptions {
        phi_grid_size: section.phi_grid,
        gap_tol: section.gap_tol,
        scan_samples: section.scan_samples,
    };
    ensure_outdir(outdir)?;
    let result = match find_licis(&model, &rot, (section.r_window[0], section.r_window[1]), &opts)
    {
        Ok(res) => res,
        Err(e @ RotcavError::NoCrossing { .. }) => {
            write_json(
                &outdir.join("lici.json"),
                &LiciFailure { error: "no_crossing", r_window: section.r_window },
            )?;
            return Err(CmdError::NoCrossing(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    };
    let output = LiciOutput {
        shift_degenerate: result.shift_degenerate,
        distinct_r_values: result.distinct_r_values(),
        points: result
            .points
            .iter()
            .map(|(p, s)| LiciRecord {
                r: p.r,
                theta: p.theta,
                branch: p.branch,
                gap: p.gap,
                seam_max_gap: s.max_gap,
                phi_grid_size: s.phi_grid_size,
            })
            .collect(),
    };
    write_json(&outdir.join("lici.json"), &output)?;
    if let Some(expected) = section.expected_r_values {
        let got = output.distinct_r_values.len();
        if got != expected {
            return Err(CmdError::Numeric(format!(
                "expected {expected} distinct LICI radii, found {got}"
            )));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PropagateSummary {
    n_steps: usize,
    dt: f64,
    norm_drift: f64,
    energy_drift_rel: f64,
    final_populations: [f64; 3],
    frame_round_trip_fidelity: f64,
}

pub fn cmd_propagate(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    reject_sweep(sweep)?;
    let model = cfg.molecule().map_err(CmdError::from)?;
    let rot = cfg.rotation().map_err(CmdError::from)?;
    let section = cfg
        .propagation
        .as_ref()
        .ok_or_else(|| CmdError::Validation("missing [propagation] section".into()))?;
    let grid = RadialGrid::new(model.r_min, model.r_max, section.n_points, model.reduced_mass)
        .map_err(CmdError::from)?;
    let angle_cfg = FrozenAngleConfig {
        theta: section.theta,
        phi: section.phi,
        include_centrifugal: section.include_centrifugal,
        frozen_l: [0.0; 3],
    };
    let h = assemble_hamiltonian_reduced(&model, &rot, &grid, &angle_cfg).map_err(CmdError::from)?;
    let psi0 = match &section.initial {
        InitialState::Gaussian { channel, center, width, momentum } => {
            Wavepacket::gaussian(&grid, channel.channel(), *center, *width, *momentum)
                .map_err(CmdError::from)?
        }
        InitialState::SineMode { channel, index } => {
            Wavepacket::sine_mode(&grid, channel.channel(), *index).map_err(CmdError::from)?
        }
        InitialState::Eigenstate { index } => {
            let dec = eigensolve_dense(&h.to_dense()).map_err(CmdError::from)?;
            if *index >= dec.dim() {
                return Err(CmdError::Validation(format!(
                    "eigenstate index {index} out of range (dim {})",
                    dec.dim()
                )));
            }
            let scale = 1.0 / grid.dr().sqrt();
            let flat: Vec<num_complex::Complex64> =
                dec.eigenvector(*index).iter().map(|z| z * scale).collect();
            let n = grid.n_points;
            Wavepacket {
                components: [
                    flat[0..n].to_vec(),
                    flat[n..2 * n].to_vec(),
                    flat[2 * n..3 * n].to_vec(),
                ],
                frame: crate::dynamics::Frame::Rotating,
                time: 0.0,
            }
        }
    };

    // dt * ||H|| <= 0.5 by default; halve on instability and re-run
    let mut dt = section.dt.unwrap_or_else(|| default_dt(&h));
    let mut n_steps = section.n_steps;
    let opts = PropagateOptions::default();
    let mut traj = None;
    let mut last_err = None;
    for _ in 0..4 {
        match propagate(&h, &psi0, dt, n_steps, &opts) {
            Ok(t) => {
                traj = Some(t);
                break;
            }
            Err(e @ RotcavError::StabilityViolation { .. }) => {
                last_err = Some(e);
                dt *= 0.5;
                n_steps *= 2;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let traj = match traj {
        Some(t) => t,
        None => return Err(last_err.unwrap().into()),
    };

    // lab-frame round trip on the final state as a self-check observable
    let lab = frame_transform(&traj.final_state, &rot, &angle_cfg, traj.times.last().copied().unwrap_or(0.0), FrameDirection::ToLab)
        .map_err(CmdError::from)?;
    let back = frame_transform(&lab, &rot, &angle_cfg, traj.times.last().copied().unwrap_or(0.0), FrameDirection::ToRotating)
        .map_err(CmdError::from)?;
    let round_trip = back.fidelity(&traj.final_state, grid.dr());

    ensure_outdir(outdir)?;
    let mut csv = String::from(
        "t,norm,energy,pop_sigma,pop_pi_plus,pop_pi_minus,r_mean_sigma,r_mean_pi_plus,r_mean_pi_minus\n",
    );
    for i in 0..traj.times.len() {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_f64(traj.times[i]),
            fmt_f64(traj.norms[i]),
            fmt_f64(traj.energies[i]),
            fmt_f64(traj.populations[0][i]),
            fmt_f64(traj.populations[1][i]),
            fmt_f64(traj.populations[2][i]),
            fmt_f64(traj.r_means[0][i]),
            fmt_f64(traj.r_means[1][i]),
            fmt_f64(traj.r_means[2][i]),
        ));
    }
    write_text(&outdir.join("trajectory.csv"), &csv)?;
    write_json(
        &outdir.join("summary.json"),
        &PropagateSummary {
            n_steps,
            dt,
            norm_drift: traj.norm_drift(),
            energy_drift_rel: traj.energy_drift_rel(),
            final_populations: [
                *traj.populations[0].last().unwrap(),
                *traj.populations[1].last().unwrap(),
                *traj.populations[2].last().unwrap(),
            ],
            frame_round_trip_fidelity: round_trip,
        },
    )
}

#[derive(Serialize)]
struct BenchSummary {
    sizes: Vec<usize>,
    dense_cap: usize,
    emit_timings: bool,
    fit_exponent: Option<f64>,
    max_abs_eig_diff: Option<f64>,
}

pub fn cmd_bench(cfg: &RunConfig, outdir: &Path, sweep: Option<&Sweep>) -> CmdResult {
    reject_sweep(sweep)?;
    let section = cfg
        .bench
        .as_ref()
        .ok_or_else(|| CmdError::Validation("missing [bench] section".into()))?;
    if section.sizes.is_empty() {
        return Err(CmdError::Validation("bench.sizes must be non-empty".into()));
    }
    let opts = BenchOptions {
        dense_cap: section.dense_cap,
        min_time_s: section.min_time_s,
        seed: cfg.seed,
    };
    let rows = benchmark_scaling(&section.sizes, &opts);

    ensure_outdir(outdir)?;
    let mut csv = String::from("n,time_arrowhead_s,time_dense_s,max_abs_eig_diff\n");
    for row in &rows {
        let ta = if section.emit_timings { fmt_f64(row.time_arrowhead_s) } else { String::new() };
        let td = match (section.emit_timings, row.time_dense_s) {
            (true, Some(t)) => fmt_f64(t),
            _ => String::new(),
        };
        let diff = row.max_abs_eig_diff.map(fmt_f64).unwrap_or_default();
        csv.push_str(&format!("{},{ta},{td},{diff}\n", row.n));
    }
    write_text(&outdir.join("bench.csv"), &csv)?;
    let max_diff = rows.iter().filter_map(|r| r.max_abs_eig_diff).fold(None, |acc: Option<f64>, d| {
        Some(acc.map_or(d, |a| a.max(d)))
    });
    write_json(
        &outdir.join("bench_summary.json"),
        &BenchSummary {
            sizes: section.sizes.clone(),
            dense_cap: section.dense_cap,
            emit_timings: section.emit_timings,
            fit_exponent: if section.emit_timings { fit_scaling_exponent(&rows) } else { None },
            max_abs_eig_diff: max_diff,
        },
    )
}

/// Dispatch used by main and by the CLI tests.
pub fn run_command(
    name: &str,
    cfg: &RunConfig,
    outdir: &Path,
    sweep: Option<&Sweep>,
) -> CmdResult {
    match name {
        "spectrum" => cmd_spectrum(cfg, outdir, sweep),
        "darkstates" => cmd_darkstates(cfg, outdir, sweep),
        "scan" => cmd_scan(cfg, outdir, sweep),
        "lici" => cmd_lici(cfg, outdir, sweep),
        "propagate" => cmd_propagate(cfg, outdir, sweep),
        "bench" => cmd_bench(cfg, outdir, sweep),
        other => Err(CmdError::Validation(format!("unknown subcommand {other}"))),
    }
}
