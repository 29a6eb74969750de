//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see them). Tolerances are pinned here, not configurable.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotcav::analytic::{spectrum_general, spectrum_xy};
use rotcav::arrowhead::{
    benchmark_instance, benchmark_scaling, eigensolve_arrowhead, fit_scaling_exponent,
    BenchOptions,
};
use rotcav::atom_cavity::{
    build_ensemble, build_nonrotating, build_single_atom_reduced_xy, build_single_atom_xy,
    rotation_induced_polariton_xy, CavitySpec, EnsembleSpec, RotationSpec,
};
use rotcav::dynamics::{
    assemble_hamiltonian_reduced, frame_transform, propagate, FrameDirection, FrozenAngleConfig,
    PropagateOptions, RadialGrid, Wavepacket,
};
use rotcav::eigen::{eigensolve_dense, eigenvalues_dense};
use rotcav::hermitian::Channel;
use rotcav::molecule::{
    find_licis, rotation_convention_report, DiatomicModel, LiciOptions, PotentialCurve,
    TransitionDipole,
};

fn report(criterion: usize, pass: bool, elapsed: f64, what: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion}: {status} ({elapsed:.3} s) - {what}");
    assert!(pass, "criterion {criterion} failed: {what}");
}

fn max_sorted_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset sizes differ: {} vs {}", a.len(), b.len());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

#[test]
fn criterion_01_single_atom_xy_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let omega_c = rng.gen_range(0.5..2.0);
        let g = rng.gen_range(0.0..0.5);
        let omega = rng.gen_range(0.0..1.0);
        let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
        let cavity = CavitySpec::new(omega_c, g).unwrap();
        let rot = RotationSpec::in_plane(alpha, omega).unwrap();
        let h = build_single_atom_xy(&cavity, &rot).unwrap();
        let vals = eigensolve_dense(&h).unwrap().eigenvalues;
        let split = omega.hypot(g);
        let expect = {
            let mut e = vec![omega_c - split, omega_c, omega_c, omega_c + split];
            e.sort_by(|x, y| x.partial_cmp(y).unwrap());
            e
        };
        worst = worst.max(max_sorted_diff(&vals, &expect));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-11 && elapsed < 1.0,
        elapsed,
        &format!("100 random XY 4x4 spectra match omega_c +- sqrt(Omega^2+g^2); worst {worst:.2e}"),
    );
}

#[test]
fn criterion_02_rotation_induced_polariton() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let omega_c = rng.gen_range(0.5..2.0);
        let g = rng.gen_range(0.01..0.5);
        let omega = rng.gen_range(0.01..1.0);
        let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
        let cavity = CavitySpec::new(omega_c, g).unwrap();
        let rot = RotationSpec::in_plane(alpha, omega).unwrap();
        let v = rotation_induced_polariton_xy(&cavity, &rot).unwrap();
        let h = build_single_atom_reduced_xy(&cavity, &rot).unwrap();
        let mut hv = [Complex64::new(0.0, 0.0); 3];
        h.apply(&v, &mut hv);
        let residual: f64 = hv
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - omega_c * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(residual);
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        2,
        worst <= 1e-11 && elapsed < 1.0,
        elapsed,
        &format!("(Omega*sqrt2/g, -1, +1) is an omega_c eigenvector; worst residual {worst:.2e}"),
    );
}

#[test]
fn criterion_03_ensemble_xy_multisets() {
    let cavity = CavitySpec::new(1.0, 0.05).unwrap();
    let rot = RotationSpec::in_plane(1.1, 0.3).unwrap();
    let start = Instant::now();
    let mut worst_formula = 0.0f64;
    let mut worst_dense = 0.0f64;
    for &n in &[1usize, 2, 5, 20, 50] {
        let ens = EnsembleSpec::new(n).unwrap();
        let arrow = build_ensemble(&cavity, &rot, &ens).unwrap();
        let sol = eigensolve_arrowhead(&arrow, false).unwrap();
        let predicted = spectrum_xy(&cavity, &rot, n).reduced_multiset();
        worst_formula = worst_formula.max(max_sorted_diff(&sol.eigenvalues, &predicted));
        let dense = eigenvalues_dense(&arrow.to_dense()).unwrap();
        worst_dense = worst_dense.max(max_sorted_diff(&sol.eigenvalues, &dense));
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        3,
        worst_formula <= 1e-10 && worst_dense <= 1e-10 && elapsed < 5.0,
        elapsed,
        &format!(
            "XY ensembles N in {{1,2,5,20,50}}: formula diff {worst_formula:.2e}, dense diff {worst_dense:.2e}"
        ),
    );
}

#[test]
fn criterion_04_general_axis_branches_and_census() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut census_ok = true;
    for &n in &[1usize, 2, 5, 20] {
        for _ in 0..20 {
            let cavity = CavitySpec::new(rng.gen_range(0.5..2.0), rng.gen_range(0.01..0.3)).unwrap();
            // random axis with genuinely mixed components
            let axis = loop {
                let a: [f64; 3] = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
                if norm > 0.1 && a[2].abs() / norm > 1e-3 && a[0].hypot(a[1]) / norm > 1e-3 {
                    break a;
                }
            };
            let rot = RotationSpec::new(axis, rng.gen_range(0.05..0.9)).unwrap();
            let ens = EnsembleSpec::new(n).unwrap();
            let arrow = build_ensemble(&cavity, &rot, &ens).unwrap();
            let dense = eigenvalues_dense(&arrow.to_dense()).unwrap();
            let prediction = spectrum_general(&cavity, &rot, n);
            let full = prediction.full_multiset(cavity.omega_c);
            worst = worst.max(max_sorted_diff(&full, &dense));
            // the dark multiset must match exactly: count dense values near
            // each predicted level
            for (level, mult) in &prediction.dark_levels {
                let hits = dense.iter().filter(|x| (*x - level).abs() <= 1e-9).count();
                if hits < *mult {
                    census_ok = false;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        4,
        worst <= 1e-9 && census_ok && elapsed < 10.0,
        elapsed,
        &format!("four-branch formula + dark census vs dense on random axes; worst {worst:.2e}"),
    );
}

#[test]
fn criterion_05_limit_reductions() {
    let start = Instant::now();
    // Omega -> 0: the non-rotating path gives omega_c +- sqrt(N) g
    let mut worst_nonrot = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for &n in &[1usize, 3, 9, 40] {
        let cavity = CavitySpec::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..0.4)).unwrap();
        let ens = EnsembleSpec::new(n).unwrap();
        let arrow = build_nonrotating(&cavity, &ens);
        let sol = eigensolve_arrowhead(&arrow, false).unwrap();
        let split = (n as f64).sqrt() * cavity.g;
        worst_nonrot = worst_nonrot
            .max((sol.eigenvalues[0] - (cavity.omega_c - split)).abs())
            .max((sol.eigenvalues[n] - (cavity.omega_c + split)).abs());
    }
    // Omega_z -> 0 of the four-branch formula reproduces the XY branches
    let mut worst_reduction = 0.0f64;
    for _ in 0..1000 {
        let cavity = CavitySpec::new(rng.gen_range(0.5..2.0), rng.gen_range(0.0..0.5)).unwrap();
        let omega = rng.gen_range(1e-6..1.0);
        let alpha = rng.gen_range(0.0..std::f64::consts::TAU);
        let n = rng.gen_range(1..60);
        let rot = RotationSpec::in_plane(alpha, omega).unwrap();
        let gen = spectrum_general(&cavity, &rot, n);
        let xy = spectrum_xy(&cavity, &rot, n);
        worst_reduction = worst_reduction
            .max((gen.branch_energies[0] - xy.branch_energies[0]).abs())
            .max((gen.branch_energies[3] - xy.branch_energies[2]).abs())
            .max((gen.branch_energies[1] - cavity.omega_c).abs())
            .max((gen.branch_energies[2] - cavity.omega_c).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        worst_nonrot <= 1e-11 && worst_reduction <= 1e-11,
        elapsed,
        &format!(
            "Omega->0 gives omega_c +- sqrt(N)g ({worst_nonrot:.2e}); Omega_z->0 collapses Eq-general to Eq-XY ({worst_reduction:.2e})"
        ),
    );
}

#[test]
fn criterion_06_arrowhead_performance() {
    let start = Instant::now();
    // correctness at n = 2000 against the dense reference
    let a = benchmark_instance(2000, 6);
    let fast = eigensolve_arrowhead(&a, false).unwrap().eigenvalues;
    let dense = eigenvalues_dense(&a.to_dense()).unwrap();
    let diff = max_sorted_diff(&fast, &dense);
    let scale = a.scale();
    // wall time at n = 1e5
    let big = benchmark_instance(100_000, 6);
    let t0 = Instant::now();
    let sol = eigensolve_arrowhead(&big, false).unwrap();
    let big_time = t0.elapsed().as_secs_f64();
    assert_eq!(sol.eigenvalues.len(), 100_001);
    // scaling exponent over three decades
    let rows = benchmark_scaling(
        &[1_000, 10_000, 100_000],
        &BenchOptions { dense_cap: 0, min_time_s: 0.05, seed: 6 },
    );
    let exponent = fit_scaling_exponent(&rows).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        6,
        diff <= 1e-10 * scale && big_time < 2.0 && exponent < 1.3,
        elapsed,
        &format!(
            "n=2000 dense diff {diff:.2e} (scale {scale}); n=1e5 solve {big_time:.3} s; exponent {exponent:.2}"
        ),
    );
}

fn lici_model() -> DiatomicModel {
    DiatomicModel::new(
        PotentialCurve::Harmonic { k: 1.0, r0: 2.0, offset: 0.0 },
        PotentialCurve::Harmonic { k: 0.0, r0: 0.0, offset: 0.5 },
        TransitionDipole::Constant(1.0),
        0.04,
        CavitySpec::new(0.3, 0.0).unwrap(),
        100.0,
        0.2,
        4.5,
    )
    .unwrap()
}

#[test]
fn criterion_07_lici_doubling() {
    let model = lici_model();
    let start = Instant::now();
    let opts = LiciOptions::default();

    let res0 = find_licis(&model, &RotationSpec::none(), (0.5, 4.0), &opts).unwrap();
    let rs0 = res0.distinct_r_values();
    let half0 = 0.4f64.sqrt();
    let ok0 = rs0.len() == 2
        && (rs0[0] - (2.0 - half0)).abs() <= 1e-8
        && (rs0[1] - (2.0 + half0)).abs() <= 1e-8;

    let rot = RotationSpec::new([0.0, 0.0, 1.0], 0.1).unwrap();
    let res1 = find_licis(&model, &rot, (0.5, 4.0), &opts).unwrap();
    let rs1 = res1.distinct_r_values();
    let expect1 = [
        2.0 - 0.6f64.sqrt(),
        2.0 - 0.2f64.sqrt(),
        2.0 + 0.2f64.sqrt(),
        2.0 + 0.6f64.sqrt(),
    ];
    let ok1 = rs1.len() == 4
        && rs1.iter().zip(expect1.iter()).all(|(a, b)| (a - b).abs() <= 1e-8);

    let gaps_ok = res0
        .points
        .iter()
        .chain(res1.points.iter())
        .all(|(p, s)| p.gap <= 1e-10 && s.max_gap <= 1e-10 && s.phi_grid_size == 64);

    let elapsed = start.elapsed().as_secs_f64();
    report(
        7,
        ok0 && ok1 && gaps_ok && elapsed < 2.0,
        elapsed,
        &format!(
            "Omega_z=0 radii {rs0:?}; Omega_z=0.1 radii {rs1:?}; all gaps and seam certificates <= 1e-10"
        ),
    );
}

#[test]
fn criterion_08_rotation_convention_report() {
    let start = Instant::now();
    let rot = RotationSpec::new([0.5, 0.3, 0.6], 0.4).unwrap();
    let report_32 = rotation_convention_report(&rot, 32, 32);
    // the report must exist and either certify agreement or document the
    // discrepancy factors; it must never be silently reconciled
    let documented = report_32.agreement
        || (report_32.inplane_factor.is_some() && report_32.z_factor.is_some());
    println!(
        "ACCEPTANCE 8 detail: agreement = {}, max |diff| = {:.3e}, in-plane factor = {:?}, z factor = {:?}",
        report_32.agreement, report_32.max_abs_diff, report_32.inplane_factor, report_32.z_factor
    );
    let elapsed = start.elapsed().as_secs_f64();
    report(
        8,
        documented,
        elapsed,
        "printed diagonal shifts vs vector-operator oracle over a 32x32 grid (discrepancy documented)",
    );
}

#[test]
fn criterion_09_dynamics() {
    let start = Instant::now();

    // (a) eigenstate stationarity over 1000 steps
    let model = DiatomicModel::new(
        PotentialCurve::Harmonic { k: 1.0, r0: 2.0, offset: 0.0 },
        PotentialCurve::Harmonic { k: 0.0, r0: 0.0, offset: 0.5 },
        TransitionDipole::Constant(1.0),
        0.03,
        CavitySpec::new(0.3, 0.0).unwrap(),
        100.0,
        0.4,
        3.6,
    )
    .unwrap();
    let rot = RotationSpec::new([0.0, 1.0, 0.0], 0.1).unwrap();
    let grid = RadialGrid::new(0.4, 3.6, 96, 100.0).unwrap();
    let cfg = FrozenAngleConfig::default();
    let h = assemble_hamiltonian_reduced(&model, &rot, &grid, &cfg).unwrap();
    let dec = eigensolve_dense(&h.to_dense()).unwrap();
    let scale = 1.0 / grid.dr().sqrt();
    let flat: Vec<Complex64> = dec.eigenvector(0).iter().map(|z| z * scale).collect();
    let n = grid.n_points;
    let psi0 = Wavepacket {
        components: [flat[0..n].to_vec(), flat[n..2 * n].to_vec(), flat[2 * n..3 * n].to_vec()],
        frame: rotcav::dynamics::Frame::Rotating,
        time: 0.0,
    };
    let dt = rotcav::dynamics::default_dt(&h);
    let traj = propagate(&h, &psi0, dt, 1000, &PropagateOptions::default()).unwrap();
    let fidelity = traj.final_state.fidelity(&psi0, grid.dr());
    let norm_drift = traj.norm_drift();
    let energy_drift = traj.energy_drift_rel();

    // (b) flat-potential Rabi period at n_points = 512
    let g = 0.02;
    let flat_model = DiatomicModel::new(
        PotentialCurve::Harmonic { k: 0.0, r0: 0.0, offset: 0.0 },
        PotentialCurve::Harmonic { k: 0.0, r0: 0.0, offset: 0.5 },
        TransitionDipole::Constant(1.0),
        g,
        CavitySpec::new(0.5, 0.0).unwrap(),
        100.0,
        0.4,
        3.6,
    )
    .unwrap();
    let grid512 = RadialGrid::new(0.4, 3.6, 512, 100.0).unwrap();
    let h512 =
        assemble_hamiltonian_reduced(&flat_model, &RotationSpec::none(), &grid512, &cfg).unwrap();
    let psi_sine = Wavepacket::sine_mode(&grid512, Channel::Sigma, 1).unwrap();
    let t_half = std::f64::consts::FRAC_PI_4 / g; // P_sigma = 1/2 at pi/(4g)
    let n_steps = 4096;
    let dt512 = 1.2 * t_half / n_steps as f64;
    let traj512 = propagate(&h512, &psi_sine, dt512, n_steps, &PropagateOptions::default()).unwrap();
    let mut measured = f64::NAN;
    for i in 1..traj512.times.len() {
        let (p0, p1) = (traj512.populations[0][i - 1], traj512.populations[0][i]);
        if p0 >= 0.5 && p1 < 0.5 {
            let frac = (p0 - 0.5) / (p0 - p1);
            measured = traj512.times[i - 1] + frac * dt512;
            break;
        }
    }
    let rabi_err = (measured - t_half).abs() / t_half;

    // (c) frame round trip
    let lab = frame_transform(&traj.final_state, &rot, &cfg, 3.3, FrameDirection::ToLab).unwrap();
    let back = frame_transform(&lab, &rot, &cfg, 3.3, FrameDirection::ToRotating).unwrap();
    let round_trip = back.fidelity(&traj.final_state, grid.dr());

    let elapsed = start.elapsed().as_secs_f64();
    report(
        9,
        fidelity >= 1.0 - 1e-9
            && norm_drift <= 1e-10
            && energy_drift <= 1e-9
            && rabi_err <= 1e-6
            && round_trip >= 1.0 - 1e-12
            && elapsed < 30.0,
        elapsed,
        &format!(
            "stationarity 1-{:.1e}, norm drift {norm_drift:.1e}, energy drift {energy_drift:.1e}, Rabi rel err {rabi_err:.1e}, round trip 1-{:.1e}",
            1.0 - fidelity,
            1.0 - round_trip
        ),
    );
}

#[test]
fn criterion_10_cli_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_rotcav");
    let atom_cfg = r#"
seed = 11
[system]
kind = "ensemble"
[cavity]
omega_c = 1.0
g = 0.05
[rotation]
axis = [0.3, 0.2, 0.4]
omega = 0.5
[ensemble]
n_atoms = 3
[bench]
sizes = [40, 90]
dense_cap = 90
emit_timings = false
min_time_s = 0.0
"#;
    let mol_cfg = r#"
seed = 11
[system]
kind = "diatomic"
[cavity]
omega_c = 0.3
g = 0.0
[rotation]
axis = "z"
omega = 0.1
[molecule]
g0 = 0.04
reduced_mass = 100.0
r_min = 0.4
r_max = 3.6
[molecule.v_sigma]
kind = "harmonic"
k = 1.0
r0 = 2.0
[molecule.v_pi]
kind = "harmonic"
k = 0.0
r0 = 0.0
offset = 0.5
[molecule.dipole]
kind = "constant"
value = 1.0
[scan]
r = { start = 1.0, stop = 3.0, count = 7 }
theta = { start = 0.0, stop = 3.1, count = 4 }
phi = { start = 0.0, stop = 6.0, count = 3 }
[lici]
r_window = [0.5, 3.5]
[propagation]
n_points = 24
n_steps = 20
[propagation.initial]
kind = "gaussian"
channel = "sigma"
center = 2.0
width = 0.2
"#;
    let dir = tempfile::tempdir().unwrap();
    let atom_path = dir.path().join("atom.toml");
    let mol_path = dir.path().join("mol.toml");
    std::fs::write(&atom_path, atom_cfg).unwrap();
    std::fs::write(&mol_path, mol_cfg).unwrap();

    let cases: [(&Path, &str); 6] = [
        (&atom_path, "spectrum"),
        (&atom_path, "darkstates"),
        (&mol_path, "scan"),
        (&mol_path, "lici"),
        (&mol_path, "propagate"),
        (&atom_path, "bench"),
    ];
    let mut all_match = true;
    for (cfg, sub) in cases {
        let out_a = tempfile::tempdir().unwrap();
        let out_b = tempfile::tempdir().unwrap();
        for out in [out_a.path(), out_b.path()] {
            let status = std::process::Command::new(bin)
                .arg("--config")
                .arg(cfg)
                .arg("--out")
                .arg(out)
                .arg(sub)
                .status()
                .unwrap();
            assert!(status.success(), "{sub} failed");
        }
        let mut names: Vec<String> = std::fs::read_dir(out_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for f in names {
            let a = std::fs::read(out_a.path().join(&f)).unwrap();
            let b = std::fs::read(out_b.path().join(&f)).unwrap();
            if a != b {
                all_match = false;
                println!("ACCEPTANCE 10 detail: {sub}/{f} differs between runs");
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(10, all_match, elapsed, "every subcommand is byte-identical across repeated runs");
}
