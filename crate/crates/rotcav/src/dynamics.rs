//! Rovibrational Hamiltonian assembly at frozen angles and rotating-frame
//! wavepacket propagation.
//!
//! Reduced dimensionality: theta and phi are held fixed and the molecular
//! rotational angular momentum is replaced by a fixed expectation (zero by
//! default), under which the centrifugal cross and square terms cancel the
//! explicit -mu r^2 Omega^2/2 exactly. The radial kinetic operator is a
//! three-point central difference on a box grid pinned to zero at both
//! walls; propagation is Lanczos short-time stepping with full
//! reorthogonalization, unitary to machine precision per step.

use num_complex::Complex64;

use crate::atom_cavity::RotationSpec;
use crate::error::{Result, RotcavError};
use crate::hermitian::{BasisState, Channel, HermitianMatrix};
use crate::molecule::{build_sigma_pi_rotating, rotation_matrix, DiatomicModel};

/// Uniform radial box grid: n_points interior points between walls at r_min
/// and r_max where the wavefunction is pinned to zero.
#[derive(Clone, Copy, Debug)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub reduced_mass: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize, reduced_mass: f64) -> Result<Self> {
        if !(r_min > 0.0) || !(r_max > r_min) {
            return Err(RotcavError::InvalidInput(format!(
                "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_points < 16 {
            return Err(RotcavError::InvalidInput(format!(
                "n_points must be >= 16, got {n_points}"
            )));
        }
        if !(reduced_mass > 0.0) {
            return Err(RotcavError::InvalidInput("reduced_mass must be > 0".into()));
        }
        Ok(RadialGrid { r_min, r_max, n_points, reduced_mass })
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points + 1) as f64
    }

    /// i-th interior point, i = 0..n_points.
    pub fn point(&self, i: usize) -> f64 {
        self.r_min + (i + 1) as f64 * self.dr()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Lab,
    Rotating,
}

impl Frame {
    fn name(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Rotating => "rotating",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameDirection {
    ToLab,
    ToRotating,
}

/// Three-channel radial wavepacket; norm is sum over channels and grid of
/// |psi|^2 dr.
#[derive(Clone, Debug)]
pub struct Wavepacket {
    pub components: [Vec<Complex64>; 3],
    pub frame: Frame,
    pub time: f64,
}

impl Wavepacket {
    pub fn zeros(grid: &RadialGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.n_points];
        Wavepacket { components: [z.clone(), z.clone(), z], frame: Frame::Rotating, time: 0.0 }
    }

    /// Normalized Gaussian exp(-(r-center)^2/(4 width^2) + i k r) on one
    /// channel.
    pub fn gaussian(
        grid: &RadialGrid,
        channel: Channel,
        center: f64,
        width: f64,
        momentum: f64,
    ) -> Result<Self> {
        if !(width > 0.0) {
            return Err(RotcavError::InvalidInput("gaussian width must be > 0".into()));
        }
        let mut psi = Self::zeros(grid);
        let ch = channel_index(channel);
        for i in 0..grid.n_points {
            let r = grid.point(i);
            let x = (r - center) / (2.0 * width);
            psi.components[ch][i] = Complex64::from_polar((-x * x).exp(), momentum * r);
        }
        psi.renormalize(grid.dr())?;
        Ok(psi)
    }

    /// k-th sine mode of the box (k = 1..n), an exact eigenvector of the
    /// finite-difference kinetic operator, on one channel.
    pub fn sine_mode(grid: &RadialGrid, channel: Channel, k: usize) -> Result<Self> {
        let n = grid.n_points;
        if k == 0 || k > n {
            return Err(RotcavError::InvalidInput(format!("sine mode k must be in 1..={n}")));
        }
        let mut psi = Self::zeros(grid);
        let ch = channel_index(channel);
        for i in 0..n {
            let arg = std::f64::consts::PI * (k * (i + 1)) as f64 / (n + 1) as f64;
            psi.components[ch][i] = Complex64::new(arg.sin(), 0.0);
        }
        psi.renormalize(grid.dr())?;
        Ok(psi)
    }

    pub fn norm2(&self, dr: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * dr
    }

    pub fn renormalize(&mut self, dr: f64) -> Result<()> {
        let n = self.norm2(dr).sqrt();
        if !(n > 0.0) {
            return Err(RotcavError::InvalidInput("cannot normalize the zero wavepacket".into()));
        }
        for c in self.components.iter_mut() {
            for z in c.iter_mut() {
                *z /= n;
            }
        }
        Ok(())
    }

    pub fn channel_population(&self, ch: usize, dr: f64) -> f64 {
        self.components[ch].iter().map(|z| z.norm_sqr()).sum::<f64>() * dr
    }

    /// <r> on one channel; zero when the channel is essentially empty.
    pub fn r_mean(&self, grid: &RadialGrid, ch: usize) -> f64 {
        let dr = grid.dr();
        let pop = self.channel_population(ch, dr);
        if pop < 1e-300 {
            return 0.0;
        }
        let weighted: f64 = self.components[ch]
            .iter()
            .enumerate()
            .map(|(i, z)| grid.point(i) * z.norm_sqr())
            .sum::<f64>()
            * dr;
        weighted / pop
    }

    /// |<a|b>| dr-weighted; both states assumed near unit norm.
    pub fn fidelity(&self, other: &Wavepacket, dr: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ca, cb) in self.components.iter().zip(other.components.iter()) {
            for (a, b) in ca.iter().zip(cb.iter()) {
                acc += a.conj() * b;
            }
        }
        (acc * dr).norm()
    }

    fn flat(&self) -> Vec<Complex64> {
        let mut v = Vec::with_capacity(3 * self.components[0].len());
        for c in &self.components {
            v.extend_from_slice(c);
        }
        v
    }

    fn from_flat(flat: &[Complex64], frame: Frame, time: f64) -> Self {
        let n = flat.len() / 3;
        Wavepacket {
            components: [
                flat[0..n].to_vec(),
                flat[n..2 * n].to_vec(),
                flat[2 * n..3 * n].to_vec(),
            ],
            frame,
            time,
        }
    }
}

pub fn channel_index(ch: Channel) -> usize {
    match ch {
        Channel::Sigma => 0,
        Channel::PiPlus => 1,
        Channel::PiMinus => 2,
    }
}

/// Frozen-angle configuration: theta and phi are parameters, and the
/// rotational angular momentum is replaced by the fixed vector `frozen_l`
/// (zero by default). `include_centrifugal` retains the literal cross and
/// square terms (L - mu r^2 Omega)^2/(2 mu r^2) - mu r^2 Omega^2/2 as a
/// diagnostic diagonal; with frozen_l = 0 they cancel.
#[derive(Clone, Copy, Debug)]
pub struct FrozenAngleConfig {
    pub theta: f64,
    pub phi: f64,
    pub include_centrifugal: bool,
    pub frozen_l: [f64; 3],
}

impl Default for FrozenAngleConfig {
    fn default() -> Self {
        FrozenAngleConfig {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
            include_centrifugal: false,
            frozen_l: [0.0; 3],
        }
    }
}

/// Literal centrifugal diagnostic term at radius r:
/// (l - mu r^2 Omega)^2/(2 mu r^2) - mu r^2 Omega^2/2.
pub fn centrifugal_literal(cfg: &FrozenAngleConfig, rot: &RotationSpec, mu: f64, r: f64) -> f64 {
    let mur2 = mu * r * r;
    let omega_vec = [rot.omega_x(), rot.omega_y(), rot.omega_z()];
    let mut diff2 = 0.0;
    for k in 0..3 {
        let d = cfg.frozen_l[k] - mur2 * omega_vec[k];
        diff2 += d * d;
    }
    diff2 / (2.0 * mur2) - 0.5 * mur2 * rot.omega() * rot.omega()
}

/// Expanded form of the same term: l^2/(2 mu r^2) - Omega . l. The
/// assembly-level identity check compares this against the literal route.
pub fn centrifugal_expanded(cfg: &FrozenAngleConfig, rot: &RotationSpec, mu: f64, r: f64) -> f64 {
    let l2: f64 = cfg.frozen_l.iter().map(|x| x * x).sum();
    let dot = cfg.frozen_l[0] * rot.omega_x()
        + cfg.frozen_l[1] * rot.omega_y()
        + cfg.frozen_l[2] * rot.omega_z();
    l2 / (2.0 * mu * r * r) - dot
}

/// The assembled frozen-angle Hamiltonian: three-point-FD radial kinetic
/// energy on each channel plus the electronic-cavity 3x3 at every grid
/// point. Kept in structured form for O(n) matvec; `to_dense` materializes
/// the 3n x 3n matrix.
#[derive(Clone, Debug)]
pub struct ReducedHamiltonian {
    pub grid: RadialGrid,
    /// hbar^2 / (2 mu dr^2)
    kinetic_coeff: f64,
    /// Channel diagonals including potentials, shifts and 2*kinetic_coeff.
    diag: [Vec<f64>; 3],
    /// Sigma <-> Pi_+- coupling at each grid point.
    coupling: Vec<f64>,
}

impl ReducedHamiltonian {
    pub fn dim(&self) -> usize {
        3 * self.grid.n_points
    }

    /// y = H x on the flat [sigma..., pi_plus..., pi_minus...] layout.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.grid.n_points;
        debug_assert_eq!(x.len(), 3 * n);
        debug_assert_eq!(y.len(), 3 * n);
        let t = self.kinetic_coeff;
        for ch in 0..3 {
            let xc = &x[ch * n..(ch + 1) * n];
            let yc = &mut y[ch * n..(ch + 1) * n];
            let d = &self.diag[ch];
            for i in 0..n {
                let mut acc = d[i] * xc[i];
                if i > 0 {
                    acc -= t * xc[i - 1];
                }
                if i + 1 < n {
                    acc -= t * xc[i + 1];
                }
                yc[i] = acc;
            }
        }
        for i in 0..n {
            let c = self.coupling[i];
            if c == 0.0 {
                continue;
            }
            let sigma = x[i];
            let plus = x[n + i];
            let minus = x[2 * n + i];
            y[i] += c * (plus + minus);
            y[n + i] += c * sigma;
            y[2 * n + i] += c * sigma;
        }
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let n = self.grid.n_points;
        let mut worst = 0.0f64;
        for ch in 0..3 {
            for i in 0..n {
                let mut row = self.diag[ch][i].abs() + 2.0 * self.kinetic_coeff;
                row += if ch == 0 { 2.0 * self.coupling[i].abs() } else { self.coupling[i].abs() };
                worst = worst.max(row);
            }
        }
        worst
    }

    pub fn to_dense(&self) -> HermitianMatrix {
        let n = self.grid.n_points;
        let mut basis = Vec::with_capacity(3 * n);
        for ch in Channel::ALL {
            for i in 0..n {
                basis.push(BasisState::ChannelGrid { channel: ch, index: i });
            }
        }
        let mut h = HermitianMatrix::zeros(basis).expect("distinct labels");
        let t = self.kinetic_coeff;
        for ch in 0..3 {
            for i in 0..n {
                h.set_diag(ch * n + i, self.diag[ch][i]);
                if i + 1 < n {
                    h.set_pair(ch * n + i, ch * n + i + 1, Complex64::new(-t, 0.0));
                }
            }
        }
        for i in 0..n {
            let c = Complex64::new(self.coupling[i], 0.0);
            h.set_pair(i, n + i, c);
            h.set_pair(i, 2 * n + i, c);
        }
        h
    }

    /// <psi|H|psi> (real part; the tiny imaginary residue is rounding).
    pub fn expectation(&self, flat: &[Complex64], dr: f64) -> f64 {
        let mut hx = vec![Complex64::new(0.0, 0.0); flat.len()];
        self.apply(flat, &mut hx);
        let acc: Complex64 = flat.iter().zip(hx.iter()).map(|(a, b)| a.conj() * b).sum();
        acc.re * dr
    }
}

/// Assemble the frozen-angle Hamiltonian from the diatomic model, the
/// rotation, and the grid. dr must resolve the kinetic scale:
/// dr <= (r_max - r_min)/16 is enforced through n_points >= 16.
pub fn assemble_hamiltonian_reduced(
    model: &DiatomicModel,
    rot: &RotationSpec,
    grid: &RadialGrid,
    cfg: &FrozenAngleConfig,
) -> Result<ReducedHamiltonian> {
    let n = grid.n_points;
    let dr = grid.dr();
    model.check_r(grid.point(0))?;
    model.check_r(grid.point(n - 1))?;
    let kinetic_coeff = 1.0 / (2.0 * grid.reduced_mass * dr * dr);
    let mut diag = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut coupling = vec![0.0; n];
    for i in 0..n {
        let r = grid.point(i);
        let h_ec = build_sigma_pi_rotating(model, rot, r, cfg.theta, cfg.phi)?;
        let centrifugal = if cfg.include_centrifugal {
            centrifugal_literal(cfg, rot, grid.reduced_mass, r)
        } else {
            0.0
        };
        for ch in 0..3 {
            diag[ch][i] = h_ec.get(ch, ch).re + 2.0 * kinetic_coeff + centrifugal;
        }
        coupling[i] = h_ec.get(0, 1).re;
    }
    Ok(ReducedHamiltonian { grid: *grid, kinetic_coeff, diag, coupling })
}

#[derive(Clone, Copy, Debug)]
pub struct PropagateOptions {
    /// Krylov subspace dimension per step.
    pub krylov_dim: usize,
    /// Norm drift bound; exceeding it mid-run aborts with diagnostics.
    pub norm_tol: f64,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        PropagateOptions { krylov_dim: 24, norm_tol: 1e-10 }
    }
}

/// Per-step observables of a propagation run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub energies: Vec<f64>,
    pub populations: [Vec<f64>; 3],
    pub r_means: [Vec<f64>; 3],
    pub final_state: Wavepacket,
}

impl Trajectory {
    pub fn norm_drift(&self) -> f64 {
        self.norms.iter().fold(0.0f64, |acc, &n| acc.max((n - 1.0).abs()))
    }

    pub fn energy_drift_rel(&self) -> f64 {
        let e0 = self.energies[0];
        let floor = e0.abs().max(1e-12);
        self.energies.iter().fold(0.0f64, |acc, &e| acc.max((e - e0).abs() / floor))
    }
}

/// Lanczos exponential step: psi <- exp(-i H dt) psi via an m-dimensional
/// Krylov subspace with full reorthogonalization.
fn lanczos_step(
    h: &ReducedHamiltonian,
    psi: &mut [Complex64],
    dt: f64,
    m: usize,
) -> Result<()> {
    let dim = psi.len();
    let beta0 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if beta0 == 0.0 {
        return Ok(());
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    basis.push(psi.iter().map(|z| z / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..m {
        h.apply(&basis[j], &mut w);
        let aj: Complex64 = basis[j].iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
        alphas.push(aj.re);
        // full reorthogonalization (subtracts the alpha and beta terms too)
        for v in basis.iter() {
            let proj: Complex64 = v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
            for (wi, vi) in w.iter_mut().zip(v.iter()) {
                *wi -= proj * vi;
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        betas.push(beta);
        if j + 1 == m || beta < 1e-14 {
            break;
        }
        basis.push(w.iter().map(|z| z / beta).collect());
    }
    let k = alphas.len();
    // exp(-i T dt) e1 via the eigen-decomposition of the small tridiagonal
    let mut d = alphas.clone();
    let mut e = vec![0.0; k];
    for j in 0..k.saturating_sub(1) {
        e[j] = betas[j];
    }
    let (vals, vecs) = small_tridiag_eig(&mut d, &mut e)?;
    let mut coeff = vec![Complex64::new(0.0, 0.0); k];
    for s in 0..k {
        let phase = Complex64::from_polar(1.0, -vals[s] * dt);
        let v0 = vecs[s * k]; // first component of eigenvector s
        for i in 0..k {
            coeff[i] += vecs[s * k + i] * v0 * phase;
        }
    }
    for z in psi.iter_mut() {
        *z = Complex64::new(0.0, 0.0);
    }
    for (i, v) in basis.iter().enumerate().take(k) {
        let c = coeff[i] * beta0;
        for (p, vi) in psi.iter_mut().zip(v.iter()) {
            *p += c * vi;
        }
    }
    Ok(())
}

/// Eigen-decomposition of a small real symmetric tridiagonal; returns
/// (values, column-major vectors).
fn small_tridiag_eig(d: &mut [f64], e: &mut [f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = d.len();
    let mut h = HermitianMatrix::zeros(
        (0..k).map(|i| BasisState::Shaft { index: i }).collect(),
    )?;
    for i in 0..k {
        h.set_diag(i, d[i]);
        if i + 1 < k {
            h.set_pair(i, i + 1, Complex64::new(e[i], 0.0));
        }
    }
    let dec = crate::eigen::eigensolve_dense(&h)?;
    let mut vecs = vec![0.0; k * k];
    for s in 0..k {
        for i in 0..k {
            vecs[s * k + i] = dec.eigenvector(s)[i].re;
        }
    }
    Ok((dec.eigenvalues, vecs))
}

/// Propagate `psi0` by n_steps of size dt, recording observables each step.
pub fn propagate(
    h: &ReducedHamiltonian,
    psi0: &Wavepacket,
    dt: f64,
    n_steps: usize,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    let dr = h.grid.dr();
    let norm0 = psi0.norm2(dr);
    if (norm0 - 1.0).abs() > 1e-8 {
        return Err(RotcavError::InvalidInput(format!(
            "initial wavepacket norm^2 = {norm0}, expected 1"
        )));
    }
    let mut flat = psi0.flat();
    let n_grid = h.grid.n_points;
    let record = |flat: &[Complex64], t: f64, traj: &mut Trajectory| {
        let wp = Wavepacket::from_flat(flat, psi0.frame, t);
        traj.times.push(t);
        traj.norms.push(wp.norm2(dr));
        traj.energies.push(h.expectation(flat, dr));
        for ch in 0..3 {
            traj.populations[ch].push(wp.channel_population(ch, dr));
            traj.r_means[ch].push(wp.r_mean(&h.grid, ch));
        }
    };
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_steps + 1),
        norms: Vec::with_capacity(n_steps + 1),
        energies: Vec::with_capacity(n_steps + 1),
        populations: [Vec::new(), Vec::new(), Vec::new()],
        r_means: [Vec::new(), Vec::new(), Vec::new()],
        final_state: psi0.clone(),
    };
    record(&flat, psi0.time, &mut traj);
    let m = opts.krylov_dim.min(3 * n_grid).max(2);
    for step in 1..=n_steps {
        lanczos_step(h, &mut flat, dt, m)?;
        let t = psi0.time + step as f64 * dt;
        record(&flat, t, &mut traj);
        let drift = (traj.norms.last().unwrap() - 1.0).abs();
        if drift > opts.norm_tol {
            return Err(RotcavError::StabilityViolation { step, drift, bound: opts.norm_tol });
        }
    }
    traj.final_state = Wavepacket::from_flat(&flat, psi0.frame, psi0.time + n_steps as f64 * dt);
    Ok(traj)
}

/// Default stable time step: dt * ||H||_bound = 0.5.
pub fn default_dt(h: &ReducedHamiltonian) -> f64 {
    0.5 / h.norm_bound().max(1e-300)
}

/// Transform between the lab and rotating frames at frozen angles: diagonal
/// channel phases exp(-+ i w t) on Pi_+- with w = Omega . (R z), the
/// expectation of u . L between the rotated Pi states.
pub fn frame_transform(
    psi: &Wavepacket,
    rot: &RotationSpec,
    cfg: &FrozenAngleConfig,
    t: f64,
    direction: FrameDirection,
) -> Result<Wavepacket> {
    let expected = match direction {
        FrameDirection::ToLab => Frame::Rotating,
        FrameDirection::ToRotating => Frame::Lab,
    };
    if psi.frame != expected {
        return Err(RotcavError::FrameMismatch {
            expected: expected.name(),
            found: psi.frame.name(),
        });
    }
    let r = rotation_matrix(cfg.theta, cfg.phi);
    let w = rot.omega_x() * r[0][2] + rot.omega_y() * r[1][2] + rot.omega_z() * r[2][2];
    let sign = match direction {
        FrameDirection::ToLab => 1.0,
        FrameDirection::ToRotating => -1.0,
    };
    let phase_plus = Complex64::from_polar(1.0, -sign * w * t);
    let phase_minus = Complex64::from_polar(1.0, sign * w * t);
    let mut out = psi.clone();
    for z in out.components[1].iter_mut() {
        *z *= phase_plus;
    }
    for z in out.components[2].iter_mut() {
        *z *= phase_minus;
    }
    out.frame = match direction {
        FrameDirection::ToLab => Frame::Lab,
        FrameDirection::ToRotating => Frame::Rotating,
    };
    Ok(out)
}
