//! Closed-form polariton branch energies and dark-state censuses.
//!
//! The general-axis branch formula is evaluated with hypot-style
//! compositions; the inner minus combination is rationalized to
//! 4 Omega_z^2 N g^2 / (A + S) to avoid cancellation when the two terms
//! nearly coincide.

use crate::atom_cavity::{CavitySpec, RotationSpec};

/// Which ensemble structure the census describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleCase {
    /// Rotation axis in the XY plane.
    Xy,
    /// Axis with both in-plane and Z components.
    General,
}

/// Branch energies and dark-level multiplicities predicted for an ensemble.
#[derive(Clone, Debug)]
pub struct SpectrumPrediction {
    /// Polariton branch energies, ascending.
    pub branch_energies: Vec<f64>,
    /// (energy, multiplicity) of the collective dark levels, ascending.
    pub dark_levels: Vec<(f64, usize)>,
    /// Per-atom entangled dark states at omega_c that are split off before
    /// the arrowhead is assembled (XY case only; zero for a general axis,
    /// where no per-atom state decouples).
    pub entangled_dark_count: usize,
}

impl SpectrumPrediction {
    /// Full eigenvalue multiset (branches, dark levels and entangled dark
    /// states at omega_c), ascending — comparable to the dense oracle on
    /// the full 3N+1 basis.
    pub fn full_multiset(&self, omega_c: f64) -> Vec<f64> {
        let mut out = self.reduced_multiset();
        out.extend(std::iter::repeat_n(omega_c, self.entangled_dark_count));
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Eigenvalue multiset of the arrowhead space only (branches plus dark
    /// levels, without the entangled per-atom states), ascending.
    pub fn reduced_multiset(&self) -> Vec<f64> {
        let mut out = self.branch_energies.clone();
        for (e, m) in &self.dark_levels {
            out.extend(std::iter::repeat_n(*e, *m));
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// XY-axis spectrum: branches omega_c +- sqrt(Omega^2 + N g^2) and omega_c,
/// with N-1 dark states at each of omega_c +- Omega and N entangled dark
/// states at omega_c. Requires a planar axis (only |Omega| enters).
pub fn spectrum_xy(cavity: &CavitySpec, rot: &RotationSpec, n: usize) -> SpectrumPrediction {
    let split = rot.omega().hypot((n as f64).sqrt() * cavity.g);
    let branch_energies = vec![
        cavity.omega_c - split,
        cavity.omega_c,
        cavity.omega_c + split,
    ];
    let mut dark_levels = Vec::new();
    if n > 1 && rot.omega() > 0.0 {
        dark_levels.push((cavity.omega_c - rot.omega(), n - 1));
        dark_levels.push((cavity.omega_c + rot.omega(), n - 1));
    }
    SpectrumPrediction { branch_energies, dark_levels, entangled_dark_count: n }
}

/// Non-rotating spectrum: omega_c +- sqrt(N) g with N-1 dark states at
/// omega_c (the m = +-1 states stay decoupled and are not counted here).
pub fn spectrum_nonrotating(cavity: &CavitySpec, n: usize) -> SpectrumPrediction {
    let split = (n as f64).sqrt() * cavity.g;
    let mut dark_levels = Vec::new();
    if n > 1 {
        dark_levels.push((cavity.omega_c, n - 1));
    }
    SpectrumPrediction {
        branch_energies: vec![cavity.omega_c - split, cavity.omega_c + split],
        dark_levels,
        entangled_dark_count: 0,
    }
}

/// General-axis four-branch spectrum,
/// E = omega_c +- sqrt((A +- S)/2) with A = Omega^2 + N g^2 and
/// S = hypot(Omega_xy^2 - Omega_z^2 + N g^2, 2 Omega_xy Omega_z), plus
/// N-1 dark states at each of omega_c and omega_c +- Omega.
pub fn spectrum_general(cavity: &CavitySpec, rot: &RotationSpec, n: usize) -> SpectrumPrediction {
    let ng2 = n as f64 * cavity.g * cavity.g;
    let oxy2 = rot.omega_xy() * rot.omega_xy();
    let oz2 = rot.omega_z() * rot.omega_z();
    let a = rot.omega() * rot.omega() + ng2;
    let s = (oxy2 - oz2 + ng2).hypot(2.0 * rot.omega_xy() * rot.omega_z().abs());
    let outer = ((a + s) / 2.0).sqrt();
    // A - S = 4 Omega_z^2 N g^2 / (A + S), exact in real arithmetic.
    let inner = if a + s > 0.0 { (2.0 * oz2 * ng2 / (a + s)).sqrt() } else { 0.0 };
    let mut branch_energies = vec![
        cavity.omega_c - outer,
        cavity.omega_c - inner,
        cavity.omega_c + inner,
        cavity.omega_c + outer,
    ];
    branch_energies.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut dark_levels = Vec::new();
    if n > 1 && rot.omega() > 0.0 {
        dark_levels.push((cavity.omega_c - rot.omega(), n - 1));
        dark_levels.push((cavity.omega_c, n - 1));
        dark_levels.push((cavity.omega_c + rot.omega(), n - 1));
        dark_levels.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    }
    SpectrumPrediction { branch_energies, dark_levels, entangled_dark_count: 0 }
}

/// Dark states only, as (energy, multiplicity) over the full 3N+1 space.
///
/// XY: N-1 at each of omega_c +- Omega plus the N per-atom entangled states
/// at omega_c. General: N-1 at each of omega_c and omega_c +- Omega — the
/// per-atom states do not decouple there, so nothing is counted twice (the
/// dense-oracle multiset fixes this bookkeeping; see the census tests).
pub fn dark_state_census(rot: &RotationSpec, n: usize, case: EnsembleCase) -> Vec<(f64, usize)> {
    dark_state_census_at(1.0, rot, n, case)
}

/// Census with an explicit cavity frequency (energies are omega_c-anchored).
pub fn dark_state_census_at(
    omega_c: f64,
    rot: &RotationSpec,
    n: usize,
    case: EnsembleCase,
) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    match case {
        EnsembleCase::Xy => {
            if n > 1 && rot.omega() > 0.0 {
                out.push((omega_c - rot.omega(), n - 1));
                out.push((omega_c + rot.omega(), n - 1));
            }
            out.push((omega_c, n));
        }
        EnsembleCase::General => {
            if n > 1 {
                out.push((omega_c - rot.omega(), n - 1));
                out.push((omega_c, n - 1));
                out.push((omega_c + rot.omega(), n - 1));
            }
        }
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out
}
