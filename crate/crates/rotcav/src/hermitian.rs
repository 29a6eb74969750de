//! Dense complex Hermitian matrices with labeled single-excitation bases.
//!
//! All energies are in one consistent unit with hbar = 1, so angular
//! velocities enter directly as energies.

use num_complex::Complex64;

use crate::error::{Result, RotcavError};

/// Informational label for the energy unit shared by every quantity in a
/// computation. No conversion ever happens inside builders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyUnit {
    pub name: String,
}

impl Default for EnergyUnit {
    fn default() -> Self {
        EnergyUnit { name: "hartree".into() }
    }
}

/// Electronic channel of the diatomic model, used to label grid bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Sigma,
    PiPlus,
    PiMinus,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Sigma, Channel::PiPlus, Channel::PiMinus];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Sigma => "sigma",
            Channel::PiPlus => "pi_plus",
            Channel::PiMinus => "pi_minus",
        }
    }
}

/// One basis state of the single-excitation space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisState {
    /// Atomic ground state with one cavity photon.
    GroundOnePhoton,
    /// Excited atom `atom` in the l=1, m state, zero photons.
    AtomExcited { m: i8, atom: usize },
    /// Rotated combination psi_plus of atom `atom` (energy omega_c + Omega).
    PsiPlus { atom: usize },
    /// Rotated combination psi_minus of atom `atom` (energy omega_c - Omega).
    PsiMinus { atom: usize },
    /// The omega_c eigenvector of the rotated excited block of atom `atom`.
    Dark { atom: usize },
    /// Molecular Sigma ground state with one cavity photon.
    SigmaOnePhoton,
    /// Molecular Pi_+ = (Pi_x + i Pi_y)/sqrt(2), zero photons.
    PiPlus,
    /// Molecular Pi_- = (Pi_x - i Pi_y)/sqrt(2), zero photons.
    PiMinus,
    /// Shaft entry of a generic arrowhead matrix (benchmarks, tests).
    Shaft { index: usize },
    /// Radial grid point of one electronic-cavity channel.
    ChannelGrid { channel: Channel, index: usize },
}

impl BasisState {
    /// Photon number carried by the state: 1 for the ground+photon states,
    /// 0 for every excited state (single-excitation subspace).
    pub fn photon_number(&self) -> u8 {
        match self {
            BasisState::GroundOnePhoton | BasisState::SigmaOnePhoton => 1,
            BasisState::ChannelGrid { channel: Channel::Sigma, .. } => 1,
            _ => 0,
        }
    }
}

/// Dense complex Hermitian matrix, row-major, with one label per basis state.
#[derive(Clone, Debug)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    basis: Vec<BasisState>,
}

impl HermitianMatrix {
    /// Zero matrix over the given basis. Labels must be pairwise distinct.
    pub fn zeros(basis: Vec<BasisState>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 {
            return Err(RotcavError::InvalidInput("empty basis".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &basis {
            if !seen.insert(*b) {
                return Err(RotcavError::InvalidInput(format!(
                    "duplicate basis label {b:?}"
                )));
            }
        }
        Ok(HermitianMatrix { dim, entries: vec![Complex64::new(0.0, 0.0); dim * dim], basis })
    }

    pub fn from_entries(entries: Vec<Complex64>, basis: Vec<BasisState>) -> Result<Self> {
        let dim = basis.len();
        if entries.len() != dim * dim {
            return Err(RotcavError::InvalidInput(format!(
                "entry count {} does not match dim {}^2",
                entries.len(),
                dim
            )));
        }
        let mut m = Self::zeros(basis)?;
        m.entries = entries;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[BasisState] {
        &self.basis
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    /// Set the diagonal entry (i, i) to a real value.
    pub fn set_diag(&mut self, i: usize, value: f64) {
        self.entries[i * self.dim + i] = Complex64::new(value, 0.0);
    }

    /// Set (i, j) and mirror the conjugate into (j, i).
    pub fn set_pair(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value.conj();
    }

    /// Largest |a_ij - conj(a_ji)| over all pairs. Builders mirror entries,
    /// so this is zero for every matrix constructed in this crate; tests use
    /// it as the Hermiticity hook.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
    }

    /// Real part of the trace (the diagonal of a Hermitian matrix is real).
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// y = H x.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for i in 0..self.dim {
            let row = &self.entries[i * self.dim..(i + 1) * self.dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, xv) in row.iter().zip(x.iter()) {
                acc += h * xv;
            }
            y[i] = acc;
        }
    }

    /// Conjugate the matrix by a unitary given as row-major `u`: returns
    /// U† H U with the same basis labels. Test utility for basis-change
    /// invariance checks.
    pub fn conjugated_by(&self, u: &[Complex64]) -> Result<Self> {
        let n = self.dim;
        if u.len() != n * n {
            return Err(RotcavError::InvalidInput("unitary has wrong size".into()));
        }
        // t = H U
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let h = self.entries[i * n + k];
                if h.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    t[i * n + j] += h * u[k * n + j];
                }
            }
        }
        // out = U† t
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let uc = u[k * n + i].conj();
                if uc.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += uc * t[k * n + j];
                }
            }
        }
        HermitianMatrix::from_entries(out, self.basis.clone())
    }
}
