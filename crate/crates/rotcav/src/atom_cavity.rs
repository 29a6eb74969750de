//! Atom-cavity Hamiltonian builders in the single-excitation space.
//!
//! The cavity polarization defines Z. A single l=0 -> l=1 atom resonant with
//! the mode contributes the photon state and three excited states; rotating
//! the cavity couples them through the ladder combinations Omega_+- and, for
//! a general axis, shifts the m = +-1 levels by -+ Omega_z. Basis orderings
//! are fixed per builder because tests pin entry positions.

use num_complex::Complex64;

use crate::arrowhead::ArrowheadMatrix;
use crate::error::{Result, RotcavError};
use crate::hermitian::{BasisState, HermitianMatrix};

const PLANAR_RTOL: f64 = 1e-12;

/// Cavity mode frequency and effective coupling g = g0 * d_z.
///
/// `detuning` offsets the excited-state energy from exact resonance; it
/// defaults to zero and none of the reference results exercise it.
#[derive(Clone, Copy, Debug)]
pub struct CavitySpec {
    pub omega_c: f64,
    pub g: f64,
    pub detuning: f64,
}

impl CavitySpec {
    pub fn new(omega_c: f64, g: f64) -> Result<Self> {
        if !(omega_c > 0.0) {
            return Err(RotcavError::InvalidInput(format!("omega_c must be > 0, got {omega_c}")));
        }
        if !(g >= 0.0) {
            return Err(RotcavError::InvalidInput(format!("g must be >= 0, got {g}")));
        }
        Ok(CavitySpec { omega_c, g, detuning: 0.0 })
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    fn excited(&self) -> f64 {
        self.omega_c + self.detuning
    }
}

/// Rotation axis (unit vector) and angular velocity Omega, entering all
/// matrices as the energy hbar*Omega.
#[derive(Clone, Copy, Debug)]
pub struct RotationSpec {
    axis: [f64; 3],
    omega: f64,
}

impl RotationSpec {
    /// Normalizes `axis`; rejects the zero vector and negative Omega.
    pub fn new(axis: [f64; 3], omega: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(RotcavError::InvalidInput("rotation axis must be a nonzero vector".into()));
        }
        if !(omega >= 0.0) {
            return Err(RotcavError::InvalidInput(format!("omega must be >= 0, got {omega}")));
        }
        Ok(RotationSpec { axis: [axis[0] / norm, axis[1] / norm, axis[2] / norm], omega })
    }

    /// Axis in the XY plane at azimuth alpha from the X axis.
    pub fn in_plane(alpha: f64, omega: f64) -> Result<Self> {
        Self::new([alpha.cos(), alpha.sin(), 0.0], omega)
    }

    pub fn none() -> Self {
        RotationSpec { axis: [0.0, 0.0, 1.0], omega: 0.0 }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn omega_x(&self) -> f64 {
        self.omega * self.axis[0]
    }

    pub fn omega_y(&self) -> f64 {
        self.omega * self.axis[1]
    }

    pub fn omega_z(&self) -> f64 {
        self.omega * self.axis[2]
    }

    /// Effective in-plane angular velocity sqrt(Omega_x^2 + Omega_y^2).
    pub fn omega_xy(&self) -> f64 {
        self.omega_x().hypot(self.omega_y())
    }

    /// Omega_+ = (Omega_x - i Omega_y)/sqrt(2), conjugate to L_+.
    pub fn omega_plus(&self) -> Complex64 {
        Complex64::new(self.omega_x(), -self.omega_y()) / 2.0_f64.sqrt()
    }

    /// Omega_- = (Omega_x + i Omega_y)/sqrt(2) = conj(Omega_+).
    pub fn omega_minus(&self) -> Complex64 {
        self.omega_plus().conj()
    }

    /// True when the axis lies in the XY plane within tolerance.
    pub fn is_planar(&self) -> bool {
        self.omega_z().abs() <= PLANAR_RTOL * self.omega
    }

    pub fn is_zero(&self) -> bool {
        self.omega == 0.0
    }
}

/// Number of identical non-interacting atoms sharing the mode.
#[derive(Clone, Copy, Debug)]
pub struct EnsembleSpec {
    pub n_atoms: usize,
}

impl EnsembleSpec {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(RotcavError::InvalidInput("n_atoms must be >= 1".into()));
        }
        Ok(EnsembleSpec { n_atoms })
    }
}

fn require_planar(rot: &RotationSpec) -> Result<()> {
    if !rot.is_planar() {
        return Err(RotcavError::NonPlanarAxis { omega_z: rot.omega_z() });
    }
    Ok(())
}

/// The 4x4 single-atom matrix for an XY-plane rotation axis, in the basis
/// [ground+photon, m=0, m=+1, m=-1]: diagonal omega_c, photon-to-(m=0)
/// coupling g, and the ladder couplings -Omega_-+ between m=0 and m=+-1.
pub fn build_single_atom_xy(cavity: &CavitySpec, rot: &RotationSpec) -> Result<HermitianMatrix> {
    require_planar(rot)?;
    let basis = vec![
        BasisState::GroundOnePhoton,
        BasisState::AtomExcited { m: 0, atom: 0 },
        BasisState::AtomExcited { m: 1, atom: 0 },
        BasisState::AtomExcited { m: -1, atom: 0 },
    ];
    let mut h = HermitianMatrix::zeros(basis)?;
    h.set_diag(0, cavity.omega_c);
    for i in 1..4 {
        h.set_diag(i, cavity.excited());
    }
    h.set_pair(0, 1, Complex64::new(cavity.g, 0.0));
    h.set_pair(1, 2, -rot.omega_minus());
    h.set_pair(1, 3, -rot.omega_plus());
    Ok(h)
}

/// Eq.-(3) matrix plus the -Omega_z L_z shifts: the raw-basis single-atom
/// Hamiltonian for any rotation axis (valid at Omega = 0 too). Used as the
/// dense oracle for the rotated-basis builders.
pub fn build_single_atom_full(cavity: &CavitySpec, rot: &RotationSpec, atom: usize) -> HermitianMatrix {
    let basis = vec![
        BasisState::GroundOnePhoton,
        BasisState::AtomExcited { m: 0, atom },
        BasisState::AtomExcited { m: 1, atom },
        BasisState::AtomExcited { m: -1, atom },
    ];
    let mut h = HermitianMatrix::zeros(basis).expect("distinct labels");
    h.set_diag(0, cavity.omega_c);
    h.set_diag(1, cavity.excited());
    h.set_diag(2, cavity.excited() - rot.omega_z());
    h.set_diag(3, cavity.excited() + rot.omega_z());
    h.set_pair(0, 1, Complex64::new(cavity.g, 0.0));
    h.set_pair(1, 2, -rot.omega_minus());
    h.set_pair(1, 3, -rot.omega_plus());
    h
}

/// Coefficients (on m=+1 and m=-1) of the entangled dark state
/// psi_0 = (Omega_+ psi_{1,1} - Omega_- psi_{1,-1})/Omega for an XY axis.
pub fn dark_state_xy(rot: &RotationSpec) -> Result<[Complex64; 2]> {
    require_planar(rot)?;
    if rot.omega_xy() == 0.0 {
        return Err(RotcavError::ZeroPlanarRotation);
    }
    let omega = rot.omega();
    Ok([rot.omega_plus() / omega, -rot.omega_minus() / omega])
}

/// The reduced 3x3 in the basis [ground+photon, psi_+, psi_-] with
/// psi_+- = [m=0 -+ (Omega_+ psi_{1,1} + Omega_- psi_{1,-1})/Omega]/sqrt(2):
/// diag(omega_c, omega_c + Omega, omega_c - Omega) and g/sqrt(2) couplings.
pub fn build_single_atom_reduced_xy(cavity: &CavitySpec, rot: &RotationSpec) -> Result<HermitianMatrix> {
    require_planar(rot)?;
    if rot.omega_xy() == 0.0 {
        return Err(RotcavError::ZeroPlanarRotation);
    }
    let basis = vec![
        BasisState::GroundOnePhoton,
        BasisState::PsiPlus { atom: 0 },
        BasisState::PsiMinus { atom: 0 },
    ];
    let mut h = HermitianMatrix::zeros(basis)?;
    h.set_diag(0, cavity.omega_c);
    h.set_diag(1, cavity.excited() + rot.omega());
    h.set_diag(2, cavity.excited() - rot.omega());
    let gt = cavity.g / 2.0_f64.sqrt();
    h.set_pair(0, 1, Complex64::new(gt, 0.0));
    h.set_pair(0, 2, Complex64::new(gt, 0.0));
    Ok(h)
}

/// The rotation-induced polariton: normalized eigenvector proportional to
/// (Omega*sqrt(2)/g, -1, +1) in the [ground+photon, psi_+, psi_-] basis,
/// with eigenvalue omega_c.
pub fn rotation_induced_polariton_xy(cavity: &CavitySpec, rot: &RotationSpec) -> Result<[Complex64; 3]> {
    require_planar(rot)?;
    if cavity.g == 0.0 {
        return Err(RotcavError::ZeroCoupling);
    }
    if rot.omega_xy() == 0.0 {
        return Err(RotcavError::ZeroPlanarRotation);
    }
    let c0 = rot.omega() * 2.0_f64.sqrt() / cavity.g;
    let norm = (c0 * c0 + 2.0).sqrt();
    Ok([
        Complex64::new(c0 / norm, 0.0),
        Complex64::new(-1.0 / norm, 0.0),
        Complex64::new(1.0 / norm, 0.0),
    ])
}

/// Photonic weight |c_photon|^2 = 2 Omega^2 / (2 Omega^2 + 2 g^2) of the
/// rotation-induced polariton.
pub fn rotation_induced_polariton_photon_weight(cavity: &CavitySpec, rot: &RotationSpec) -> Result<f64> {
    let v = rotation_induced_polariton_xy(cavity, rot)?;
    Ok(v[0].norm_sqr())
}

/// The general-axis 4x4 in the eigenbasis of the rotated excited block,
/// [ground+photon, psi_+, psi_-, dark-like]: diag(omega_c, omega_c + Omega,
/// omega_c - Omega, omega_c), couplings (gt*Oxy/O, gt*Oxy/O, g*Oz/O) with
/// gt = g/sqrt(2).
pub fn build_single_atom_general(cavity: &CavitySpec, rot: &RotationSpec) -> Result<HermitianMatrix> {
    if rot.is_zero() {
        return Err(RotcavError::ZeroTotalRotation);
    }
    let basis = vec![
        BasisState::GroundOnePhoton,
        BasisState::PsiPlus { atom: 0 },
        BasisState::PsiMinus { atom: 0 },
        BasisState::Dark { atom: 0 },
    ];
    let mut h = HermitianMatrix::zeros(basis)?;
    let omega = rot.omega();
    let gt = cavity.g / 2.0_f64.sqrt();
    h.set_diag(0, cavity.omega_c);
    h.set_diag(1, cavity.excited() + omega);
    h.set_diag(2, cavity.excited() - omega);
    h.set_diag(3, cavity.excited());
    h.set_pair(0, 1, Complex64::new(gt * rot.omega_xy() / omega, 0.0));
    h.set_pair(0, 2, Complex64::new(gt * rot.omega_xy() / omega, 0.0));
    h.set_pair(0, 3, Complex64::new(cavity.g * rot.omega_z() / omega, 0.0));
    Ok(h)
}

/// N-atom arrowhead Hamiltonian. XY axis: the reduced 2x2 block repeats per
/// atom (dim 2N+1); general axis: the 3x3 trio repeats (dim 3N+1) with the
/// coupling trio (gt*Oxy/O, gt*Oxy/O, g*Oz/O).
pub fn build_ensemble(cavity: &CavitySpec, rot: &RotationSpec, ens: &EnsembleSpec) -> Result<ArrowheadMatrix> {
    if rot.is_zero() {
        return Err(RotcavError::ZeroTotalRotation);
    }
    let n = ens.n_atoms;
    let omega = rot.omega();
    let gt = cavity.g / 2.0_f64.sqrt();
    let mut shaft = Vec::new();
    let mut couplings = Vec::new();
    let mut basis = vec![BasisState::GroundOnePhoton];
    if rot.is_planar() {
        for atom in 0..n {
            shaft.push(cavity.excited() + omega);
            shaft.push(cavity.excited() - omega);
            couplings.push(Complex64::new(gt, 0.0));
            couplings.push(Complex64::new(gt, 0.0));
            basis.push(BasisState::PsiPlus { atom });
            basis.push(BasisState::PsiMinus { atom });
        }
    } else {
        let w_pm = Complex64::new(gt * rot.omega_xy() / omega, 0.0);
        let w_z = Complex64::new(cavity.g * rot.omega_z() / omega, 0.0);
        for atom in 0..n {
            shaft.push(cavity.excited() + omega);
            shaft.push(cavity.excited() - omega);
            shaft.push(cavity.excited());
            couplings.push(w_pm);
            couplings.push(w_pm);
            couplings.push(w_z);
            basis.push(BasisState::PsiPlus { atom });
            basis.push(BasisState::PsiMinus { atom });
            basis.push(BasisState::Dark { atom });
        }
    }
    ArrowheadMatrix::new(cavity.omega_c, shaft, couplings)?.with_basis(basis)
}

/// Non-rotating N-atom arrowhead: the photon coupled with strength g to each
/// atom's m=0 state, reproducing E = omega_c +- sqrt(N) g.
pub fn build_nonrotating(cavity: &CavitySpec, ens: &EnsembleSpec) -> ArrowheadMatrix {
    let n = ens.n_atoms;
    let shaft = vec![cavity.excited(); n];
    let couplings = vec![Complex64::new(cavity.g, 0.0); n];
    let mut basis = vec![BasisState::GroundOnePhoton];
    basis.extend((0..n).map(|atom| BasisState::AtomExcited { m: 0, atom }));
    ArrowheadMatrix::new(cavity.omega_c, shaft, couplings)
        .expect("lengths match")
        .with_basis(basis)
        .expect("lengths match")
}

/// Full-basis N-atom Hamiltonian (dim 3N+1) in the raw basis
/// [photon, atom0: m=0, m=+1, m=-1, atom1: ...]; the dense oracle for the
/// dark-state census.
pub fn build_ensemble_full(cavity: &CavitySpec, rot: &RotationSpec, ens: &EnsembleSpec) -> HermitianMatrix {
    let n = ens.n_atoms;
    let mut basis = Vec::with_capacity(3 * n + 1);
    basis.push(BasisState::GroundOnePhoton);
    for atom in 0..n {
        basis.push(BasisState::AtomExcited { m: 0, atom });
        basis.push(BasisState::AtomExcited { m: 1, atom });
        basis.push(BasisState::AtomExcited { m: -1, atom });
    }
    let mut h = HermitianMatrix::zeros(basis).expect("distinct labels");
    h.set_diag(0, cavity.omega_c);
    for atom in 0..n {
        let base = 1 + 3 * atom;
        h.set_diag(base, cavity.excited());
        h.set_diag(base + 1, cavity.excited() - rot.omega_z());
        h.set_diag(base + 2, cavity.excited() + rot.omega_z());
        h.set_pair(0, base, Complex64::new(cavity.g, 0.0));
        h.set_pair(base, base + 1, -rot.omega_minus());
        h.set_pair(base, base + 2, -rot.omega_plus());
    }
    h
}

/// The N per-atom entangled dark states in the full 3N+1 basis (XY axis
/// only; they cease to be eigenstates once Omega_z != 0).
pub fn entangled_dark_states(rot: &RotationSpec, ens: &EnsembleSpec) -> Result<Vec<Vec<Complex64>>> {
    require_planar(rot)?;
    let coeffs = dark_state_xy(rot)?;
    let n = ens.n_atoms;
    let dim = 3 * n + 1;
    let mut out = Vec::with_capacity(n);
    for atom in 0..n {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[1 + 3 * atom + 1] = coeffs[0];
        v[1 + 3 * atom + 2] = coeffs[1];
        out.push(v);
    }
    Ok(out)
}
