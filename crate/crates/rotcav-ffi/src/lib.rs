//! C ABI for the rotcav toolkit.
//!
//! Conventions: every function returns a `RotcavStatus`; on any non-Ok
//! status the output buffers are untouched and a per-thread message is
//! available through `rotcav_last_error_message`. Handles returned by the
//! `_new` constructors are opaque and must be released with the matching
//! `_free`; all other pointers are caller-owned buffers.

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use rotcav::arrowhead::{eigensolve_arrowhead, secular_function, ArrowheadMatrix};
use rotcav::atom_cavity::{build_ensemble, build_nonrotating, CavitySpec, EnsembleSpec, RotationSpec};
use rotcav::analytic::{spectrum_general, spectrum_nonrotating, spectrum_xy};
use rotcav::molecule::{
    adiabatic_energies, find_licis, DiatomicModel, LiciOptions, PotentialCurve, ShiftBranch,
    TransitionDipole,
};
use rotcav::RotcavError;

/// Result code of every C-ABI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotcavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericFailure = 3,
    BufferTooSmall = 4,
    NoCrossing = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(cleaned).unwrap();
    });
}

fn status_of(err: &RotcavError) -> RotcavStatus {
    match err {
        RotcavError::NoCrossing { .. } => RotcavStatus::NoCrossing,
        RotcavError::ConvergenceFailure { .. }
        | RotcavError::NonHermitianInput { .. }
        | RotcavError::PoleEvaluation { .. }
        | RotcavError::StabilityViolation { .. } => RotcavStatus::NumericFailure,
        _ => RotcavStatus::InvalidArgument,
    }
}

fn fail(err: &RotcavError) -> RotcavStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rotcav_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Static crate version string.
#[no_mangle]
pub extern "C" fn rotcav_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

fn rotation(axis: &[f64; 3], omega: f64) -> Result<RotationSpec, RotcavError> {
    if omega == 0.0 {
        Ok(RotationSpec::none())
    } else {
        RotationSpec::new(*axis, omega)
    }
}

/// Number of single-excitation states of the N-atom ensemble Hamiltonian
/// for the given rotation axis: N+1 without rotation, 2N+1 for an axis in
/// the XY plane, 3N+1 otherwise. Returns 0 on invalid input.
///
/// # Safety
/// `axis` must point to 3 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn rotcav_ensemble_dim(
    axis: *const f64,
    omega: f64,
    n_atoms: usize,
) -> usize {
    if axis.is_null() || n_atoms == 0 {
        return 0;
    }
    let axis = &*(axis as *const [f64; 3]);
    match rotation(axis, omega) {
        Ok(rot) if rot.is_zero() => n_atoms + 1,
        Ok(rot) if rot.is_planar() => 2 * n_atoms + 1,
        Ok(_) => 3 * n_atoms + 1,
        Err(_) => 0,
    }
}

/// All eigenvalues of the N-atom ensemble Hamiltonian, ascending, written
/// to `out` (capacity from `rotcav_ensemble_dim`).
///
/// # Safety
/// `axis` must point to 3 readable doubles; `out` to `capacity` writable
/// doubles; `out_len`, when non-null, to one writable usize.
#[no_mangle]
pub unsafe extern "C" fn rotcav_ensemble_spectrum(
    omega_c: f64,
    g: f64,
    axis: *const f64,
    omega: f64,
    n_atoms: usize,
    out: *mut f64,
    capacity: usize,
    out_len: *mut usize,
) -> RotcavStatus {
    if axis.is_null() || out.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    let axis = &*(axis as *const [f64; 3]);
    let inner = || -> Result<Vec<f64>, RotcavError> {
        let cavity = CavitySpec::new(omega_c, g)?;
        let rot = rotation(axis, omega)?;
        let ens = EnsembleSpec::new(n_atoms)?;
        let arrow = if rot.is_zero() {
            build_nonrotating(&cavity, &ens)
        } else {
            build_ensemble(&cavity, &rot, &ens)?
        };
        Ok(eigensolve_arrowhead(&arrow, false)?.eigenvalues)
    };
    match inner() {
        Ok(values) => {
            if capacity < values.len() {
                set_error(&format!("need capacity {}, got {capacity}", values.len()));
                return RotcavStatus::BufferTooSmall;
            }
            std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
            if !out_len.is_null() {
                *out_len = values.len();
            }
            RotcavStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Closed-form polariton branch energies, ascending: 2 branches without
/// rotation, 3 for an XY-plane axis, 4 for a general axis. `out` needs
/// capacity 4.
///
/// # Safety
/// `axis` must point to 3 readable doubles, `out` to 4 writable doubles,
/// `out_len`, when non-null, to one writable usize.
#[no_mangle]
pub unsafe extern "C" fn rotcav_branch_energies(
    omega_c: f64,
    g: f64,
    axis: *const f64,
    omega: f64,
    n_atoms: usize,
    out: *mut f64,
    out_len: *mut usize,
) -> RotcavStatus {
    if axis.is_null() || out.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    let axis = &*(axis as *const [f64; 3]);
    let inner = || -> Result<Vec<f64>, RotcavError> {
        let cavity = CavitySpec::new(omega_c, g)?;
        let rot = rotation(axis, omega)?;
        let _ = EnsembleSpec::new(n_atoms)?;
        let p = if rot.is_zero() {
            spectrum_nonrotating(&cavity, n_atoms)
        } else if rot.is_planar() {
            spectrum_xy(&cavity, &rot, n_atoms)
        } else {
            spectrum_general(&cavity, &rot, n_atoms)
        };
        Ok(p.branch_energies)
    };
    match inner() {
        Ok(values) => {
            std::ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
            if !out_len.is_null() {
                *out_len = values.len();
            }
            RotcavStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Opaque Hermitian arrowhead matrix.
pub struct RotcavArrowhead {
    inner: ArrowheadMatrix,
}

/// Build an arrowhead matrix from its head entry, shaft diagonal and
/// (complex) coupling row. Returns null on invalid input.
///
/// # Safety
/// `shaft` and `couplings_re` must each point to `n` readable doubles;
/// `couplings_im` may be null for a real coupling row.
#[no_mangle]
pub unsafe extern "C" fn rotcav_arrowhead_new(
    head: f64,
    shaft: *const f64,
    couplings_re: *const f64,
    couplings_im: *const f64,
    n: usize,
) -> *mut RotcavArrowhead {
    let (Some(shaft), Some(re)) = (slice_arg(shaft, n), slice_arg(couplings_re, n)) else {
        set_error("null pointer argument");
        return std::ptr::null_mut();
    };
    let im = if couplings_im.is_null() {
        vec![0.0; n]
    } else {
        std::slice::from_raw_parts(couplings_im, n).to_vec()
    };
    let couplings = re
        .iter()
        .zip(im.iter())
        .map(|(r, i)| num_complex::Complex64::new(*r, *i))
        .collect();
    match ArrowheadMatrix::new(head, shaft.to_vec(), couplings) {
        Ok(inner) => Box::into_raw(Box::new(RotcavArrowhead { inner })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `handle` must come from `rotcav_arrowhead_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotcav_arrowhead_free(handle: *mut RotcavArrowhead) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live arrowhead handle.
#[no_mangle]
pub unsafe extern "C" fn rotcav_arrowhead_dim(handle: *const RotcavArrowhead) -> usize {
    if handle.is_null() {
        return 0;
    }
    (*handle).inner.dim()
}

/// All eigenvalues, ascending, into `out` (capacity >= dim).
///
/// # Safety
/// `handle` must be a live arrowhead handle and `out` must point to
/// `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rotcav_arrowhead_eigenvalues(
    handle: *const RotcavArrowhead,
    out: *mut f64,
    capacity: usize,
) -> RotcavStatus {
    if handle.is_null() || out.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    let a = &(*handle).inner;
    if capacity < a.dim() {
        set_error(&format!("need capacity {}, got {capacity}", a.dim()));
        return RotcavStatus::BufferTooSmall;
    }
    match eigensolve_arrowhead(a, false) {
        Ok(sol) => {
            std::ptr::copy_nonoverlapping(sol.eigenvalues.as_ptr(), out, sol.eigenvalues.len());
            RotcavStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Secular function f(e) = (e - head) - sum |w_k|^2/(e - d_k).
///
/// # Safety
/// `handle` must be a live arrowhead handle and `out` must point to one
/// writable double.
#[no_mangle]
pub unsafe extern "C" fn rotcav_arrowhead_secular(
    handle: *const RotcavArrowhead,
    e: f64,
    out: *mut f64,
) -> RotcavStatus {
    if handle.is_null() || out.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    match secular_function(&(*handle).inner, e) {
        Ok(v) => {
            *out = v;
            RotcavStatus::Ok
        }
        Err(err) => fail(&err),
    }
}

/// Potential curve parameters: kind 0 = harmonic (p0 = k, p1 = r0,
/// p2 = offset), kind 1 = Morse (p0 = depth, p1 = a, p2 = r0, p3 = offset).
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RotcavCurve {
    pub kind: u32,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

fn curve_from(c: &RotcavCurve) -> Result<PotentialCurve, RotcavError> {
    match c.kind {
        0 => Ok(PotentialCurve::Harmonic { k: c.p0, r0: c.p1, offset: c.p2 }),
        1 => Ok(PotentialCurve::Morse { d: c.p0, a: c.p1, r0: c.p2, offset: c.p3 }),
        k => Err(RotcavError::InvalidInput(format!("unknown curve kind {k}"))),
    }
}

/// Opaque diatomic Sigma-Pi model.
pub struct RotcavDiatomic {
    inner: DiatomicModel,
}

/// Build a diatomic model with analytic potential curves and a constant
/// transition dipole. Returns null on invalid input.
///
/// # Safety
/// `v_sigma` and `v_pi` must point to readable `RotcavCurve` values.
#[no_mangle]
pub unsafe extern "C" fn rotcav_diatomic_new(
    v_sigma: *const RotcavCurve,
    v_pi: *const RotcavCurve,
    dipole: f64,
    g0: f64,
    omega_c: f64,
    reduced_mass: f64,
    r_min: f64,
    r_max: f64,
) -> *mut RotcavDiatomic {
    if v_sigma.is_null() || v_pi.is_null() {
        set_error("null pointer argument");
        return std::ptr::null_mut();
    }
    let build = || -> Result<DiatomicModel, RotcavError> {
        DiatomicModel::new(
            curve_from(&*v_sigma)?,
            curve_from(&*v_pi)?,
            TransitionDipole::Constant(dipole),
            g0,
            CavitySpec::new(omega_c, 0.0)?,
            reduced_mass,
            r_min,
            r_max,
        )
    };
    match build() {
        Ok(model) => Box::into_raw(Box::new(RotcavDiatomic { inner: model })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `handle` must come from `rotcav_diatomic_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rotcav_diatomic_free(handle: *mut RotcavDiatomic) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// The three adiabatic surface energies at (r, theta, phi), ascending.
///
/// # Safety
/// `handle` must be a live diatomic handle; `axis` must point to 3
/// readable doubles; `out` to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rotcav_adiabatic_energies(
    handle: *const RotcavDiatomic,
    axis: *const f64,
    omega: f64,
    r: f64,
    theta: f64,
    phi: f64,
    out: *mut f64,
) -> RotcavStatus {
    if handle.is_null() || axis.is_null() || out.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    let axis = &*(axis as *const [f64; 3]);
    let compute = || -> Result<[f64; 3], RotcavError> {
        let rot = rotation(axis, omega)?;
        adiabatic_energies(&(*handle).inner, &rot, r, theta, phi)
    };
    match compute() {
        Ok(e) => {
            std::ptr::copy_nonoverlapping(e.as_ptr(), out, 3);
            RotcavStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// One located light-induced conical intersection.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RotcavLiciPoint {
    pub r: f64,
    /// Exactly 0 or pi.
    pub theta: f64,
    /// +1 for the +Omega_z shift branch, -1 for the -Omega_z branch.
    pub branch: i32,
    pub gap: f64,
    pub seam_max_gap: f64,
}

/// Locate the LICIs of a model inside [r_lo, r_hi] and write up to
/// `capacity` points. `out_len` receives the total count found;
/// BufferTooSmall is returned when it exceeds `capacity`.
///
/// # Safety
/// `handle` must be a live diatomic handle; `axis` must point to 3
/// readable doubles; `out` to `capacity` writable points; `out_len` to one
/// writable usize.
#[no_mangle]
pub unsafe extern "C" fn rotcav_find_licis(
    handle: *const RotcavDiatomic,
    axis: *const f64,
    omega: f64,
    r_lo: f64,
    r_hi: f64,
    out: *mut RotcavLiciPoint,
    capacity: usize,
    out_len: *mut usize,
) -> RotcavStatus {
    if handle.is_null() || axis.is_null() || out.is_null() || out_len.is_null() {
        set_error("null pointer argument");
        return RotcavStatus::NullPointer;
    }
    let axis = &*(axis as *const [f64; 3]);
    let rot = match rotation(axis, omega) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    match find_licis(&(*handle).inner, &rot, (r_lo, r_hi), &LiciOptions::default()) {
        Ok(res) => {
            *out_len = res.points.len();
            if res.points.len() > capacity {
                set_error(&format!("need capacity {}, got {capacity}", res.points.len()));
                return RotcavStatus::BufferTooSmall;
            }
            for (i, (p, s)) in res.points.iter().enumerate() {
                *out.add(i) = RotcavLiciPoint {
                    r: p.r,
                    theta: p.theta,
                    branch: match p.branch {
                        ShiftBranch::Plus => 1,
                        ShiftBranch::Minus => -1,
                    },
                    gap: p.gap,
                    seam_max_gap: s.max_gap,
                };
            }
            RotcavStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_is_a_c_string() {
        let ptr = rotcav_version();
        let s = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
        assert_eq!(s, env!("CARGO_PKG_VERSION"));
    }
}
