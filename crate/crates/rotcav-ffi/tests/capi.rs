//! Exercises the C ABI exactly as a foreign binding would: raw pointers,
//! explicit capacities, status codes and the thread-local error message.

use std::ffi::CStr;

use rotcav_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rotcav_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn ensemble_spectrum_round_trip() {
    let axis = [0.0f64, 1.0, 0.0];
    let n_atoms = 4usize;
    let dim = unsafe { rotcav_ensemble_dim(axis.as_ptr(), 0.3, n_atoms) };
    assert_eq!(dim, 9); // 2N+1 for a planar axis
    let mut out = vec![0.0f64; dim];
    let mut len = 0usize;
    let status = unsafe {
        rotcav_ensemble_spectrum(1.0, 0.05, axis.as_ptr(), 0.3, n_atoms, out.as_mut_ptr(), dim, &mut len)
    };
    assert_eq!(status, RotcavStatus::Ok);
    assert_eq!(len, 9);
    let split = 0.1f64.sqrt();
    assert!((out[0] - (1.0 - split)).abs() < 1e-12);
    assert!((out[8] - (1.0 + split)).abs() < 1e-12);
    // capacity too small reports BufferTooSmall and an error message
    let status = unsafe {
        rotcav_ensemble_spectrum(1.0, 0.05, axis.as_ptr(), 0.3, n_atoms, out.as_mut_ptr(), 3, &mut len)
    };
    assert_eq!(status, RotcavStatus::BufferTooSmall);
    assert!(last_error().contains("capacity"));
}

#[test]
fn branch_energies_cover_all_three_cases() {
    let mut out = [0.0f64; 4];
    let mut len = 0usize;
    let z = [0.0f64, 0.0, 1.0];
    // no rotation: two branches omega_c +- sqrt(N) g
    let status = unsafe {
        rotcav_branch_energies(1.0, 0.1, z.as_ptr(), 0.0, 4, out.as_mut_ptr(), &mut len)
    };
    assert_eq!(status, RotcavStatus::Ok);
    assert_eq!(len, 2);
    assert!((out[0] - 0.8).abs() < 1e-14 && (out[1] - 1.2).abs() < 1e-14);
    // planar: three branches
    let y = [0.0f64, 1.0, 0.0];
    let status = unsafe {
        rotcav_branch_energies(1.0, 0.05, y.as_ptr(), 0.3, 4, out.as_mut_ptr(), &mut len)
    };
    assert_eq!(status, RotcavStatus::Ok);
    assert_eq!(len, 3);
    // general: four branches
    let tilted = [0.3f64, 0.0, 0.4];
    let status = unsafe {
        rotcav_branch_energies(1.0, 0.2, tilted.as_ptr(), 0.5, 1, out.as_mut_ptr(), &mut len)
    };
    assert_eq!(status, RotcavStatus::Ok);
    assert_eq!(len, 4);
    assert!((out[0] - (1.0 - 0.515688)).abs() < 1e-6);
    assert!((out[3] - (1.0 + 0.515688)).abs() < 1e-6);
}

#[test]
fn arrowhead_handle_lifecycle() {
    let shaft = [1.3f64, 0.7, 1.3, 0.7];
    let g = 0.05 / 2.0f64.sqrt();
    let re = [g, g, g, g];
    let handle = unsafe {
        rotcav_arrowhead_new(1.0, shaft.as_ptr(), re.as_ptr(), std::ptr::null(), 4)
    };
    assert!(!handle.is_null());
    assert_eq!(unsafe { rotcav_arrowhead_dim(handle) }, 5);
    let mut vals = [0.0f64; 5];
    let status = unsafe { rotcav_arrowhead_eigenvalues(handle, vals.as_mut_ptr(), 5) };
    assert_eq!(status, RotcavStatus::Ok);
    let split = (0.09f64 + 2.0 * 0.0025).sqrt();
    assert!((vals[0] - (1.0 - split)).abs() < 1e-12);
    // secular function: zero at the middle polariton energy
    let mut f = f64::NAN;
    let status = unsafe { rotcav_arrowhead_secular(handle, 1.0, &mut f) };
    assert_eq!(status, RotcavStatus::Ok);
    assert!(f.abs() < 1e-13);
    // pole evaluation is reported as a numeric failure
    let status = unsafe { rotcav_arrowhead_secular(handle, 1.3, &mut f) };
    assert_eq!(status, RotcavStatus::NumericFailure);
    unsafe { rotcav_arrowhead_free(handle) };
    // null-safety of the accessors
    assert_eq!(unsafe { rotcav_arrowhead_dim(std::ptr::null()) }, 0);
    let status =
        unsafe { rotcav_arrowhead_eigenvalues(std::ptr::null(), vals.as_mut_ptr(), 5) };
    assert_eq!(status, RotcavStatus::NullPointer);
}

#[test]
fn diatomic_lici_doubling_through_the_c_surface() {
    let v_sigma = RotcavCurve { kind: 0, p0: 1.0, p1: 2.0, p2: 0.0, p3: 0.0 };
    let v_pi = RotcavCurve { kind: 0, p0: 0.0, p1: 0.0, p2: 0.5, p3: 0.0 };
    let model = unsafe {
        rotcav_diatomic_new(&v_sigma, &v_pi, 1.0, 0.04, 0.3, 100.0, 0.2, 4.5)
    };
    assert!(!model.is_null());
    let z = [0.0f64, 0.0, 1.0];

    // adiabatic energies at theta = 0 are the bare diagonal
    let mut e = [0.0f64; 3];
    let status =
        unsafe { rotcav_adiabatic_energies(model, z.as_ptr(), 0.1, 2.0, 0.0, 0.0, e.as_mut_ptr()) };
    assert_eq!(status, RotcavStatus::Ok);
    assert!((e[0] - 0.3).abs() < 1e-14); // V_Sigma(2) + omega_c

    let mut points = vec![
        RotcavLiciPoint { r: 0.0, theta: 0.0, branch: 0, gap: 0.0, seam_max_gap: 0.0 };
        16
    ];
    let mut len = 0usize;
    let status = unsafe {
        rotcav_find_licis(model, z.as_ptr(), 0.1, 0.5, 4.0, points.as_mut_ptr(), 16, &mut len)
    };
    assert_eq!(status, RotcavStatus::Ok);
    assert_eq!(len, 8); // 4 radii x theta in {0, pi}
    let mut radii: Vec<f64> = points[..len].iter().map(|p| p.r).collect();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    assert_eq!(radii.len(), 4);
    assert!((radii[0] - (2.0 - 0.6f64.sqrt())).abs() < 1e-8);
    for p in &points[..len] {
        assert!(p.gap <= 1e-10 && p.seam_max_gap <= 1e-10);
        assert!(p.branch == 1 || p.branch == -1);
    }

    // a window with no crossing maps to the NoCrossing status
    let status = unsafe {
        rotcav_find_licis(model, z.as_ptr(), 0.1, 1.9, 2.1, points.as_mut_ptr(), 16, &mut len)
    };
    assert_eq!(status, RotcavStatus::NoCrossing);
    unsafe { rotcav_diatomic_free(model) };

    // invalid curve kind yields a null handle and a message
    let bad = RotcavCurve { kind: 7, p0: 0.0, p1: 0.0, p2: 0.0, p3: 0.0 };
    let handle = unsafe { rotcav_diatomic_new(&bad, &v_pi, 1.0, 0.0, 0.3, 100.0, 0.2, 4.5) };
    assert!(handle.is_null());
    assert!(last_error().contains("curve kind"));
}
