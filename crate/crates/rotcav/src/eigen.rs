//! Dense Hermitian eigensolver used as the reference oracle everywhere else.
//!
//! Complex Householder reduction to a real symmetric tridiagonal form,
//! followed by implicit-shift QL with optional eigenvector accumulation.
//! The contract is the residual bound, not the algorithm: orthonormal
//! columns within 1e-12 and ||H v - lambda v|| <= 1e-11 ||H|| per pair.

use num_complex::Complex64;

use crate::error::{Result, RotcavError};
use crate::hermitian::HermitianMatrix;

const HERMITICITY_RTOL: f64 = 1e-12;

/// All eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    dim: usize,
    /// Column-major: column k is the eigenvector of `eigenvalues[k]`.
    vectors: Vec<Complex64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvector(&self, k: usize) -> &[Complex64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }
}

struct Reflector {
    offset: usize,
    v: Vec<Complex64>,
}

/// Reduce the row-major Hermitian matrix `a` (n x n) in place to real
/// symmetric tridiagonal form. Returns (diagonal, subdiagonal, reflectors,
/// column phases); the subdiagonal is made real non-negative by a diagonal
/// phase similarity recorded in `phases`.
fn tridiagonalize(
    a: &mut [Complex64],
    n: usize,
    keep_reflectors: bool,
) -> (Vec<f64>, Vec<f64>, Vec<Reflector>, Vec<Complex64>) {
    let mut reflectors = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += a[i * n + k].norm_sqr();
        }
        let tail2 = xnorm2 - a[(k + 1) * n + k].norm_sqr();
        if xnorm2 == 0.0 || tail2 <= 0.0 {
            // Column already tridiagonal; nothing to reflect.
            continue;
        }
        let xnorm = xnorm2.sqrt();
        let alpha = a[(k + 1) * n + k];
        let phase = if alpha.norm() > 0.0 { alpha / alpha.norm() } else { Complex64::new(1.0, 0.0) };
        let beta = -phase * xnorm;

        // Householder vector v = (x - beta e1) / ||.||; no cancellation in
        // the norm since v0 = alpha + phase*xnorm has |v0| = |alpha| + xnorm.
        let mut v = vec![Complex64::new(0.0, 0.0); m];
        v[0] = alpha - beta;
        for i in 1..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        let vnorm = (2.0 * xnorm * (xnorm + alpha.norm())).sqrt();
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }

        // p = 2 A22 v
        let mut p = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + (k + 1)..(k + 1 + i) * n + n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (h, vj) in row.iter().zip(v.iter()) {
                acc += h * vj;
            }
            p[i] = 2.0 * acc;
        }
        // K = Re(v† p) (real for Hermitian A; forcing it keeps symmetry)
        let mut vp = Complex64::new(0.0, 0.0);
        for (vi, pi) in v.iter().zip(p.iter()) {
            vp += vi.conj() * pi;
        }
        let kappa = vp.re;
        // w = p - K v; A22 <- A22 - v w† - w v†
        let w: Vec<Complex64> = p.iter().zip(v.iter()).map(|(pi, vi)| pi - kappa * vi).collect();
        for i in 0..m {
            let vi = v[i];
            let wi = w[i];
            let row = &mut a[(k + 1 + i) * n + (k + 1)..(k + 1 + i) * n + n];
            for j in 0..m {
                row[j] -= vi * w[j].conj() + wi * v[j].conj();
            }
        }

        a[(k + 1) * n + k] = beta;
        a[k * n + k + 1] = beta.conj();
        for i in k + 2..n {
            a[i * n + k] = Complex64::new(0.0, 0.0);
            a[k * n + i] = Complex64::new(0.0, 0.0);
        }
        if keep_reflectors {
            reflectors.push(Reflector { offset: k + 1, v });
        }
    }

    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    for i in 0..n {
        d[i] = a[i * n + i].re;
    }
    for k in 0..n.saturating_sub(1) {
        let ec = a[(k + 1) * n + k];
        let mag = ec.norm();
        e[k] = mag;
        phases[k + 1] = if mag > 0.0 { phases[k] * (ec / mag) } else { phases[k] };
    }
    (d, e, reflectors, phases)
}

/// Implicit-shift QL on a real symmetric tridiagonal (d, e); e[i] couples
/// i and i+1. Optionally accumulates the real rotations into the complex
/// row-major matrix `z` (n x n).
fn tridiag_ql(
    d: &mut [f64],
    e: &mut [f64],
    mut z: Option<&mut [Complex64]>,
    max_total_iters: usize,
) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut total = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total += 1;
            if total > max_total_iters {
                return Err(RotcavError::ConvergenceFailure { max_iterations: max_total_iters });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut aborted_at = None;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    aborted_at = Some(i);
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for row in 0..n {
                        let zi1 = zm[row * n + i + 1];
                        let zi = zm[row * n + i];
                        zm[row * n + i + 1] = s * zi + c * zi1;
                        zm[row * n + i] = c * zi - s * zi1;
                    }
                }
            }
            if aborted_at.is_some_and(|i| i > l) {
                continue;
            }
            if aborted_at.is_none() {
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
    }
    Ok(())
}

fn check_hermitian(h: &HermitianMatrix) -> Result<()> {
    let scale = h.max_abs_entry();
    let tol = HERMITICITY_RTOL * scale.max(f64::MIN_POSITIVE);
    let defect = h.hermiticity_defect();
    if defect > tol && scale > 0.0 {
        return Err(RotcavError::NonHermitianInput { defect, tolerance: tol });
    }
    Ok(())
}

fn hermitian_eig(h: &HermitianMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Complex64>>)> {
    check_hermitian(h)?;
    let n = h.dim();
    let mut a = h.entries().to_vec();
    let (mut d, mut e, reflectors, phases) = tridiagonalize(&mut a, n, want_vectors);

    let mut q = if want_vectors {
        let mut q = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            q[i * n + i] = Complex64::new(1.0, 0.0);
        }
        // Q = P_0 P_1 ... P_last, applied in reverse onto the identity.
        for refl in reflectors.iter().rev() {
            let off = refl.offset;
            let m = refl.v.len();
            let mut s = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..m {
                let vc = refl.v[i].conj();
                let row = &q[(off + i) * n..(off + i) * n + n];
                for (sj, qj) in s.iter_mut().zip(row.iter()) {
                    *sj += vc * qj;
                }
            }
            for i in 0..m {
                let vi2 = 2.0 * refl.v[i];
                let row = &mut q[(off + i) * n..(off + i) * n + n];
                for (qj, sj) in row.iter_mut().zip(s.iter()) {
                    *qj -= vi2 * sj;
                }
            }
        }
        // Fold in the phase similarity that made the subdiagonal real.
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] *= phases[j];
            }
        }
        Some(q)
    } else {
        None
    };

    tridiag_ql(&mut d, &mut e, q.as_deref_mut(), 30 * n.max(2))?;

    // Ascending sort, stable in the original column order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap().then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let vectors = q.map(|q| {
        let mut cols = vec![Complex64::new(0.0, 0.0); n * n];
        for (k, &src) in order.iter().enumerate() {
            for i in 0..n {
                cols[k * n + i] = q[i * n + src];
            }
        }
        for k in 0..n {
            normalize_column(&mut cols[k * n..(k + 1) * n]);
        }
        cols
    });
    Ok((eigenvalues, vectors))
}

/// Fix the gauge of an eigenvector: unit norm with the first significant
/// component rotated to the positive real axis (deterministic output).
fn normalize_column(col: &mut [Complex64]) {
    let norm: f64 = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return;
    }
    let max_abs = col.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let pivot = col
        .iter()
        .find(|z| z.norm() > 1e-8 * max_abs)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in col.iter_mut() {
        *z *= phase / norm;
    }
}

/// All eigenpairs of `h`, eigenvalues ascending, orthonormal eigenvectors.
pub fn eigensolve_dense(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let (eigenvalues, vectors) = hermitian_eig(h, true)?;
    Ok(EigenDecomposition { eigenvalues, dim: h.dim(), vectors: vectors.unwrap() })
}

/// Eigenvalues only; skips the O(n^3) eigenvector accumulation.
pub fn eigenvalues_dense(h: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(h, false)?.0)
}

/// U = exp(-i h t), built from the eigendecomposition of `h`. Row-major.
pub fn matrix_exponential_unitary(h: &HermitianMatrix, t: f64) -> Result<Vec<Complex64>> {
    let dec = eigensolve_dense(h)?;
    let n = h.dim();
    let phases: Vec<Complex64> = dec
        .eigenvalues
        .iter()
        .map(|&lam| Complex64::from_polar(1.0, -lam * t))
        .collect();
    let mut u = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        let vk = dec.eigenvector(k);
        let ph = phases[k];
        for i in 0..n {
            let left = vk[i] * ph;
            if left.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                u[i * n + j] += left * vk[j].conj();
            }
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::BasisState;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn shaft_basis(n: usize) -> Vec<BasisState> {
        (0..n).map(|i| BasisState::Shaft { index: i }).collect()
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
        let mut m = HermitianMatrix::zeros(shaft_basis(n)).unwrap();
        for i in 0..n {
            m.set_diag(i, rng.gen_range(-1.0..1.0));
            for j in i + 1..n {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m.set_pair(i, j, v);
            }
        }
        m
    }

    fn residual(h: &HermitianMatrix, dec: &EigenDecomposition) -> f64 {
        let n = h.dim();
        let mut worst = 0.0f64;
        let mut hv = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let v = dec.eigenvector(k);
            h.apply(v, &mut hv);
            let r: f64 = hv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - dec.eigenvalues[k] * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    fn orthonormality_defect(dec: &EigenDecomposition) -> f64 {
        let n = dec.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let dot: Complex64 = dec
                    .eigenvector(a)
                    .iter()
                    .zip(dec.eigenvector(b).iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    #[test]
    fn reduction_reconstructs_input() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(n, &mut rng);
        let a0 = h.entries().to_vec();
        let mut a = a0.clone();
        let (d, e, reflectors, phases) = tridiagonalize(&mut a, n, true);
        // accumulate Q as in hermitian_eig
        let mut q = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            q[i * n + i] = Complex64::new(1.0, 0.0);
        }
        for refl in reflectors.iter().rev() {
            let off = refl.offset;
            let m = refl.v.len();
            let mut s = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..m {
                let vc = refl.v[i].conj();
                let row = &q[(off + i) * n..(off + i) * n + n];
                for (sj, qj) in s.iter_mut().zip(row.iter()) {
                    *sj += vc * qj;
                }
            }
            for i in 0..m {
                let vi2 = 2.0 * refl.v[i];
                let row = &mut q[(off + i) * n..(off + i) * n + n];
                for (qj, sj) in row.iter_mut().zip(s.iter()) {
                    *qj -= vi2 * sj;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] *= phases[j];
            }
        }
        // rebuild Q T Q†
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            t[i * n + i] = Complex64::new(d[i], 0.0);
        }
        for i in 0..n - 1 {
            t[i * n + i + 1] = Complex64::new(e[i], 0.0);
            t[(i + 1) * n + i] = Complex64::new(e[i], 0.0);
        }
        let mut qt = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let f = q[i * n + k];
                for j in 0..n {
                    qt[i * n + j] += f * t[k * n + j];
                }
            }
        }
        let mut qtq = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let f = qt[i * n + k];
                for j in 0..n {
                    qtq[i * n + j] += f * q[j * n + k].conj();
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..n * n {
            worst = worst.max((qtq[i] - a0[i]).norm());
        }
        assert!(worst < 1e-12, "defect {worst}");
    }

    #[test]
    fn diagonal_matrix_is_solved_exactly() {
        let mut m = HermitianMatrix::zeros(shaft_basis(3)).unwrap();
        m.set_diag(0, 1.0);
        m.set_diag(1, 2.0);
        m.set_diag(2, 3.0);
        let dec = eigensolve_dense(&m).unwrap();
        assert_eq!(dec.eigenvalues, vec![1.0, 2.0, 3.0]);
        for k in 0..3 {
            let v = dec.eigenvector(k);
            assert!((v[k].re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_level_rabi_splitting() {
        // [[omega, g], [g, omega]] -> omega -/+ g
        let mut m = HermitianMatrix::zeros(shaft_basis(2)).unwrap();
        m.set_diag(0, 1.0);
        m.set_diag(1, 1.0);
        m.set_pair(0, 1, Complex64::new(0.1, 0.0));
        let dec = eigensolve_dense(&m).unwrap();
        assert!((dec.eigenvalues[0] - 0.9).abs() < 1e-14);
        assert!((dec.eigenvalues[1] - 1.1).abs() < 1e-14);
    }

    #[test]
    fn random_matrices_meet_the_residual_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1usize, 2, 3, 5, 8, 16, 40] {
            let h = random_hermitian(n, &mut rng);
            let dec = eigensolve_dense(&h).unwrap();
            let hnorm = dec.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
            assert!(residual(&h, &dec) <= 1e-11 * hnorm.max(1.0), "n = {n}");
            assert!(orthonormality_defect(&dec) <= 1e-12, "n = {n}");
            // ascending order
            for w in dec.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let h = random_hermitian(12, &mut rng);
            let vals = eigenvalues_dense(&h).unwrap();
            let sum: f64 = vals.iter().sum();
            let bound = 1e-11 * 12.0 * h.max_abs_entry();
            assert!((sum - h.trace()).abs() <= bound);
        }
    }

    #[test]
    fn eigenvalues_invariant_under_unitary_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = random_hermitian(6, &mut rng);
        // Build a unitary from the exponential of another random Hermitian.
        let g = random_hermitian(6, &mut rng);
        let u = matrix_exponential_unitary(&g, 0.83).unwrap();
        let h2 = h.conjugated_by(&u).unwrap();
        let v1 = eigenvalues_dense(&h).unwrap();
        let v2 = eigenvalues_dense(&h2).unwrap();
        let scale = h.max_abs_entry();
        for (a, b) in v1.iter().zip(v2.iter()) {
            assert!((a - b).abs() <= 1e-11 * scale.max(1.0));
        }
    }

    #[test]
    fn values_only_path_agrees_with_full_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = random_hermitian(20, &mut rng);
        let a = eigenvalues_dense(&h).unwrap();
        let b = eigensolve_dense(&h).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let mut m = HermitianMatrix::zeros(shaft_basis(2)).unwrap();
        m.set_pair(0, 1, Complex64::new(0.5, 0.0));
        // break the mirror by poking raw storage through from_entries
        let mut entries = m.entries().to_vec();
        entries[1] = Complex64::new(0.5, 0.3);
        entries[2] = Complex64::new(0.5, 0.3); // not conjugates
        let bad = HermitianMatrix::from_entries(entries, m.basis().to_vec()).unwrap();
        assert!(matches!(
            eigensolve_dense(&bad),
            Err(RotcavError::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let m = HermitianMatrix::zeros(shaft_basis(3)).unwrap();
        let u = matrix_exponential_unitary(&m, 2.7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((u[i * 3 + j] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn exponential_of_diagonal() {
        let mut m = HermitianMatrix::zeros(shaft_basis(2)).unwrap();
        m.set_diag(0, 1.0);
        m.set_diag(1, 2.0);
        let u = matrix_exponential_unitary(&m, std::f64::consts::PI).unwrap();
        assert!((u[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!((u[3] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!(u[1].norm() < 1e-15 && u[2].norm() < 1e-15);
    }

    #[test]
    fn exponential_is_unitary_and_composes_in_time() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = random_hermitian(4, &mut rng);
        let u = matrix_exponential_unitary(&h, 0.7).unwrap();
        // U† U = I
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += u[k * n + i].conj() * u[k * n + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expect).norm() < 1e-12);
            }
        }
        // exp(-iH(t1+t2)) = exp(-iHt1) exp(-iHt2)
        let (t1, t2) = (0.31, 0.46);
        let u1 = matrix_exponential_unitary(&h, t1).unwrap();
        let u2 = matrix_exponential_unitary(&h, t2).unwrap();
        let u12 = matrix_exponential_unitary(&h, t1 + t2).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += u1[i * n + k] * u2[k * n + j];
                }
                assert!((acc - u12[i * n + j]).norm() < 1e-11);
            }
        }
    }
}
