#ifndef ROTCAV_H
#define ROTCAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every C-ABI call.
 */
typedef enum {
  ROTCAV_STATUS_OK = 0,
  ROTCAV_STATUS_NULL_POINTER = 1,
  ROTCAV_STATUS_INVALID_ARGUMENT = 2,
  ROTCAV_STATUS_NUMERIC_FAILURE = 3,
  ROTCAV_STATUS_BUFFER_TOO_SMALL = 4,
  ROTCAV_STATUS_NO_CROSSING = 5,
} RotcavStatus;

/**
 * Opaque Hermitian arrowhead matrix.
 */
typedef struct RotcavArrowhead RotcavArrowhead;

/**
 * Opaque diatomic Sigma-Pi model.
 */
typedef struct RotcavDiatomic RotcavDiatomic;

/**
 * Potential curve parameters: kind 0 = harmonic (p0 = k, p1 = r0,
 * p2 = offset), kind 1 = Morse (p0 = depth, p1 = a, p2 = r0, p3 = offset).
 */
typedef struct {
  uint32_t kind;
  double p0;
  double p1;
  double p2;
  double p3;
} RotcavCurve;

/**
 * One located light-induced conical intersection.
 */
typedef struct {
  double r;
  /**
   * Exactly 0 or pi.
   */
  double theta;
  /**
   * +1 for the +Omega_z shift branch, -1 for the -Omega_z branch.
   */
  int32_t branch;
  double gap;
  double seam_max_gap;
} RotcavLiciPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *rotcav_last_error_message(void);

/**
 * Static crate version string.
 */
const char *rotcav_version(void);

/**
 * Number of single-excitation states of the N-atom ensemble Hamiltonian
 * for the given rotation axis: N+1 without rotation, 2N+1 for an axis in
 * the XY plane, 3N+1 otherwise. Returns 0 on invalid input.
 *
 * # Safety
 * `axis` must point to 3 readable doubles.
 */
size_t rotcav_ensemble_dim(const double *axis, double omega, size_t n_atoms);

/**
 * All eigenvalues of the N-atom ensemble Hamiltonian, ascending, written
 * to `out` (capacity from `rotcav_ensemble_dim`).
 *
 * # Safety
 * `axis` must point to 3 readable doubles; `out` to `capacity` writable
 * doubles; `out_len`, when non-null, to one writable usize.
 */
RotcavStatus rotcav_ensemble_spectrum(double omega_c,
                                      double g,
                                      const double *axis,
                                      double omega,
                                      size_t n_atoms,
                                      double *out,
                                      size_t capacity,
                                      size_t *out_len);

/**
 * Closed-form polariton branch energies, ascending: 2 branches without
 * rotation, 3 for an XY-plane axis, 4 for a general axis. `out` needs
 * capacity 4.
 *
 * # Safety
 * `axis` must point to 3 readable doubles, `out` to 4 writable doubles,
 * `out_len`, when non-null, to one writable usize.
 */
RotcavStatus rotcav_branch_energies(double omega_c,
                                    double g,
                                    const double *axis,
                                    double omega,
                                    size_t n_atoms,
                                    double *out,
                                    size_t *out_len);

/**
 * Build an arrowhead matrix from its head entry, shaft diagonal and
 * (complex) coupling row. Returns null on invalid input.
 *
 * # Safety
 * `shaft` and `couplings_re` must each point to `n` readable doubles;
 * `couplings_im` may be null for a real coupling row.
 */
RotcavArrowhead *rotcav_arrowhead_new(double head,
                                      const double *shaft,
                                      const double *couplings_re,
                                      const double *couplings_im,
                                      size_t n);

/**
 * # Safety
 * `handle` must come from `rotcav_arrowhead_new` and not be freed twice.
 */
void rotcav_arrowhead_free(RotcavArrowhead *handle);

/**
 * # Safety
 * `handle` must be a live arrowhead handle.
 */
size_t rotcav_arrowhead_dim(const RotcavArrowhead *handle);

/**
 * All eigenvalues, ascending, into `out` (capacity >= dim).
 *
 * # Safety
 * `handle` must be a live arrowhead handle and `out` must point to
 * `capacity` writable doubles.
 */
RotcavStatus rotcav_arrowhead_eigenvalues(const RotcavArrowhead *handle,
                                          double *out,
                                          size_t capacity);

/**
 * Secular function f(e) = (e - head) - sum |w_k|^2/(e - d_k).
 *
 * # Safety
 * `handle` must be a live arrowhead handle and `out` must point to one
 * writable double.
 */
RotcavStatus rotcav_arrowhead_secular(const RotcavArrowhead *handle, double e, double *out);

/**
 * Build a diatomic model with analytic potential curves and a constant
 * transition dipole. Returns null on invalid input.
 *
 * # Safety
 * `v_sigma` and `v_pi` must point to readable `RotcavCurve` values.
 */
RotcavDiatomic *rotcav_diatomic_new(const RotcavCurve *v_sigma,
                                    const RotcavCurve *v_pi,
                                    double dipole,
                                    double g0,
                                    double omega_c,
                                    double reduced_mass,
                                    double r_min,
                                    double r_max);

/**
 * # Safety
 * `handle` must come from `rotcav_diatomic_new` and not be freed twice.
 */
void rotcav_diatomic_free(RotcavDiatomic *handle);

/**
 * The three adiabatic surface energies at (r, theta, phi), ascending.
 *
 * # Safety
 * `handle` must be a live diatomic handle; `axis` must point to 3
 * readable doubles; `out` to 3 writable doubles.
 */
RotcavStatus rotcav_adiabatic_energies(const RotcavDiatomic *handle,
                                       const double *axis,
                                       double omega,
                                       double r,
                                       double theta,
                                       double phi,
                                       double *out);

/**
 * Locate the LICIs of a model inside [r_lo, r_hi] and write up to
 * `capacity` points. `out_len` receives the total count found;
 * BufferTooSmall is returned when it exceeds `capacity`.
 *
 * # Safety
 * `handle` must be a live diatomic handle; `axis` must point to 3
 * readable doubles; `out` to `capacity` writable points; `out_len` to one
 * writable usize.
 */
RotcavStatus rotcav_find_licis(const RotcavDiatomic *handle,
                               const double *axis,
                               double omega,
                               double r_lo,
                               double r_hi,
                               RotcavLiciPoint *out,
                               size_t capacity,
                               size_t *out_len);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ROTCAV_H */
