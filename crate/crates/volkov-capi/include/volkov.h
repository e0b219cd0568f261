#ifndef VOLKOV_CAPI_H
#define VOLKOV_CAPI_H

/* Generated by cbindgen from the volkov-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define VK_OK 0

/**
 * A required pointer argument was null.
 */
#define VK_ERR_NULL_POINTER 1

/**
 * Input validation failed; see `vk_last_error`.
 */
#define VK_ERR_VALIDATION 2

/**
 * A numerical guard tripped; see `vk_last_error`.
 */
#define VK_ERR_NUMERICAL 3

/**
 * An internal panic was caught at the boundary.
 */
#define VK_ERR_PANIC 4

/**
 * Opaque handle holding one plane-wave mode table.
 */
typedef struct VkModeTable VkModeTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the library; static storage, do not free.
 */
const char *vk_version(void);

/**
 * Copy the calling thread's last error message (NUL-terminated) into `buf`.
 * Returns the number of bytes required including the terminator; when the
 * buffer is too small or null the message is left uncopied.
 *
 * # Safety
 * `buf` must point to at least `cap` writable bytes, or be null.
 */
uintptr_t vk_last_error(char *buf, uintptr_t cap);

/**
 * Evaluate the plane-wave Dirac wavefunction at one spacetime point.
 * Writes the four complex components into `out_re[0..4]`, `out_im[0..4]`.
 *
 * # Safety
 * `out_re` and `out_im` must each point to 4 writable doubles.
 */
int32_t vk_volkov_eval(double px,
                       double py,
                       double pz,
                       double amplitude,
                       double omega,
                       double mass,
                       double t,
                       double x,
                       double y,
                       double z,
                       double *out_re,
                       double *out_im);

/**
 * Finite-difference Dirac-equation residual of the wavefunction at one
 * point, with stencil step `h`.
 *
 * # Safety
 * `out` must point to one writable double.
 */
int32_t vk_dirac_residual(double px,
                          double py,
                          double pz,
                          double amplitude,
                          double omega,
                          double mass,
                          double t,
                          double x,
                          double y,
                          double z,
                          double h,
                          double *out);

/**
 * Build the plane-wave mode ladder of the state (adaptive truncation).
 * On success `*out` owns the handle; release it with `vk_mode_table_free`.
 *
 * # Safety
 * `out` must point to one writable pointer slot.
 */
int32_t vk_mode_table_new(double px,
                          double py,
                          double pz,
                          double amplitude,
                          double omega,
                          double mass,
                          VkModeTable **out);

/**
 * Number of ladder entries in the table.
 *
 * # Safety
 * `table` must be a live handle from `vk_mode_table_new`; `out` must point
 * to one writable size slot.
 */
int32_t vk_mode_table_len(const VkModeTable *table, uintptr_t *out);

/**
 * Read one ladder entry: index n, the shifted four-momentum
 * `out_q = (E, px, py, pz)` and the coefficient bispinor components.
 *
 * # Safety
 * `table` must be a live handle; `out_q`, `out_w_re`, `out_w_im` must each
 * point to 4 writable doubles and `out_n` to one writable int.
 */
int32_t vk_mode_table_entry(const VkModeTable *table,
                            uintptr_t index,
                            int32_t *out_n,
                            double *out_q,
                            double *out_w_re,
                            double *out_w_im);

/**
 * Electron/positron content of the table: the sign-of-energy fraction and
 * the energy-projector fraction.
 *
 * # Safety
 * `table` must be a live handle; the out-pointers must each point to one
 * writable double.
 */
int32_t vk_mode_table_fractions(const VkModeTable *table, double *out_sign, double *out_projector);

/**
 * Release a mode-table handle. Null is accepted and ignored.
 *
 * # Safety
 * `table` must be null or a handle from `vk_mode_table_new`, released at
 * most once.
 */
void vk_mode_table_free(VkModeTable *table);

/**
 * Sample the wave on a commensurate grid at time `t0`, split it with the
 * energy projectors and write the negative-frequency norm fraction.
 *
 * # Safety
 * `out_fraction` must point to one writable double.
 */
int32_t vk_separate_volkov(double px,
                           double py,
                           double pz,
                           double amplitude,
                           double omega,
                           double mass,
                           uint32_t samples_per_omega,
                           double t0,
                           double *out_fraction);

/**
 * Transfer-matrix scattering coefficients of a piecewise-constant barrier
 * at energy `e`: writes (T_lr, R_l, T_rl, R_r) into `out[0..4]`.
 *
 * # Safety
 * `heights` and `widths` must point to `nseg` readable doubles each; `out`
 * must point to 4 writable doubles.
 */
int32_t vk_barrier_coefficients(const double *heights,
                                const double *widths,
                                uintptr_t nseg,
                                double e,
                                double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VOLKOV_CAPI_H */
