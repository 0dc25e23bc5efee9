#ifndef CONTACT_GABOR_H
#define CONTACT_GABOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CgCertificate {
  CG_CERTIFICATE_FRAME_CERTIFIED = 0,
  CG_CERTIFICATE_UNKNOWN = 1,
  CG_CERTIFICATE_NOT_APPLICABLE = 2,
} CgCertificate;

typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_POINTER = 1,
  CG_STATUS_INVALID_INPUT = 2,
  CG_STATUS_SHAPE_MISMATCH = 3,
  CG_STATUS_METRIC_DEGENERATE = 4,
  CG_STATUS_CHART_EXIT = 5,
  CG_STATUS_MISSING_PARAMETER = 6,
  CG_STATUS_REEB_DEGENERATE = 7,
  CG_STATUS_FINITE_DIFFERENCE = 8,
  CG_STATUS_BUDGET_EXCEEDED = 9,
  CG_STATUS_WINDOW_DEGENERATE = 10,
  CG_STATUS_DEGENERATE_LATTICE = 11,
  CG_STATUS_ITERATION_LIMIT = 12,
  CG_STATUS_DEGENERATE_CONSTRAINT = 13,
  CG_STATUS_PANIC = 14,
} CgStatus;

typedef struct CgChart CgChart;

typedef struct CgSignal CgSignal;

typedef struct CgWindow CgWindow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated, truncated to `len`).
 * Returns the full message length without the terminator, or 0 if there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t cg_last_error_message(char *buf, size_t len);

/**
 * Flat torus with the given radii (one per dimension).
 *
 * # Safety
 * `radii` must point to `n` doubles; `out` must be a valid pointer.
 */
enum CgStatus cg_chart_flat_torus(const double *radii, size_t n, struct CgChart **out);

/**
 * Round 2-sphere in (polar, azimuth) coordinates.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CgStatus cg_chart_round_sphere(double radius, struct CgChart **out);

/**
 * Dimension of the chart, 0 for a null handle.
 *
 * # Safety
 * `chart` must be null or a live handle.
 */
size_t cg_chart_dim(const struct CgChart *chart);

/**
 * # Safety
 * `chart` must be null or a handle not yet freed.
 */
void cg_chart_free(struct CgChart *chart);

/**
 * Indicator of ⟨normal, b⟩ < offset.
 *
 * # Safety
 * `normal` must point to `n` doubles; `out` must be a valid pointer.
 */
enum CgStatus cg_signal_half_space(const double *normal,
                                   size_t n,
                                   double offset,
                                   struct CgSignal **out);

/**
 * Indicator of the geodesic ball of `radius` around `center`.
 *
 * # Safety
 * `chart` must be a live handle, `center` must point to `n` doubles, `out` must be valid.
 */
enum CgStatus cg_signal_ball(const struct CgChart *chart,
                             const double *center,
                             size_t n,
                             double radius,
                             struct CgSignal **out);

/**
 * Band of `width` around ⟨normal, θ⟩ ≡ level on the torus, or its complement.
 *
 * # Safety
 * `normal` must point to `n` doubles; `out` must be a valid pointer.
 */
enum CgStatus cg_signal_torus_band(const double *normal,
                                   size_t n,
                                   double level,
                                   double width,
                                   bool complement,
                                   struct CgSignal **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum CgStatus cg_signal_constant(double value, struct CgSignal **out);

/**
 * # Safety
 * `signal` must be a live handle, `b` must point to `n` doubles, `value` must be valid.
 */
enum CgStatus cg_signal_eval(const struct CgSignal *signal,
                             const double *b,
                             size_t n,
                             double *value);

/**
 * # Safety
 * `signal` must be null or a handle not yet freed.
 */
void cg_signal_free(struct CgSignal *signal);

/**
 * Window with A = a·Id in dimension n.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CgStatus cg_window_scalar(size_t n, double a, struct CgWindow **out);

/**
 * Window with a constant matrix A given row-major as n×n doubles.
 *
 * # Safety
 * `a` must point to `n*n` doubles; `out` must be a valid pointer.
 */
enum CgStatus cg_window_matrix(const double *a, size_t n, struct CgWindow **out);

/**
 * # Safety
 * `window` must be null or a handle not yet freed.
 */
void cg_window_free(struct CgWindow *window);

/**
 * Separable-lattice certificate: certified when 0 < b_i < 1 and b_i = ±c_i for all i
 * on an orthonormal separable frame.
 *
 * # Safety
 * `b` and `c` must each point to `n` doubles.
 */
enum CgCertificate cg_frame_certificate(const double *b,
                                        const double *c,
                                        size_t n,
                                        bool orthonormal_separable);

/**
 * Largest singular value ρ of the Fock embedding for the SPD matrix `a` (row-major n×n),
 * and whether ρ ≤ 1.
 *
 * # Safety
 * `a` must point to `n*n` doubles; `rho` and `embeds` must be valid pointers.
 */
enum CgStatus cg_embedding_check(const double *a, size_t n, double *rho, bool *embeds);

/**
 * Boundary normal of `signal` at base point `b`.
 *
 * Writes the g*-unit normal (one representative of ±p) to `normal_out` (n doubles),
 * the |O| contrast, and whether the contrast is below the no-boundary threshold.
 * `fiber_nodes = 0` keeps the default resolution.
 *
 * # Safety
 * Handles must be live; `b` and `normal_out` must point to `n` doubles; the remaining outputs must be valid.
 */
enum CgStatus cg_detect_boundary(const struct CgSignal *signal,
                                 const struct CgChart *chart,
                                 const struct CgWindow *window,
                                 const double *b,
                                 size_t n,
                                 size_t fiber_nodes,
                                 double *normal_out,
                                 double *contrast,
                                 bool *no_boundary);

/**
 * Frame bounds of the lattice with translation scale `alpha` and modulation scale `beta`
 * on a one-dimensional chart, at base coordinate `base` and truncation `k`.
 *
 * # Safety
 * Handles must be live; the outputs must be valid pointers.
 */
enum CgStatus cg_frame_bounds_1d(const struct CgChart *chart,
                                 const struct CgWindow *window,
                                 double base,
                                 double alpha,
                                 double beta,
                                 size_t k,
                                 double *lower,
                                 double *upper,
                                 enum CgCertificate *certificate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTACT_GABOR_H */
