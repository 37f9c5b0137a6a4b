/* SPDX-License-Identifier: Apache-2.0 */
#ifndef WGSTOKES_H
#define WGSTOKES_H

/* Public C surface of the Stokes convergence-study library.
 *
 * Usage: fill a wgs_options with wgs_options_init, run a study with
 * wgs_study_run, read rows or write tables from the returned handle, destroy
 * it. All functions returning wgs_status leave a human-readable message for
 * the calling thread in wgs_last_error() on failure. Handles are opaque and
 * single-threaded; distinct handles are independent.
 */

#include <stdint.h>
#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define WGS_API __declspec(dllexport)
#else
#define WGS_API __attribute__((visibility("default")))
#endif

typedef enum wgs_status {
  WGS_OK = 0,
  WGS_ERR_CONFIG = 1,    /* rejected option combination */
  WGS_ERR_STRUCTURE = 2, /* mesh/DOF-map invariant violated */
  WGS_ERR_NUMERIC = 3,   /* numerical breakdown during setup */
  WGS_ERR_SOLVER = 4,    /* linear solve failed or stagnated */
  WGS_ERR_IO = 5,        /* filesystem failure */
  WGS_ERR_INVALID = 6,   /* null handle or out-of-range argument */
  WGS_ERR_INTERNAL = 7   /* unexpected exception; see wgs_last_error */
} wgs_status;

/* An opaque finished convergence study: the options it was run with plus one
 * row of error norms per refinement level. */
typedef struct wgs_study wgs_study;

typedef struct wgs_options {
  const char* family;  /* "hdiv" (default) or "taylor-hood" */
  int32_t example;     /* manufactured benchmark id: 1, 2 (2D) or 3 (3D) */
  int32_t degree;      /* velocity polynomial degree */
  int32_t level_min;   /* first refinement level, >= 1 */
  int32_t level_max;   /* last refinement level, <= 10 */
  double mu;           /* viscosity, > 0 */
  int32_t quad_degree; /* assembly quadrature degree; < 0 = family default */
  int32_t error_quad_degree; /* error-integration degree; < 0 = default */
  const char* solver;  /* "direct" (default), "penalty", or "minres" */
  double boundary_own_weight;  /* boundary-face trace weight in the matrix */
  double boundary_data_weight; /* boundary-face data weight in the lifting */
} wgs_options;

/* One refinement level. Rates compare with the previous level and are NaN on
 * the first row of a study. */
typedef struct wgs_row {
  int32_t level;
  double h;
  int64_t dofs;
  double velocity_l2;
  double velocity_rate;
  double energy; /* weak-gradient (resp. gradient) error norm */
  double energy_rate;
  double pressure_l2;
  double pressure_rate;
  double divergence_sup;
  double multiplier; /* mean-constraint multiplier, ~0 at a solution */
  char solver_method[24];
  int32_t solver_iterations;
  double solver_relative_residual;
} wgs_row;

/* Library version as "major.minor.patch". */
WGS_API const char* wgs_version(void);

/* Message describing this thread's most recent failure; never NULL. Valid
 * until the next failing call on the same thread. */
WGS_API const char* wgs_last_error(void);

/* Fill defaults: hdiv example 1, degree 1, levels 2..5, mu 1, automatic
 * quadrature, direct solver, consistent boundary treatment (0, 1). */
WGS_API void wgs_options_init(wgs_options* options);

/* Run the convergence study described by `options`; on success *out_study
 * owns the results. Fails with WGS_ERR_CONFIG on invalid combinations. */
WGS_API wgs_status wgs_study_run(const wgs_options* options, wgs_study** out_study);

WGS_API void wgs_study_destroy(wgs_study* study);

/* Number of rows (levels) in the study; 0 on a NULL handle. */
WGS_API int64_t wgs_study_num_rows(const wgs_study* study);

/* Copy row `index` (0-based) into *out_row. */
WGS_API wgs_status wgs_study_row(const wgs_study* study, int64_t index, wgs_row* out_row);

/* Render the study as a table. `format` is "markdown" or "csv". Writes at
 * most `capacity` bytes including the terminator into `buffer` and stores the
 * full untruncated length (excluding the terminator) in *out_length; call
 * with capacity 0 to size a buffer. Truncation is not an error: check
 * *out_length >= capacity. */
WGS_API wgs_status wgs_study_format(const wgs_study* study, const char* format,
                                    char* buffer, size_t capacity, size_t* out_length);

/* Write table.md and table.csv under `out_dir`, creating it if needed. */
WGS_API wgs_status wgs_study_write_tables(const wgs_study* study, const char* out_dir);

/* Re-solve one level of the study and write each solution component sampled
 * on a uniform lattice to `out_dir`: field_u1.dat, field_u2.dat (plus
 * field_u3.dat in 3D) and field_p.dat, each a plain-text "x y (z) value"
 * table suitable for surface plotting. */
WGS_API wgs_status wgs_study_export_fields(const wgs_study* study, int32_t level,
                                           const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* WGSTOKES_H */
