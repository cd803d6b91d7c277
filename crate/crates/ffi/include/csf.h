#ifndef CSF_H
#define CSF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsfStatus {
  CSF_STATUS_OK = 0,
  CSF_STATUS_NULL_POINTER = 1,
  CSF_STATUS_INVALID_ARGUMENT = 2,
  CSF_STATUS_INVALID_CURVE = 3,
  CSF_STATUS_CONSTRUCTION = 4,
  CSF_STATUS_NUMERICAL = 5,
  CSF_STATUS_PARSE = 6,
  CSF_STATUS_IO = 7,
  CSF_STATUS_BUFFER_TOO_SMALL = 8,
  CSF_STATUS_PANIC = 9,
} CsfStatus;

typedef enum CsfSoliton {
  CSF_SOLITON_REAPER = 0,
  CSF_SOLITON_OVAL = 1,
} CsfSoliton;

typedef struct CsfCurve CsfCurve;

typedef struct CsfRun CsfRun;

typedef struct CsfScenario CsfScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful one. Valid until the next call on the same thread.
 */
const char *csf_last_error_message(void);

/**
 * Builds a curve from `n` packed `x y z` triples at `xyz`. Open curves get
 * free ends.
 */
enum CsfStatus csf_curve_new(const double *xyz, size_t n, bool closed, struct CsfCurve **out);

void csf_curve_free(struct CsfCurve *curve);

enum CsfStatus csf_curve_vertex_count(const struct CsfCurve *curve, size_t *out);

/**
 * Copies the vertices as packed triples into `buf`, which holds `cap`
 * doubles. Fails with `CSF_STATUS_BUFFER_TOO_SMALL` if `cap < 3 n`.
 */
enum CsfStatus csf_curve_copy_vertices(const struct CsfCurve *curve, double *buf, size_t cap);

enum CsfStatus csf_curve_length(const struct CsfCurve *curve, double *out);

/**
 * Largest vertex distance from the least-squares plane.
 */
enum CsfStatus csf_curve_nonplanarity(const struct CsfCurve *curve, double *out);

enum CsfStatus csf_hausdorff_distance(const struct CsfCurve *a,
                                      const struct CsfCurve *b,
                                      double *out);

/**
 * Evolves a copy of `curve` from t = 0 to `t_end` and returns it as a new
 * handle. `resample_every = 0` disables remeshing.
 */
enum CsfStatus csf_curve_evolve(const struct CsfCurve *curve,
                                double t_end,
                                double h,
                                double dt_max,
                                double c_cfl,
                                uint64_t resample_every,
                                struct CsfCurve **out);

/**
 * The assembled initial curve for parameter `r` with default construction
 * settings.
 */
enum CsfStatus csf_build_gamma(double r, struct CsfCurve **out);

/**
 * Relative normal-velocity residual of an exact solution sampled with `n`
 * vertices at time `t`. `half_width` is used only for the reaper.
 */
enum CsfStatus csf_soliton_residual(enum CsfSoliton kind,
                                    double half_width,
                                    double t,
                                    size_t n,
                                    double *out);

/**
 * Parses and validates a scenario config from NUL-terminated TOML text.
 */
enum CsfStatus csf_scenario_parse(const char *toml, struct CsfScenario **out);

enum CsfStatus csf_scenario_set_output_dir(struct CsfScenario *scenario, const char *dir);

void csf_scenario_free(struct CsfScenario *scenario);

/**
 * Runs the scenario, writing its artifacts to the output directory.
 * `resume` is NULL for a fresh run or the path of a checkpoint.
 */
enum CsfStatus csf_scenario_run(const struct CsfScenario *scenario,
                                const char *resume,
                                struct CsfRun **out);

void csf_run_free(struct CsfRun *run);

enum CsfStatus csf_run_all_pass(const struct CsfRun *run, bool *out);

/**
 * Copies the verdict text, NUL-terminated, into `buf` of `cap` bytes.
 * `needed` (optional) receives the size including the terminator, so a
 * first call with `cap = 0` sizes the buffer.
 */
enum CsfStatus csf_run_verdict_text(const struct CsfRun *run,
                                    char *buf,
                                    size_t cap,
                                    size_t *needed);

/**
 * The curve at the end of the run, as a new handle.
 */
enum CsfStatus csf_run_final_curve(const struct CsfRun *run, struct CsfCurve **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSF_H */
