#ifndef REGGE_FFI_H
#define REGGE_FFI_H

/* Generated by cbindgen from regge-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RG_OK 0

#define RG_ERR_VALIDATION 2

#define RG_ERR_NUMERICAL 3

#define RG_ERR_IO 4

#define RG_ERR_NULL 5

// Opaque S-matrix table handle.
typedef struct RgTable RgTable;

// One extracted Regge pole.
typedef struct RgPole {
  double re_position;
  double im_position;
  double re_residue;
  double im_residue;
  // 1 when classified significant.
  int32_t significant;
  // 1 when part of a Froissart doublet.
  int32_t spurious;
} RgPole;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty string when the
// last call succeeded. The pointer stays valid until the next failing call
// on the same thread.
const char *rg_last_error_message(void);

// Load a CSV S-matrix table from `path` into a fresh handle.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
int32_t rg_table_load_csv(const char *path, struct RgTable **out);

// Load a JSON S-matrix table from `path` into a fresh handle.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
int32_t rg_table_load_json(const char *path, struct RgTable **out);

// Release a table handle. Null is a no-op.
//
// # Safety
// `table` must be a handle from one of the loaders (or null), not yet freed.
void rg_table_free(struct RgTable *table);

// Largest tabulated J, or -1 on a null handle.
//
// # Safety
// `table` must be a live handle or null.
int64_t rg_table_jmax(const struct RgTable *table);

// Number of tabulated energies, or -1 on a null handle.
//
// # Safety
// `table` must be a live handle or null.
int64_t rg_table_n_energies(const struct RgTable *table);

// Regge poles of the table's `energy_index`-th energy. On success writes at
// most `capacity` poles into `out_poles` and the full count into
// `out_count`; the significant ones sort first, then by Re position.
//
// # Safety
// `table` must be a live handle; `out_poles` must point to `capacity`
// writable elements; `out_count` must be a valid pointer.
int32_t rg_poles_compute(const struct RgTable *table,
                         size_t energy_index,
                         double res_min,
                         double im_max,
                         struct RgPole *out_poles,
                         size_t capacity,
                         size_t *out_count);

// Direct partial-wave DCS at one energy over `n_theta` angles spanning
// [theta_min_deg, theta_max_deg]; writes `n_theta` sigma values.
//
// # Safety
// `table` must be a live handle; `out_sigma` must point to `n_theta`
// writable doubles.
int32_t rg_dcs_direct(const struct RgTable *table,
                      size_t energy_index,
                      double theta_min_deg,
                      double theta_max_deg,
                      size_t n_theta,
                      double *out_sigma);

// Fold-back DCS at one energy: unfold with defaults wide enough for
// `m_max`, then reassemble at `n_theta` angles spanning
// [theta_min_deg, theta_max_deg]. Angles within the endpoint band are
// evaluated through the endpoint series automatically.
//
// # Safety
// `table` must be a live handle; `out_sigma` must point to `n_theta`
// writable doubles.
int32_t rg_fold_dcs(const struct RgTable *table,
                    size_t energy_index,
                    int32_t m_max,
                    double theta_min_deg,
                    double theta_max_deg,
                    size_t n_theta,
                    double *out_sigma);

// Generate a built-in synthetic model by preset name and write its table
// (CSV) to `out_path`.
//
// # Safety
// `preset` and `out_path` must be valid NUL-terminated strings.
int32_t rg_synth_generate(const char *preset, const char *out_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGGE_FFI_H */
