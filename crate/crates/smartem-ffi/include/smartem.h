#ifndef SMARTEM_H
#define SMARTEM_H

/* Generated by cbindgen from smartem-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call in this ABI.
typedef enum SmartemStatus {
  SMARTEM_STATUS_OK = 0,
  SMARTEM_STATUS_NULL_ARGUMENT = 1,
  SMARTEM_STATUS_INVALID_UTF8 = 2,
  SMARTEM_STATUS_PARSE_ERROR = 3,
  SMARTEM_STATUS_VALIDATION_ERROR = 4,
  SMARTEM_STATUS_EVALUATION_ERROR = 5,
  SMARTEM_STATUS_INDEX_OUT_OF_RANGE = 6,
  SMARTEM_STATUS_INTERNAL_ERROR = 7,
} SmartemStatus;

// Coverage evaluation over a scenario's UE grid. Opaque.
typedef struct SmartemReport SmartemReport;

// Parsed, validated scenario. Opaque.
typedef struct SmartemScenario SmartemScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Description of the most recent failure on this thread, empty when no
// call has failed yet. The pointer stays valid until the next failing
// call on the same thread.
const char *smartem_last_error_message(void);

// Library version as a static nul-terminated string.
const char *smartem_version(void);

// Free-space path loss in dB.
//
// # Safety
// `out_db` must be a valid pointer to writable memory for one `double`.
enum SmartemStatus smartem_fspl_db(double distance_m, double frequency_hz, double *out_db);

// Parse a scenario from JSON and validate it. On success `*out` owns a new
// handle that must be released with `smartem_scenario_free`.
//
// # Safety
// `json` must point to a nul-terminated string; `out` must be a valid
// pointer to writable memory for one pointer.
enum SmartemStatus smartem_scenario_from_json(const char *json, struct SmartemScenario **out);

// Release a scenario handle. Accepts null.
//
// # Safety
// `scenario` must be null or a pointer returned by
// `smartem_scenario_from_json` that has not been freed yet.
void smartem_scenario_free(struct SmartemScenario *scenario);

// Number of placed nodes in the scenario.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_scenario_node_count(const struct SmartemScenario *scenario,
                                               uintptr_t *out);

// Number of UE grid points the scenario will evaluate.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_scenario_grid_points(const struct SmartemScenario *scenario,
                                                uintptr_t *out);

// Evaluate coverage over the scenario's UE grid. On success `*out` owns a
// new report handle that must be released with `smartem_report_free`.
//
// # Safety
// `scenario` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_evaluate_coverage(const struct SmartemScenario *scenario,
                                             struct SmartemReport **out);

// Release a report handle. Accepts null.
//
// # Safety
// `report` must be null or a pointer returned by
// `smartem_evaluate_coverage` that has not been freed yet.
void smartem_report_free(struct SmartemReport *report);

// Fraction of outdoor grid points at or above the coverage threshold.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_report_coverage_fraction(const struct SmartemReport *report,
                                                    double *out);

// Number of outdoor points in the evaluated grid.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_report_outdoor_points(const struct SmartemReport *report,
                                                 uintptr_t *out);

// 10th-percentile outdoor received power in dBm (the cell edge). Fails
// when the grid has no outdoor points.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_report_cell_edge_dbm(const struct SmartemReport *report, double *out);

// Received power in dBm at one grid point, indexed in row-major grid
// order (the same order as the CSV export).
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum SmartemStatus smartem_report_rx_power_dbm(const struct SmartemReport *report,
                                               uintptr_t index,
                                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMARTEM_H */
