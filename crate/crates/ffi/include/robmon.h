#ifndef ROBMON_H
#define ROBMON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a fallible call.
typedef enum RobmonStatus {
  ROBMON_STATUS_OK = 0,
  ROBMON_STATUS_NULL_ARGUMENT = 1,
  ROBMON_STATUS_INVALID_UTF8 = 2,
  ROBMON_STATUS_FORMULA_SYNTAX = 3,
  ROBMON_STATUS_PREDICATE_SYNTAX = 4,
  ROBMON_STATUS_UNBOUND_ATOM = 5,
  ROBMON_STATUS_UNKNOWN_VARIABLE = 6,
  ROBMON_STATUS_PREDICTION_LENGTH = 7,
  ROBMON_STATUS_NOT_A_NUMBER = 8,
  ROBMON_STATUS_PANIC = 9,
} RobmonStatus;

// Opaque monitor handle.
typedef struct RobmonMonitor RobmonMonitor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a monitor. `variables` holds `n_variables` NUL-terminated names.
// On success `*out` receives a handle to release with [`robmon_monitor_free`].
//
// # Safety
// All pointers must be valid; strings must be NUL-terminated.
enum RobmonStatus robmon_monitor_new(const char *formula,
                                     const char *predicates,
                                     const char *const *variables,
                                     size_t n_variables,
                                     struct RobmonMonitor **out);

// Releases a monitor. Null is ignored.
//
// # Safety
// `monitor` must come from [`robmon_monitor_new`] and not be used afterwards.
void robmon_monitor_free(struct RobmonMonitor *monitor);

// Number of predicted samples each step needs.
//
// # Safety
// `monitor` must be a live handle.
size_t robmon_monitor_horizon(const struct RobmonMonitor *monitor);

// Past columns kept in the robustness table.
//
// # Safety
// `monitor` must be a live handle.
size_t robmon_monitor_history(const struct RobmonMonitor *monitor);

// Columns of the robustness table.
//
// # Safety
// `monitor` must be a live handle.
size_t robmon_monitor_width(const struct RobmonMonitor *monitor);

// Number of variables each sample supplies.
//
// # Safety
// `monitor` must be a live handle.
size_t robmon_monitor_variables(const struct RobmonMonitor *monitor);

// Advances the monitor by one sample and writes the current robustness
// (possibly `INFINITY` or `-INFINITY`) to `*out`.
//
// `current` holds one value per variable. `predictions` holds
// `n_predictions` samples of the same layout back to back, and
// `n_predictions` must equal the horizon. On failure the monitor state is
// unchanged.
//
// # Safety
// `monitor` must be a live handle; arrays must have the stated lengths.
enum RobmonStatus robmon_monitor_step(struct RobmonMonitor *monitor,
                                      double time,
                                      const double *current,
                                      const double *predictions,
                                      size_t n_predictions,
                                      double *out);

// Description of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *robmon_last_error(void);

// Static name of a status code.
const char *robmon_status_name(enum RobmonStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBMON_H */
