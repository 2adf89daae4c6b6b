#ifndef NETSWITCH_H
#define NETSWITCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The numeric values of the library classes match the exit
 * codes of the command-line tool.
 */
typedef enum NsStatus {
  NS_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8 or an out-of-range argument.
   */
  NS_STATUS_INVALID_ARGUMENT = 1,
  NS_STATUS_PARSE = 2,
  NS_STATUS_PRECONDITION = 3,
  NS_STATUS_NUMERICAL = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  NS_STATUS_INTERNAL = 5,
} NsStatus;

typedef enum NsMethod {
  NS_METHOD_MCCORMICK = 0,
  NS_METHOD_ALTERNATING = 1,
} NsMethod;

/**
 * Opaque network handle.
 */
typedef struct NsNetwork NsNetwork;

typedef struct NsSwitchResult {
  bool improvable;
  bool unique;
  double k_star;
  double alpha_star;
  double lower_bound;
  double upper_bound;
  double alpha_a;
  double alpha_b;
} NsSwitchResult;

/**
 * Design settings; `ns_design_options_default` fills in the defaults.
 * A zero `order` or a non-positive `bound_a` selects the automatic value.
 */
typedef struct NsDesignOptions {
  enum NsMethod method;
  double gamma_low;
  double gamma_high;
  double bound_a;
  size_t order;
  size_t restarts;
  uint64_t seed;
} NsDesignOptions;

typedef struct NsDesignResult {
  double k_star;
  double alpha_star;
  double alpha_a;
  double alpha_b;
  double objective;
  size_t nonzeros;
  size_t pattern_size;
  bool improvable;
} NsDesignResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *ns_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ns_version(void);

/**
 * Builds a network from `n * n` row-major weights.
 *
 * # Safety
 * `weights` must point to `n * n` readable doubles and `out` to writable
 * storage for one handle.
 */
enum NsStatus ns_network_new(size_t n, const double *weights, struct NsNetwork **out);

/**
 * Reads a JSON or Matrix Market network, chosen by file extension.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum NsStatus ns_network_load(const char *path, struct NsNetwork **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `h` must come from this library and not be used afterwards.
 */
void ns_network_free(struct NsNetwork *h);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `h` must be null or a live handle.
 */
size_t ns_network_size(const struct NsNetwork *h);

/**
 * Copies the row-major weights into `buf`, which holds `len` doubles.
 *
 * # Safety
 * `h` must be a live handle and `buf` writable for `len` doubles.
 */
enum NsStatus ns_network_weights(const struct NsNetwork *h, double *buf, size_t len);

/**
 * Spectral abscissa of a network.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum NsStatus ns_spectral_abscissa(const struct NsNetwork *h, double *out);

/**
 * Optimal switching ratio for a commuting pair.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum NsStatus ns_opt_switch(const struct NsNetwork *a,
                            const struct NsNetwork *b,
                            struct NsSwitchResult *out);

struct NsDesignOptions ns_design_options_default(void);

/**
 * Synthesizes a sparse network commuting with `a`. On success `*out_b`
 * receives a new handle owned by the caller.
 *
 * # Safety
 * `a` must be a live handle, `opts` null or readable, `out_b` and
 * `result` writable.
 */
enum NsStatus ns_design(const struct NsNetwork *a,
                        const struct NsDesignOptions *opts,
                        struct NsNetwork **out_b,
                        struct NsDesignResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETSWITCH_H */
