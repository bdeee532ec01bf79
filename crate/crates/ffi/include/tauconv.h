#ifndef TAUCONV_H
#define TAUCONV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TcOp {
  TC_OP_RCONV = 0,
  TC_OP_LCONV = 1,
  TC_OP_TCONV = 2,
  TC_OP_STANDARD = 3,
} TcOp;

typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_UTF8 = 2,
  TC_STATUS_PARSE = 3,
  TC_STATUS_INVALID_GROUP = 4,
  TC_STATUS_SHAPE = 5,
  TC_STATUS_GROUP_MISMATCH = 6,
  TC_STATUS_INVALID_ARGUMENT = 7,
  // The library panicked; the handle arguments are left untouched.
  TC_STATUS_INTERNAL = 8,
} TcStatus;

// A complex-valued function on a group.
typedef struct TcFunction TcFunction;

// A validated semidirect product `H ⋉ K`.
typedef struct TcGroup TcGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next
// call into the library from the same thread; never null.
const char *tc_last_error(void);

// Builds and validates a group from the JSON body of a group file.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum TcStatus tc_group_from_json(const char *json, struct TcGroup **out);

// # Safety
// `group` must come from [`tc_group_from_json`] and not be used afterwards.
void tc_group_free(struct TcGroup *group);

// `|G|`, or 0 for a null handle.
//
// # Safety
// `group` must be null or a live handle.
size_t tc_group_order(const struct TcGroup *group);

// # Safety
// `group` must be null or a live handle.
size_t tc_group_h_order(const struct TcGroup *group);

// # Safety
// `group` must be null or a live handle.
size_t tc_group_k_order(const struct TcGroup *group);

// Creates a function from `len = |G|` values; `im` may be null for real data.
//
// # Safety
// `re` (and `im` unless null) must point to `len` doubles.
enum TcStatus tc_function_new(const struct TcGroup *group,
                              const double *re,
                              const double *im,
                              size_t len,
                              struct TcFunction **out);

// Number of values, or 0 for a null handle.
//
// # Safety
// `f` must be null or a live handle.
size_t tc_function_len(const struct TcFunction *f);

// Copies the values out; `im` may be null.
//
// # Safety
// `re` (and `im` unless null) must have room for `len` doubles.
enum TcStatus tc_function_values(const struct TcFunction *f, double *re, double *im, size_t len);

// # Safety
// `f` must come from this library and not be used afterwards.
void tc_function_free(struct TcFunction *f);

// `out = op(f, g)`. Both operands must live on the same group.
//
// # Safety
// Handles must be live; `out` must be a valid pointer.
enum TcStatus tc_convolve(enum TcOp op,
                          const struct TcFunction *f,
                          const struct TcFunction *g,
                          struct TcFunction **out);

// The τ-involution of `f`.
//
// # Safety
// `f` must be live; `out` must be a valid pointer.
enum TcStatus tc_involution(const struct TcFunction *f, struct TcFunction **out);

// Writes the projection `f̃` to K into `len = |K|` doubles; `im` may be null.
//
// # Safety
// `re` (and `im` unless null) must have room for `len` doubles.
enum TcStatus tc_tilde(const struct TcFunction *f, double *re, double *im, size_t len);

// `‖f‖_p` for `p ≥ 1`; pass `INFINITY` for the max norm.
//
// # Safety
// `f` must be live; `out` must be a valid pointer.
enum TcStatus tc_norm(const struct TcFunction *f, double p, double *out);

// Runs the verification suite and returns the report as JSON, to be
// released with [`tc_string_free`]. `exact != 0` selects the exact backend.
// `*passed` is set to 1 when no check failed.
//
// # Safety
// `group` must be live; `out_json` and `passed` must be valid pointers.
enum TcStatus tc_verify_json(const struct TcGroup *group,
                             uint64_t seed,
                             size_t trials,
                             int32_t exact,
                             char **out_json,
                             int32_t *passed);

// # Safety
// `s` must be null or a string returned by this library.
void tc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAUCONV_H */
