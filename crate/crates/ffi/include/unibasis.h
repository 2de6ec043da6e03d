#ifndef UNIBASIS_H
#define UNIBASIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Status codes returned by every fallible function.
typedef enum UbStatus {
  UB_STATUS_OK = 0,
  UB_STATUS_NULL_POINTER = 1,
  UB_STATUS_INVALID_ARGUMENT = 2,
  UB_STATUS_DIMENSION_MISMATCH = 3,
  UB_STATUS_DESIGN_INVALID = 4,
  UB_STATUS_NOT_UNITARY = 5,
  UB_STATUS_NOT_DENSITY_OPERATOR = 6,
  UB_STATUS_SCHEME_INVALID = 7,
  UB_STATUS_DIMENSION_TOO_LARGE = 8,
  UB_STATUS_PARSE_ERROR = 9,
  UB_STATUS_BUFFER_TOO_SMALL = 10,
  UB_STATUS_PANIC = 11,
} UbStatus;

typedef enum UbMode {
  UB_MODE_TELEPORTATION = 0,
  UB_MODE_DENSE_CODING = 1,
} UbMode;

// Opaque unitary operator basis.
typedef struct UbBasis UbBasis;

// Opaque tight teleportation / dense-coding scheme.
typedef struct UbScheme UbScheme;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `len`). Returns the length of the full message
// excluding the terminator, or 0 when there is none.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t ub_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *ub_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a pointer previously returned by this library.
void ub_string_free(char *s);

// Number of normalized Latin squares of order `d` (`d <= 5`).
//
// # Safety
// `out` must be valid for writes.
enum UbStatus ub_count_normalized_latin(size_t d, uint64_t *out);

// Builds the Weyl (clock and shift) basis of dimension `d`.
//
// # Safety
// `out` must be valid for writes.
enum UbStatus ub_basis_weyl(size_t d, struct UbBasis **out);

// Shift-and-multiply basis from a Latin square (`d²` symbols, row-major)
// and `d` Hadamard matrices (`2 d³` doubles, matrix after matrix).
//
// # Safety
// `latin` must hold `d²` values and `hadamards` `2 d³` doubles; `out` must
// be valid for writes.
enum UbStatus ub_basis_shift_multiply(size_t d,
                                      const size_t *latin,
                                      const double *hadamards,
                                      double tol,
                                      struct UbBasis **out);

// Basis from `d²` explicit matrices (`2 d⁴` doubles); validated to `tol`.
//
// # Safety
// `data` must hold `2 d⁴` doubles; `out` must be valid for writes.
enum UbStatus ub_basis_from_elements(size_t d,
                                     const double *data,
                                     double tol,
                                     struct UbBasis **out);

// Loads a `unitary_basis` JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum UbStatus ub_basis_from_json(const char *json, struct UbBasis **out);

// Serializes the basis as a JSON document; release with `ub_string_free`.
//
// # Safety
// `basis` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_basis_to_json(const struct UbBasis *basis, char **out);

// `U_x ⊗ V_y` with flat index `x * n2 + y`.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum UbStatus ub_basis_tensor(const struct UbBasis *a,
                              const struct UbBasis *b,
                              struct UbBasis **out);

// Dimension `d` of the underlying space; 0 for a null handle.
//
// # Safety
// `basis` must be null or a live handle.
size_t ub_basis_dim(const struct UbBasis *basis);

// Number of elements (`d²`); 0 for a null handle.
//
// # Safety
// `basis` must be null or a live handle.
size_t ub_basis_len(const struct UbBasis *basis);

// Copies element `x` into `out` (`2 d²` doubles).
//
// # Safety
// `basis` must be a live handle; `out` must be valid for `out_len` doubles.
enum UbStatus ub_basis_element(const struct UbBasis *basis, size_t x, double *out, size_t out_len);

// Gram-matrix deviation `max |tr(U_x* U_y)/d - δ_xy|`.
//
// # Safety
// `basis` must be a live handle; `deviation` must be valid for writes.
enum UbStatus ub_basis_verify_orthonormal(const struct UbBasis *basis, double *deviation);

// Worst deviation of `Σ_x U_x* A U_x` from `d tr(A) 1` over matrix units.
//
// # Safety
// `basis` must be a live handle; `deviation` must be valid for writes.
enum UbStatus ub_basis_verify_depolarizer(const struct UbBasis *basis, double *deviation);

// Releases a basis handle. Null is ignored.
//
// # Safety
// `basis` must be null or a handle not yet freed.
void ub_basis_free(struct UbBasis *basis);

// Scheme with the canonical maximally entangled resource.
//
// # Safety
// `basis` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_scheme_build(const struct UbBasis *basis, enum UbMode mode, struct UbScheme **out);

// Loads a `scheme` JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writes.
enum UbStatus ub_scheme_from_json(const char *json, struct UbScheme **out);

// Serializes the scheme as a JSON document; release with `ub_string_free`.
//
// # Safety
// `scheme` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_scheme_to_json(const struct UbScheme *scheme, char **out);

// Dimension `d`; 0 for a null handle.
//
// # Safety
// `scheme` must be null or a live handle.
size_t ub_scheme_dim(const struct UbScheme *scheme);

// Mode the scheme is meant for.
//
// # Safety
// `scheme` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_scheme_mode(const struct UbScheme *scheme, enum UbMode *out);

// Same components, other mode.
//
// # Safety
// `scheme` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_scheme_swap_roles(const struct UbScheme *scheme, struct UbScheme **out);

// Replaces the resource by the `d² x d²` density matrix `omega`
// (`2 d⁴` doubles), producing a new handle.
//
// # Safety
// `scheme` must be a live handle, `omega` must hold `2 d⁴` doubles and
// `out` must be valid for writes.
enum UbStatus ub_scheme_with_resource(const struct UbScheme *scheme,
                                      const double *omega,
                                      struct UbScheme **out);

// Worst deviation of the teleportation identity over all matrix-unit pairs.
//
// # Safety
// `scheme` must be a live handle; `deviation` must be valid for writes.
enum UbStatus ub_scheme_verify_teleportation(const struct UbScheme *scheme, double *deviation);

// `max |P - 1|` for the dense-coding probability matrix. When
// `probabilities` is non-null, `P` is written there row-major (`d⁴`
// doubles, `len` must be at least that).
//
// # Safety
// `scheme` must be a live handle; `deviation` must be valid for writes and
// `probabilities` null or valid for `len` doubles.
enum UbStatus ub_scheme_verify_dense_coding(const struct UbScheme *scheme,
                                            double *deviation,
                                            double *probabilities,
                                            size_t len);

// Runs the protocol on the `d x d` density operator `rho` (`2 d²`
// doubles). Bob's averaged output goes to `out_rho` (`2 d²` doubles) and
// the outcome probabilities to `out_probabilities` (`d²` doubles).
//
// # Safety
// `scheme` must be a live handle and all buffers sized as described.
enum UbStatus ub_scheme_teleport(const struct UbScheme *scheme,
                                 const double *rho,
                                 double *out_rho,
                                 double *out_probabilities);

// Recovers a unitary basis from a scheme that passes its verifier.
//
// # Safety
// `scheme` must be a live handle; `out` must be valid for writes.
enum UbStatus ub_scheme_extract_basis(const struct UbScheme *scheme, struct UbBasis **out);

// Releases a scheme handle. Null is ignored.
//
// # Safety
// `scheme` must be null or a handle not yet freed.
void ub_scheme_free(struct UbScheme *scheme);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNIBASIS_H */
