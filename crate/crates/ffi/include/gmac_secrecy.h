#ifndef GMAC_SECRECY_H
#define GMAC_SECRECY_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmacStatus {
  GMAC_STATUS_OK = 0,
  GMAC_STATUS_NULL_POINTER = 1,
  GMAC_STATUS_DOMAIN = 2,
  GMAC_STATUS_SHAPE = 3,
  GMAC_STATUS_RESOURCE = 4,
  GMAC_STATUS_CONFIG = 5,
  GMAC_STATUS_PARSE = 6,
  GMAC_STATUS_IO = 7,
  GMAC_STATUS_INVALID_UTF8 = 8,
  GMAC_STATUS_PANIC = 9,
} GmacStatus;

// A finite-alphabet channel.
typedef struct GmacChannel GmacChannel;

// A finite-blocklength code.
typedef struct GmacCodebook GmacCodebook;

// A sampled secrecy capacity boundary.
typedef struct GmacCurve GmacCurve;

typedef struct GmacOracleReport {
  double equivocation_bits;
  double equivocation_rate;
  double error_prob;
  bool perfect_secrecy;
} GmacOracleReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL after a success.
// The pointer stays valid until the next call into this library on the same
// thread.
const char *gmac_last_error_message(void);

// Binary entropy in bits.
double gmac_binary_entropy(double a);

// `a(1-b) + (1-a)b`.
double gmac_star(double a, double b);

// Inverse of the binary entropy onto `[0, 1/2]`.
//
// # Safety
// `out` must be NULL or valid for one `double` write.
enum GmacStatus gmac_binary_entropy_inv(double c, double *out);

// Secrecy capacity `R1` of the binary GMAC at common rate `r0`.
// `out_alpha` may be NULL.
//
// # Safety
// Non-NULL out pointers must be valid for one `double` write.
enum GmacStatus gmac_binary_secrecy_capacity(double r0,
                                             double p,
                                             double *out_r1,
                                             double *out_alpha);

// Whether `(r0, r1)` is in the binary secrecy capacity region.
//
// # Safety
// `out` must be NULL or valid for one `bool` write.
enum GmacStatus gmac_binary_secrecy_member(double r0, double r1, double p, bool *out);

// Secrecy capacity `R1` of the Gaussian GMAC at common rate `r0`.
// `out_alpha` may be NULL.
//
// # Safety
// Non-NULL out pointers must be valid for one `double` write.
enum GmacStatus gmac_gaussian_secrecy_capacity(double p1,
                                               double p2,
                                               double n,
                                               double n2,
                                               double r0,
                                               double *out_r1,
                                               double *out_alpha);

// Smallest interior second difference of `h(rho * h^-1(u))` on a grid of
// step `step`.
//
// # Safety
// `out` must be NULL or valid for one `double` write.
enum GmacStatus gmac_verify_convexity(double rho, double step, double *out);

// # Safety
// `out` must be NULL or valid for one pointer write.
enum GmacStatus gmac_channel_new_deterministic(struct GmacChannel **out);

// # Safety
// `out` must be NULL or valid for one pointer write.
enum GmacStatus gmac_channel_new_binary(double p, struct GmacChannel **out);

// Parses the channel JSON layout `{alphabets, transition}`.
//
// # Safety
// `json` must be NULL or a NUL-terminated string; `out` must be NULL or valid
// for one pointer write.
enum GmacStatus gmac_channel_from_json(const char *json, struct GmacChannel **out);

// Physical degradedness test. `out_violation` may be NULL.
//
// # Safety
// `ch` must be NULL or a live channel handle; non-NULL out pointers must be
// valid for one write.
enum GmacStatus gmac_channel_is_degraded(const struct GmacChannel *ch,
                                         bool *out_degraded,
                                         double *out_violation);

// # Safety
// `ch` must be NULL or a handle not yet freed.
void gmac_channel_free(struct GmacChannel *ch);

// Parses the codebook JSON layout `{n, M0, M1, encoder1, encoder2}`.
//
// # Safety
// `json` must be NULL or a NUL-terminated string; `out` must be NULL or valid
// for one pointer write.
enum GmacStatus gmac_codebook_from_json(const char *json, struct GmacCodebook **out);

// One-symbol code sending a private bit on the deterministic example with
// `x2 = 1`.
//
// # Safety
// `out` must be NULL or valid for one pointer write.
enum GmacStatus gmac_codebook_new_private_corner(struct GmacCodebook **out);

// `k` independent uses of `code`.
//
// # Safety
// `code` must be NULL or a live codebook handle; `out` must be NULL or valid
// for one pointer write.
enum GmacStatus gmac_codebook_repeat(const struct GmacCodebook *code,
                                     size_t k,
                                     struct GmacCodebook **out);

// # Safety
// `code` must be NULL or a handle not yet freed.
void gmac_codebook_free(struct GmacCodebook *code);

// Exact equivocation and MAP error probability of `code` on `ch`.
//
// # Safety
// Handles must be NULL or live; `out` must be NULL or valid for one write.
enum GmacStatus gmac_oracle_evaluate(const struct GmacCodebook *code,
                                     const struct GmacChannel *ch,
                                     struct GmacOracleReport *out);

// Binary secrecy boundary sampled at `n_points` common rates.
//
// # Safety
// `out` must be NULL or valid for one pointer write.
enum GmacStatus gmac_curve_new_binary(double p, size_t n_points, struct GmacCurve **out);

// Gaussian secrecy boundary sampled at `n_points` common rates.
//
// # Safety
// `out` must be NULL or valid for one pointer write.
enum GmacStatus gmac_curve_new_gaussian(double p1,
                                        double p2,
                                        double n,
                                        double n2,
                                        size_t n_points,
                                        struct GmacCurve **out);

// Number of samples, or 0 for NULL.
//
// # Safety
// `curve` must be NULL or a live curve handle.
size_t gmac_curve_len(const struct GmacCurve *curve);

// Sample `i` of the curve. `out_alpha` may be NULL.
//
// # Safety
// `curve` must be NULL or live; non-NULL out pointers must be valid for one
// `double` write.
enum GmacStatus gmac_curve_sample(const struct GmacCurve *curve,
                                  size_t i,
                                  double *out_r0,
                                  double *out_r1,
                                  double *out_alpha);

// # Safety
// `curve` must be NULL or a handle not yet freed.
void gmac_curve_free(struct GmacCurve *curve);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GMAC_SECRECY_H */
