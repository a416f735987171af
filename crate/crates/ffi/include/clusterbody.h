#ifndef CLUSTERBODY_H
#define CLUSTERBODY_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define CB_OK 0

/**
 * A required pointer argument was null.
 */
#define CB_ERR_NULL -1

/**
 * A string argument was not valid UTF-8.
 */
#define CB_ERR_UTF8 -2

/**
 * The library panicked; this is a bug.
 */
#define CB_ERR_PANIC -3

#define CB_ERR_RANK 1

#define CB_ERR_FROZEN_INDEX 2

#define CB_ERR_EMPTY_INPUT 3

#define CB_ERR_NOT_LAURENT 4

#define CB_ERR_NOT_IN_SPAN 5

#define CB_ERR_NOT_POSITIVE 6

#define CB_ERR_UNBOUNDED 7

#define CB_ERR_NON_GENERIC_ENDPOINT 8

#define CB_ERR_TRUNCATED 9

#define CB_ERR_NOT_IN_IMAGE 10

#define CB_ERR_RANK_UNSUPPORTED 11

#define CB_ERR_SINGULAR_PATH 12

#define CB_ERR_BAD_PARAMS 13

#define CB_ERR_INVALID_INPUT 14

#define CB_ERR_INCONSISTENT 15

#define CB_FLAVOR_A 0

#define CB_FLAVOR_X 1

typedef struct CbDiagram CbDiagram;

typedef struct CbLaurent CbLaurent;

typedef struct CbSeed CbSeed;

/**
 * Message of the last failed call on this thread, or null. Release with
 * `cb_string_free`.
 */
char *cb_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void cb_string_free(char *s);

/**
 * Parse a seed from JSON (`n`, `unfrozen`, `lambda` or `eps`, `d`, optional `word`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t cb_seed_from_json(const char *json, struct CbSeed **out);

/**
 * Mutate at an unfrozen index (0-based). The result shares fixed data with `seed`.
 *
 * # Safety
 * `seed` must be a live handle; `out` must be writable.
 */
int32_t cb_seed_mutate(const struct CbSeed *seed, size_t k, struct CbSeed **out);

/**
 * # Safety
 * `seed` must be a live handle; `out` must be writable.
 */
int32_t cb_seed_to_json(const struct CbSeed *seed, char **out);

/**
 * # Safety
 * `seed` must be null or a live handle; it is invalid afterwards.
 */
void cb_seed_free(struct CbSeed *seed);

/**
 * Parse `[{"exp": [...], "coef": "p/q"}, ...]` in `nvars` variables.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
int32_t cb_laurent_from_json(const char *json, size_t nvars, struct CbLaurent **out);

/**
 * Rewrite `f` from the chart of `from` into the chart of `to`; `flavor` is
 * `CB_FLAVOR_A` or `CB_FLAVOR_X`.
 *
 * # Safety
 * All handles must be live; `out` must be writable.
 */
int32_t cb_laurent_transport(const struct CbLaurent *f,
                             const struct CbSeed *from,
                             const struct CbSeed *to,
                             int32_t flavor,
                             struct CbLaurent **out);

/**
 * # Safety
 * Both handles must be live.
 */
bool cb_laurent_equal(const struct CbLaurent *a, const struct CbLaurent *b);

/**
 * Number of terms, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t cb_laurent_len(const struct CbLaurent *f);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
int32_t cb_laurent_to_json(const struct CbLaurent *f, char **out);

/**
 * # Safety
 * `f` must be null or a live handle; it is invalid afterwards.
 */
void cb_laurent_free(struct CbLaurent *f);

/**
 * Consistent completion, to `order`, of the initial diagram of `seed`'s fixed data
 * (two mutable directions). With `principal`, the principal-coefficient data is used.
 *
 * # Safety
 * `seed` must be a live handle; `out` must be writable.
 */
int32_t cb_diagram_complete(const struct CbSeed *seed,
                            size_t order,
                            bool principal,
                            struct CbDiagram **out);

/**
 * Whether the loop around the origin is trivial to `order`; writes 1 or 0.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
int32_t cb_diagram_is_consistent(const struct CbDiagram *d, size_t order, bool *out);

/**
 * Theta function for the exponent `m[0..len]` at a generic point of the positive
 * chamber, summing broken lines of degree at most `bound`. Fails with the
 * `Truncated` code when the sum is not exact at that bound.
 *
 * # Safety
 * `d` must be a live handle; `m` must point to `len` integers; `out` must be writable.
 */
int32_t cb_theta(const struct CbDiagram *d,
                 const int64_t *m,
                 size_t len,
                 size_t bound,
                 struct CbLaurent **out);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
int32_t cb_diagram_to_json(const struct CbDiagram *d, char **out);

/**
 * # Safety
 * `d` must be null or a live handle; it is invalid afterwards.
 */
void cb_diagram_free(struct CbDiagram *d);

/**
 * Check the valuation/g-vector identity for every Plücker index of the grid with
 * `k` columns; writes the number of indices and how many passed.
 *
 * # Safety
 * `total` and `passed` must be writable.
 */
int32_t cb_gr_verify(size_t k, size_t n, size_t *total, size_t *passed);

/**
 * Run one acceptance criterion and write its JSON report.
 *
 * # Safety
 * `out` must be writable.
 */
int32_t cb_accept_run(uint32_t id, char **out);

#endif  /* CLUSTERBODY_H */
