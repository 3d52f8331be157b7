#ifndef URNTUBES_H
#define URNTUBES_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum UtStatus {
  UT_STATUS_OK = 0,
  // A required pointer argument was null.
  UT_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  UT_STATUS_INVALID_UTF8 = 2,
  // Malformed mode, multiset, distribution or number.
  UT_STATUS_PARSE = 3,
  // Arguments outside the operation's domain.
  UT_STATUS_DOMAIN = 4,
  // Conditioning on an event of probability zero.
  UT_STATUS_CONDITIONING = 5,
  // A size or iteration limit was exceeded.
  UT_STATUS_RESOURCE = 6,
  // The library panicked. This is a bug.
  UT_STATUS_PANIC = 7,
} UtStatus;

// An exact finite table of labelled probabilities.
typedef struct UtTable UtTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Distribution of the multiset of colours in a draw of `k` balls.
//
// `mode` is `multinomial`, `hypergeometric` or `polya`. For `multinomial`
// the urn is a distribution such as `"1/3 R + 2/3 B"`, otherwise a
// multiset of balls such as `"3R+6B"`. Row labels are multisets.
//
// # Safety
// String arguments must be null or point to nul-terminated strings; `out`
// must be null or valid for writes.
enum UtStatus ut_draw(const char *mode, const char *urn, uint64_t k, struct UtTable **out);

// Probability that each colour's tube is the first to be filled.
//
// # Safety
// As for [`ut_draw`].
enum UtStatus ut_first_full(const char *mode,
                            const char *urn,
                            const char *tubes,
                            struct UtTable **out);

// Distribution of the number of draws until every tube is full, listed up
// to `k_max` draws. Row labels are draw counts; the mass beyond `k_max` is
// the table's residual. Hypergeometric urns always list the whole support.
//
// # Safety
// As for [`ut_draw`].
enum UtStatus ut_negative(const char *mode,
                          const char *urn,
                          const char *tubes,
                          uint64_t k_max,
                          struct UtTable **out);

// As [`ut_negative`], listing draw counts until the tail mass is provably
// below `tail_eps` (a rational such as `"1/1000"`).
//
// # Safety
// As for [`ut_draw`].
enum UtStatus ut_negative_tail(const char *mode,
                               const char *urn,
                               const char *tubes,
                               const char *tail_eps,
                               struct UtTable **out);

// Fair split of `stake` when a race to `target` wins stops at
// `wins_a : wins_b` and `A` wins each round with probability `prob`.
// Rows `A` and `B` hold each player's share of the stake.
//
// # Safety
// As for [`ut_draw`].
enum UtStatus ut_points(uint64_t target,
                        uint64_t wins_a,
                        uint64_t wins_b,
                        const char *prob,
                        const char *stake,
                        struct UtTable **out);

// Normalised frequencies of a multiset of balls, as a one-step table.
//
// # Safety
// As for [`ut_draw`].
enum UtStatus ut_frequencies(const char *balls, struct UtTable **out);

// Number of rows, or 0 for a null table.
//
// # Safety
// `table` must be null or a live handle.
size_t ut_table_len(const struct UtTable *table);

// Label of row `i`, or null when out of range.
//
// # Safety
// `table` must be null or a live handle.
char *ut_table_label(const struct UtTable *table, size_t i);

// Numerator of row `i` in decimal, or null when out of range.
//
// # Safety
// `table` must be null or a live handle.
char *ut_table_numerator(const struct UtTable *table, size_t i);

// Denominator of row `i` in decimal, or null when out of range.
//
// # Safety
// `table` must be null or a live handle.
char *ut_table_denominator(const struct UtTable *table, size_t i);

// Row `i` as a double, or NaN when out of range.
//
// # Safety
// `table` must be null or a live handle.
double ut_table_approx(const struct UtTable *table, size_t i);

// Mass not listed in the rows as `"num/den"` (`"0/1"` for complete tables).
//
// # Safety
// `table` must be null or a live handle.
char *ut_table_residual(const struct UtTable *table);

// The table as JSON, in the same layout as the command line's `--format json`.
//
// # Safety
// `table` must be null or a live handle.
char *ut_table_to_json(const struct UtTable *table);

// Releases a table. Null is ignored.
//
// # Safety
// `table` must be null or a handle not yet freed.
void ut_table_free(struct UtTable *table);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void ut_string_free(char *s);

// Message for the last failed call on this thread, or null after a
// success. The pointer stays valid until the next call on this thread.
const char *ut_last_error(void);

// Library version, statically allocated.
const char *ut_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* URNTUBES_H */
