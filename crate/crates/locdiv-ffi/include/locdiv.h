#ifndef LOCDIV_H
#define LOCDIV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum LocdivStatus {
  /**
   * Success.
   */
  LOCDIV_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LOCDIV_STATUS_NULL_ARGUMENT = 1,
  /**
   * The computed report is inconsistent.
   */
  LOCDIV_STATUS_INCONSISTENT = 2,
  /**
   * The oracle could not decide within its budget.
   */
  LOCDIV_STATUS_INCONCLUSIVE = 3,
  /**
   * Invalid input (parse or domain error).
   */
  LOCDIV_STATUS_INVALID_INPUT = 4,
  /**
   * Internal error (a panic was caught).
   */
  LOCDIV_STATUS_INTERNAL = 5,
} LocdivStatus;

/**
 * Opaque elliptic-curve handle.
 */
typedef struct LocdivCurve LocdivCurve;

/**
 * Opaque persistent-prime-set handle.
 */
typedef struct LocdivSet LocdivSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The pointer is
 * valid until the next failing call on the same thread; do not free it.
 */
const char *locdiv_last_error_message(void);

/**
 * Release a string returned by this library.
 */
void locdiv_string_free(char *s);

/**
 * Parse a set record such as "p=5 rule=const:1 depth=8" into a handle.
 */
enum LocdivStatus locdiv_set_new(const char *record, struct LocdivSet **out);

void locdiv_set_free(struct LocdivSet *set);

/**
 * Parse a curve description such as "a=0 b=1" into a handle.
 */
enum LocdivStatus locdiv_curve_new(const char *desc, struct LocdivCurve **out);

void locdiv_curve_free(struct LocdivCurve *curve);

/**
 * Frobenius coordinate of a prime q, written to `out` as a decimal string.
 */
enum LocdivStatus locdiv_frobenius_coordinate(const struct LocdivSet *set, uint64_t q, char **out);

/**
 * Density of the set among primes up to `limit`, as JSON.
 */
enum LocdivStatus locdiv_density_json(const struct LocdivSet *set, uint64_t limit, char **out);

/**
 * Members of the set up to `limit`, as a JSON array.
 */
enum LocdivStatus locdiv_set_members_json(const struct LocdivSet *set, uint64_t limit, char **out);

/**
 * Local p^n-divisibility of a point at a good odd prime l, as JSON
 * {divisible, method, witness?}.
 */
enum LocdivStatus locdiv_local_test_json(const struct LocdivCurve *curve,
                                         const char *point,
                                         uint64_t p,
                                         uint32_t n,
                                         uint64_t ell,
                                         char **out);

/**
 * Exact global p^n-divisibility, as JSON {outcome, witness?}. Returns
 * `Inconclusive` when the oracle's search budget is exhausted.
 */
enum LocdivStatus locdiv_global_test_json(const struct LocdivCurve *curve,
                                          const char *point,
                                          uint64_t p,
                                          uint32_t n,
                                          char **out);

/**
 * Full local-global check along the set, as a JSON report. Returns
 * `Inconsistent` or `Inconclusive` alongside the report when applicable.
 */
enum LocdivStatus locdiv_check_json(const struct LocdivCurve *curve,
                                    const char *point,
                                    uint64_t p,
                                    uint32_t n,
                                    const struct LocdivSet *set,
                                    uint64_t limit,
                                    uintptr_t sample,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCDIV_H */
