#ifndef MOC_H
#define MOC_H

/* Generated from src/lib.rs by cbindgen. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum MocStatus {
  MOC_STATUS_OK = 0,
  MOC_STATUS_NULL_ARGUMENT = 1,
  MOC_STATUS_INVALID_UTF8 = 2,
  MOC_STATUS_SHAPE = 3,
  MOC_STATUS_ALPHABET = 4,
  MOC_STATUS_FORMAT = 5,
  MOC_STATUS_DECODE = 6,
  MOC_STATUS_INVALID_MACHINE = 7,
  MOC_STATUS_ORACLE = 8,
  MOC_STATUS_PROMISE_VIOLATION = 9,
  MOC_STATUS_RESOURCE = 10,
  MOC_STATUS_UNSUPPORTED = 11,
  MOC_STATUS_AUDIT = 12,
  MOC_STATUS_EQUIVALENCE = 13,
  MOC_STATUS_OVERFLOW = 14,
  MOC_STATUS_BUFFER_TOO_SMALL = 15,
  MOC_STATUS_PANIC = 16,
} MocStatus;

/**
 * How a run ended.
 */
typedef enum MocOutcome {
  MOC_OUTCOME_HALTED = 0,
  MOC_OUTCOME_REJECTED = 1,
  MOC_OUTCOME_FUEL_EXHAUSTED = 2,
} MocOutcome;

/**
 * Opaque Turing machine.
 */
typedef struct MocMachine MocMachine;

/**
 * Opaque register program.
 */
typedef struct MocProgram MocProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a
 * successful call. Valid until the next call on the same thread.
 */
const char *moc_last_error(void);

/**
 * Library version as a static string.
 */
const char *moc_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void moc_string_free(char *s);

/**
 * Parses `.tm` text into a new machine.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MocStatus moc_machine_parse(const char *text, struct MocMachine **out);

/**
 * Releases a machine. Null is ignored.
 *
 * # Safety
 * `m` must come from this library and must not be used afterwards.
 */
void moc_machine_free(struct MocMachine *m);

/**
 * Canonical `.tm` text of a machine.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MocStatus moc_machine_to_text(const struct MocMachine *m, char **out);

/**
 * Runs a machine on `n_inputs` words for at most `fuel` steps. On a
 * halted run `*outputs` receives the output words joined by newlines;
 * otherwise it is set to null. `steps` may be null.
 *
 * # Safety
 * `m` must be a live handle, `inputs` must point to `n_inputs`
 * NUL-terminated strings, and the out pointers must be valid.
 */
enum MocStatus moc_machine_run(const struct MocMachine *m,
                               const char *const *inputs,
                               size_t n_inputs,
                               uint64_t fuel,
                               enum MocOutcome *outcome,
                               char **outputs,
                               uint64_t *steps);

/**
 * Sequential composition: `a`'s outputs feed `b`.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum MocStatus moc_machine_compose(const struct MocMachine *a,
                                   const struct MocMachine *b,
                                   struct MocMachine **out);

/**
 * Parallel composition.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum MocStatus moc_machine_tensor(const struct MocMachine *a,
                                  const struct MocMachine *b,
                                  struct MocMachine **out);

/**
 * Deterministic machine with the same breadth-first semantics.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MocStatus moc_machine_determinize(const struct MocMachine *m, struct MocMachine **out);

/**
 * Gödel number of a machine, in decimal.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid pointer.
 */
enum MocStatus moc_machine_godel(const struct MocMachine *m, char **out);

/**
 * Machine denoted by a decimal Gödel number.
 *
 * # Safety
 * `number` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MocStatus moc_machine_from_godel(const char *number, struct MocMachine **out);

/**
 * Decides whether the machine accepts the inputs within `t_max` steps
 * by solving its bounded acceptance formula.
 *
 * # Safety
 * `m` must be a live handle, `inputs` must point to `n_inputs`
 * NUL-terminated strings, and `accepts` must be valid.
 */
enum MocStatus moc_machine_accepts_sat(const struct MocMachine *m,
                                       const char *const *inputs,
                                       size_t n_inputs,
                                       size_t t_max,
                                       bool *accepts);

/**
 * Parses `.rm` text into a new register program.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MocStatus moc_program_parse(const char *text, struct MocProgram **out);

/**
 * Releases a register program. Null is ignored.
 *
 * # Safety
 * `p` must come from this library and must not be used afterwards.
 */
void moc_program_free(struct MocProgram *p);

/**
 * Runs a register program. On a halted run the outputs are written to
 * `values` (capacity `cap`) and their count to `*len`. An output above
 * `u64::MAX` fails with `Overflow`; too many outputs with
 * `BufferTooSmall`, with `*len` still set to the count needed.
 *
 * # Safety
 * `p` must be a live handle, `args` must point to `n_args` values,
 * `values` to `cap` writable values, and the out pointers must be valid.
 */
enum MocStatus moc_program_run(const struct MocProgram *p,
                               const uint64_t *args,
                               size_t n_args,
                               uint64_t fuel,
                               enum MocOutcome *outcome,
                               uint64_t *values,
                               size_t cap,
                               size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOC_H */
