#ifndef INVQUOT_H
#define INVQUOT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum IqStatus {
  IQ_STATUS_OK = 0,
  IQ_STATUS_NULL_POINTER = 1,
  IQ_STATUS_INVALID_UTF8 = 2,
  IQ_STATUS_INVALID_INPUT = 3,
  IQ_STATUS_COMPUTE_ERROR = 4,
  IQ_STATUS_PANIC = 5,
} IqStatus;

/*
 Generators of an invariant ring.
 */
typedef struct IqInvariantBasis IqInvariantBasis;

/*
 A closed finite matrix group.
 */
typedef struct IqRepresentation IqRepresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version, a static string.
 */
const char *iq_version(void);

/*
 Message of the last failed call on this thread; empty after a success.
 Valid until the next call into the library on this thread.
 */
const char *iq_last_error(void);

/*
 Parses a spec JSON document and closes the group.

 # Safety
 `json` must be a valid nul-terminated string and `out` a valid pointer.
 */
enum IqStatus iq_representation_from_json(const char *json, struct IqRepresentation **out);

/*
 # Safety
 `rep` must come from `iq_representation_from_json` and not be used afterwards.
 */
void iq_representation_free(struct IqRepresentation *rep);

/*
 # Safety
 `rep` must be a live handle and `out` a valid pointer.
 */
enum IqStatus iq_representation_order(const struct IqRepresentation *rep, size_t *out);

/*
 Computes generators of the invariant ring; `cap == 0` means |G|.

 # Safety
 `rep` must be a live handle and `out` a valid pointer.
 */
enum IqStatus iq_invariants_compute(const struct IqRepresentation *rep,
                                    uint32_t cap,
                                    struct IqInvariantBasis **out);

/*
 # Safety
 `basis` must come from `iq_invariants_compute` and not be used afterwards.
 */
void iq_invariants_free(struct IqInvariantBasis *basis);

/*
 Number of generators.

 # Safety
 `basis` must be a live handle and `out` a valid pointer.
 */
enum IqStatus iq_invariants_len(const struct IqInvariantBasis *basis, size_t *out);

/*
 Copies up to `len` generator degrees into `degrees`.

 # Safety
 `degrees` must have room for `len` values.
 */
enum IqStatus iq_invariants_degrees(const struct IqInvariantBasis *basis,
                                    uint32_t *degrees,
                                    size_t len);

/*
 Generators as JSON: {"degrees": [...], "generators": [[{"coeff", "exps"}]]}.

 # Safety
 `basis` must be a live handle and `out` a valid pointer.
 */
enum IqStatus iq_invariants_to_json(const struct IqInvariantBasis *basis, char **out);

/*
 Runs a command-line invocation given as a JSON array of arguments
 (without the program name). Writes the exit code, and the report or the
 diagnostic text.

 # Safety
 `args_json` must be a valid string; `out_code` and `out_text` valid pointers.
 */
enum IqStatus iq_run(const char *args_json, int32_t *out_code, char **out_text);

/*
 # Safety
 `s` must come from this library and not be used afterwards.
 */
void iq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INVQUOT_H */
