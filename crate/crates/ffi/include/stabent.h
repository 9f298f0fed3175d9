#ifndef STABENT_H
#define STABENT_H

#include <stdbool.h>
#include <stddef.h>

/*
 Result codes.
 */
typedef enum StabentStatus {
  STABENT_STATUS_OK = 0,
  STABENT_STATUS_NULL_ARGUMENT = 1,
  STABENT_STATUS_INVALID_UTF8 = 2,
  STABENT_STATUS_PARSE = 3,
  /*
   The state is well formed but the operation does not apply to it
   (wrong party count, qubit out of range).
   */
  STABENT_STATUS_UNSUPPORTED = 4,
  STABENT_STATUS_INTERNAL = 5,
} StabentStatus;

/*
 Opaque multipartite stabilizer state.
 */
typedef struct StabentState StabentState;

/*
 Tripartite normal form: `zeros` per party, EPR counts `a` (B-C), `b` (A-C),
 `c` (A-B) and GHZ count `p`.
 */
typedef struct StabentCounts {
  size_t zeros[3];
  size_t a;
  size_t b;
  size_t c;
  size_t p;
} StabentCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next stabent call on the same thread.
 */
const char *stabent_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *stabent_version(void);

/*
 Parse a state file. On success `*out` owns a new handle.
 */
enum StabentStatus stabent_state_parse(const char *text, struct StabentState **out);

/*
 Release a handle. Null is ignored.
 */
void stabent_state_free(struct StabentState *state);

enum StabentStatus stabent_state_num_qubits(const struct StabentState *state, size_t *out);

enum StabentStatus stabent_state_num_parties(const struct StabentState *state, size_t *out);

/*
 Serialize to the state file format. Free the result with [`stabent_string_free`].
 */
enum StabentStatus stabent_state_to_string(const struct StabentState *state, char **out);

/*
 Free a string returned by this library. Null is ignored.
 */
void stabent_string_free(char *s);

/*
 GHZ yield `n - dim S_loc`.
 */
enum StabentStatus stabent_delta(const struct StabentState *state, size_t *out);

/*
 Entropy (in bits) of the qubits `qubits[0..len]` (0-based).
 */
enum StabentStatus stabent_subset_entropy(const struct StabentState *state,
                                          const size_t *qubits,
                                          size_t len,
                                          size_t *out);

/*
 Number of GHZ states extractable by local unitaries (at least three parties).
 The extraction circuits are verified before returning.
 */
enum StabentStatus stabent_ghz_yield(const struct StabentState *state, size_t *out);

/*
 Normal form of a three-party state, checked against synthesized circuits.
 */
enum StabentStatus stabent_decompose3(const struct StabentState *state, struct StabentCounts *out);

/*
 Whether two three-party states are related by local Clifford unitaries.
 */
enum StabentStatus stabent_equivalent3(const struct StabentState *first,
                                       const struct StabentState *second,
                                       bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABENT_H */
