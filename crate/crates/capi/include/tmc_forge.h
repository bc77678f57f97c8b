/* C interface to the tmc-forge toolchain.
 *
 * Maintained by hand; must stay in sync with src/lib.rs.
 *
 * Conventions:
 *   - programs are opaque TmcfProgram handles freed with tmcf_program_free
 *   - fallible calls return a tmcf_status; on failure tmcf_last_error()
 *     returns a message valid until the next fallible call on this thread
 *   - strings written through out-parameters are NUL-terminated UTF-8 and
 *     owned by the caller; release them with tmcf_string_free
 */

#ifndef TMC_FORGE_H
#define TMC_FORGE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct TmcfProgram TmcfProgram;

/* status codes */
enum {
    TMCF_OK = 0,
    TMCF_ERR_PARSE = 1,     /* lexical or syntactic error */
    TMCF_ERR_WF = 2,        /* well-formedness violation */
    TMCF_ERR_AMBIGUOUS = 3, /* transform needs a [@tailcall] annotation */
    TMCF_ERR_BADARG = 4,    /* unknown function, bad argument text, ... */
    TMCF_ERR_NULL = 5       /* null pointer argument */
};

/* refinement verdicts */
enum {
    TMCF_VERDICT_REFINES = 0,
    TMCF_VERDICT_VIOLATION = 1,
    TMCF_VERDICT_INCONCLUSIVE = 2
};

/* execution outcomes */
enum {
    TMCF_BEHAVIOR_CONV = 0,
    TMCF_BEHAVIOR_STUCK = 1,
    TMCF_BEHAVIOR_TIMEOUT = 2
};

/* Last error message on this thread (empty string when none). */
const char *tmcf_last_error(void);

/* Parses program text; ints_enabled != 0 turns on the integer extension.
 * On TMCF_OK, *out holds a new handle. */
int tmcf_program_parse(const char *src, int ints_enabled, TmcfProgram **out);

void tmcf_program_free(TmcfProgram *p);

/* Pretty-prints the program into *out (caller-owned). */
int tmcf_program_print(const TmcfProgram *p, char **out);

/* Applies the tail-call transformation. Returns TMCF_ERR_AMBIGUOUS with a
 * diagnostic when an unannotated constructor admits several rewrites. */
int tmcf_transform(const TmcfProgram *p, int compression,
                   int allow_both_sides, TmcfProgram **out);

/* Evaluates @fn_name(arg_text) left-to-right up to budget head steps.
 * *behavior_out receives a TMCF_BEHAVIOR_* code; result_out may be NULL,
 * otherwise it receives the rendered value or stuck expression. */
int tmcf_run(const TmcfProgram *p, const char *fn_name, const char *arg_text,
             uint64_t budget, int *behavior_out, char **result_out);

/* Checks that target refines source over the built-in input suite with
 * sizes 0..=max_size. *verdict_out receives a TMCF_VERDICT_* code. */
int tmcf_check(const TmcfProgram *source, const TmcfProgram *target,
               size_t max_size, uint64_t budget, uint64_t choice_cap,
               int *verdict_out);

void tmcf_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* TMC_FORGE_H */
