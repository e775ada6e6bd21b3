/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef XHAIL_LITE_H
#define XHAIL_LITE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XlStatus {
  XL_STATUS_OK = 0,
  XL_STATUS_NULL_ARGUMENT = 1,
  XL_STATUS_INVALID_UTF8 = 2,
  XL_STATUS_SYNTAX = 3,
  XL_STATUS_UNSAFE = 4,
  XL_STATUS_NOT_STRATIFIED = 5,
  XL_STATUS_MODE = 6,
  XL_STATUS_CORPUS = 7,
  XL_STATUS_INVALID_ARGUMENT = 8,
  XL_STATUS_IO = 9,
  XL_STATUS_OTHER = 10,
  XL_STATUS_PANIC = 11,
} XlStatus;

/**
 * The outcome of [`xl_learn`].
 */
typedef struct XlLearnResult XlLearnResult;

/**
 * A parsed program.
 */
typedef struct XlProgram XlProgram;

/**
 * A learning task: background, examples and mode bias.
 */
typedef struct XlTask XlTask;

typedef struct XlScore {
  double precision;
  double recall;
  double f1;
} XlScore;

typedef struct XlTTest {
  double t;
  double p;
  size_t df;
  bool degenerate;
} XlTTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *xl_last_error(void);

/**
 * Library version as a static string.
 */
const char *xl_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void xl_string_free(char *s);

/**
 * # Safety
 * `text` must be a valid C string; `out` must be writable.
 */
enum XlStatus xl_program_parse(const char *text, struct XlProgram **out);

/**
 * # Safety
 * `program` must be null or a live handle from [`xl_program_parse`].
 */
void xl_program_free(struct XlProgram *program);

/**
 * Number of rules, facts included.
 *
 * # Safety
 * `program` must be a live handle.
 */
size_t xl_program_len(const struct XlProgram *program);

/**
 * Evaluates the program and writes its model as facts, one per line.
 *
 * # Safety
 * `program` must be a live handle; `out` must be writable.
 */
enum XlStatus xl_program_evaluate(const struct XlProgram *program, char **out);

/**
 * Builds a task from mode-file text (`#modeh`, `#modeb`, `#example` and
 * background rules).
 *
 * # Safety
 * `mode_text` must be a valid C string; `out` must be writable.
 */
enum XlStatus xl_task_from_mode_file(const char *mode_text, struct XlTask **out);

/**
 * Builds a chunking task from token-file and gold-file text with the
 * built-in chunking modes.
 *
 * # Safety
 * Both strings must be valid C strings; `out` must be writable.
 */
enum XlStatus xl_task_from_corpus(const char *tokens_tsv, const char *gold, struct XlTask **out);

/**
 * # Safety
 * `task` must be null or a live task handle.
 */
void xl_task_free(struct XlTask *task);

/**
 * Runs the learning pipeline. `budget_s` bounds abduction and induction
 * separately; a non-optimal hypothesis is still a success.
 *
 * # Safety
 * `task` must be a live handle; `out` must be writable.
 */
enum XlStatus xl_learn(const struct XlTask *task,
                       size_t pr,
                       double budget_s,
                       struct XlLearnResult **out);

/**
 * # Safety
 * `result` must be null or a live handle from [`xl_learn`].
 */
void xl_learn_result_free(struct XlLearnResult *result);

/**
 * Writes the learned hypothesis as rule text, one rule per line.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum XlStatus xl_learn_result_hypothesis(const struct XlLearnResult *result, char **out);

/**
 * Writes the learn report as JSON.
 *
 * # Safety
 * `result` must be a live handle; `out` must be writable.
 */
enum XlStatus xl_learn_result_report_json(const struct XlLearnResult *result, char **out);

/**
 * Whether the search proved its hypothesis optimal.
 *
 * # Safety
 * `result` must be a live handle.
 */
bool xl_learn_result_optimal(const struct XlLearnResult *result);

/**
 * Chunks every sentence of `tokens_tsv` with `hypothesis` and writes one
 * bracketed line per sentence.
 *
 * # Safety
 * `hypothesis` must be a live handle; `tokens_tsv` a valid C string;
 * `out` writable.
 */
enum XlStatus xl_predict(const struct XlProgram *hypothesis, const char *tokens_tsv, char **out);

/**
 * Macro-averaged precision, recall and F1 of predicted against gold
 * chunkings.
 *
 * # Safety
 * The strings must be valid C strings; `out` must be writable.
 */
enum XlStatus xl_score(const char *pred,
                       const char *gold,
                       const char *tokens_tsv,
                       struct XlScore *out);

/**
 * Paired one-tailed t-test of `a` against `b` (alternative: mean of `a`
 * is greater).
 *
 * # Safety
 * `a` and `b` must each point to `n` doubles; `out` must be writable.
 */
enum XlStatus xl_paired_t_test(const double *a, const double *b, size_t n, struct XlTTest *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XHAIL_LITE_H */
