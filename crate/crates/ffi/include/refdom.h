#ifndef REFDOM_H
#define REFDOM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum RefdomStatus {
  REFDOM_STATUS_OK = 0,
  REFDOM_STATUS_NULL_ARGUMENT = 1,
  REFDOM_STATUS_INVALID_UTF8 = 2,
  REFDOM_STATUS_IO = 3,
  // Malformed JSON, or a knowledge base, lexicon or scene that fails validation.
  REFDOM_STATUS_INVALID_INPUT = 4,
  // The utterance could not be tokenized or parsed.
  REFDOM_STATUS_PARSE = 5,
  // The context model refused an update.
  REFDOM_STATUS_ENGINE = 6,
  REFDOM_STATUS_PANIC = 7,
} RefdomStatus;

// A loaded knowledge base (type hierarchy plus lexicon).
typedef struct RefdomKb RefdomKb;

// A dialogue session: context model, optional scene, utterance counter.
typedef struct RefdomSession RefdomSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Do not free it.
const char *refdom_version(void);

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into the library on this thread.
const char *refdom_last_error(void);

// Loads a knowledge base from a JSON file.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
enum RefdomStatus refdom_kb_load(const char *path, struct RefdomKb **out);

// Builds a knowledge base from JSON text.
//
// # Safety
// `json` must be a valid NUL-terminated string and `out` a valid pointer.
enum RefdomStatus refdom_kb_from_json(const char *json, struct RefdomKb **out);

// # Safety
// `kb` must be null or a handle from this library not yet freed.
void refdom_kb_free(struct RefdomKb *kb);

// Opens a session with default options. The session keeps its own
// reference to the knowledge base, which may be freed afterwards.
//
// # Safety
// `kb` must be a live handle and `out` a valid pointer.
enum RefdomStatus refdom_session_new(const struct RefdomKb *kb, struct RefdomSession **out);

// # Safety
// `session` must be null or a handle from this library not yet freed.
void refdom_session_free(struct RefdomSession *session);

// Loads scene entities (JSON text) into the session. Only one scene per session.
//
// # Safety
// `session` must be a live handle and `json` a valid NUL-terminated string.
enum RefdomStatus refdom_session_load_scene(struct RefdomSession *session, const char *json);

// Interprets one utterance and writes a JSON object
// `{"utt": n, "resolutions": [trace records], "groups": [...]}` to `out`.
// Unresolvable expressions are reported with verdict `FAIL`, not as errors.
//
// # Safety
// `session` must be a live handle, `text` a valid NUL-terminated string,
// `out` a valid pointer. Free the result with [`refdom_string_free`].
enum RefdomStatus refdom_session_process(struct RefdomSession *session,
                                         const char *text,
                                         char **out);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void refdom_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REFDOM_H */
