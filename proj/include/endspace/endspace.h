/* C interface to the endspace engine.
 *
 * Handles are opaque; every call returns an es_status. On failure the
 * message of the last error on the calling thread is available from
 * es_last_error() until the next failing call on that thread. Strings
 * returned through out-parameters are owned by the caller and released with
 * es_free().
 */
#ifndef ENDSPACE_ENDSPACE_H
#define ENDSPACE_ENDSPACE_H

#include <stddef.h>

#if defined(_WIN32)
#define ES_API __declspec(dllexport)
#else
#define ES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum es_status {
  ES_OK = 0,
  ES_NEGATIVE = 1,           /* mathematically negative answer with certificate */
  ES_BUDGET_EXCEEDED = 2,    /* undecided within the search limits */
  ES_USAGE_ERROR = 3,        /* bad command, option or argument */
  ES_PARSE_ERROR = 4,        /* presentation or vertex-set text */
  ES_VALIDATION_ERROR = 5,   /* well-formed but invalid presentation */
  ES_CONSISTENCY_ERROR = 6,  /* an internal certificate check failed */
  ES_INTERNAL_ERROR = 7
} es_status;

typedef struct es_presentation es_presentation;

ES_API const char* es_version(void);

/* Message of the last failure on this thread; "" when none. */
ES_API const char* es_last_error(void);
/* 1-based position of the last parse error; 0 when unknown. */
ES_API size_t es_last_error_line(void);
ES_API size_t es_last_error_column(void);

ES_API es_status es_presentation_parse(const char* text, size_t length, es_presentation** out);
ES_API void es_presentation_destroy(es_presentation* p);
ES_API es_status es_presentation_serialize(const es_presentation* p, char** out);
/* Lower-case hex SHA-256 of the canonical serialization. */
ES_API es_status es_presentation_digest(const es_presentation* p, char** out);

/* Runs one command ("analyze", "ends", "limit-edges", "necklace",
 * "starcomb", "rank", "dichotomy", "dichromatic", "dominates",
 * "directions", "dot") with options given as a JSON object (NULL for none).
 * *report_json receives the report, also on ES_NEGATIVE and on most errors;
 * *dot (when dot is non-NULL) receives a DOT drawing for the "dot" command or
 * when the options set "dot": true, and NULL otherwise. */
ES_API es_status es_run(const es_presentation* p, const char* command, const char* options_json,
                        char** report_json, char** dot);

ES_API void es_free(void* ptr);

#ifdef __cplusplus
}
#endif

#endif
