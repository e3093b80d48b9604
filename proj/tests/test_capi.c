/* Exercises the C interface from C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "endspace/endspace.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static char* slurp(const char* path, size_t* length) {
  FILE* f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  char* text = malloc((size_t)n + 1);
  *length = fread(text, 1, (size_t)n, f);
  text[*length] = '\0';
  fclose(f);
  return text;
}

static es_presentation* load(const char* name) {
  char path[1024];
  size_t length = 0;
  snprintf(path, sizeof path, "%s/%s.pres", ENDSPACE_CORPUS_DIR, name);
  char* text = slurp(path, &length);
  EXPECT(text != NULL);
  if (!text) return NULL;
  es_presentation* p = NULL;
  EXPECT(es_presentation_parse(text, length, &p) == ES_OK);
  free(text);
  return p;
}

static void test_analyze(void) {
  es_presentation* p = load("ladder");
  if (!p) return;
  char* report = NULL;
  char* dot = NULL;
  EXPECT(es_run(p, "analyze", NULL, &report, &dot) == ES_OK);
  EXPECT(report != NULL && strstr(report, "\"limit_edges\"") != NULL);
  es_free(report);
  es_free(dot);

  report = NULL;
  dot = NULL;
  EXPECT(es_run(p, "necklace", "{\"u\": [\"top\"], \"beads\": 5, \"dot\": true}", &report, &dot) == ES_OK);
  EXPECT(dot != NULL && strstr(dot, "cluster_bead_4") != NULL);
  es_free(report);
  es_free(dot);

  report = NULL;
  EXPECT(es_run(p, "no-such-command", NULL, &report, NULL) == ES_USAGE_ERROR);
  EXPECT(strlen(es_last_error()) > 0);
  es_free(report);
  es_presentation_destroy(p);
}

static void test_negative(void) {
  es_presentation* p = load("subdivided_ladder");
  if (!p) return;
  char* report = NULL;
  EXPECT(es_run(p, "necklace", "{\"u\": [\"subdividers\"]}", &report, NULL) == ES_NEGATIVE);
  EXPECT(report != NULL);
  es_free(report);
  es_presentation_destroy(p);
}

static void test_digest(void) {
  es_presentation* p = load("ladder");
  if (!p) return;
  char* text = NULL;
  char* digest = NULL;
  EXPECT(es_presentation_serialize(p, &text) == ES_OK);
  EXPECT(es_presentation_digest(p, &digest) == ES_OK);
  EXPECT(digest != NULL && strlen(digest) == 64);

  es_presentation* q = NULL;
  EXPECT(es_presentation_parse(text, strlen(text), &q) == ES_OK);
  char* again = NULL;
  EXPECT(es_presentation_digest(q, &again) == ES_OK);
  EXPECT(again != NULL && digest != NULL && strcmp(digest, again) == 0);
  es_free(text);
  es_free(digest);
  es_free(again);
  es_presentation_destroy(q);
  es_presentation_destroy(p);
}

static void test_parse_error(void) {
  const char* text = "block: a\na -> b\n";
  es_presentation* p = NULL;
  es_status s = es_presentation_parse(text, strlen(text), &p);
  EXPECT(s == ES_PARSE_ERROR || s == ES_VALIDATION_ERROR);
  EXPECT(p == NULL);
  EXPECT(es_last_error_line() == 2);
  EXPECT(es_last_error_column() > 0);
  EXPECT(strlen(es_last_error()) > 0);
  EXPECT(strlen(es_version()) > 0);
}

int main(void) {
  test_analyze();
  test_negative();
  test_digest();
  test_parse_error();
  if (failures) fprintf(stderr, "%d failures\n", failures);
  return failures ? 1 : 0;
}
