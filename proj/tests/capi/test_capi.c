/* Plain C client of the shared library: every call goes through rbmx.h. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "rbmx/rbmx.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* kSab =
    "{\"kind\":\"system\",\"domains\":{\"AB\":[\"a\",\"b\"]},"
    "\"vars\":[{\"name\":\"x\",\"domain\":\"AB\"}],\"omega\":[\"w1\",\"w2\"],"
    "\"pi\":{\"w1\":\"1/2\",\"w2\":\"1/2\"},"
    "\"rel\":[[\"w1\",{\"x\":\"a\"}],[\"w2\",{\"x\":\"a\"}],[\"w2\",{\"x\":\"b\"}]]}";

static const char* kCounter =
    "domain Z4 = 0..3\n"
    "var x : Z4\n"
    "fun inc : Z4 -> Z4 = {0 -> 1, 1 -> 2, 2 -> 3, 3 -> 0}\n"
    "init x = 0\n"
    "|| x = inc(pre x)\n";

static int eval_is(const rbmx_model* s, const char* query, const char* mode, const char* want) {
  char* out = NULL;
  int ok = rbmx_eval(s, query, mode, &out) == RBMX_OK && out && strcmp(out, want) == 0;
  if (!ok) fprintf(stderr, "eval %s %s: got %s, want %s\n", mode, query, out ? out : rbmx_last_error(), want);
  rbmx_string_free(out);
  return ok;
}

int main(void) {
  rbmx_model* sab = NULL;
  EXPECT(rbmx_model_from_json(kSab, &sab) == RBMX_OK);
  rbmx_kind kind;
  EXPECT(rbmx_model_kind(sab, &kind) == RBMX_OK && kind == RBMX_KIND_SYSTEM);
  EXPECT(eval_is(sab, "x=a", "outer", "1/1"));
  EXPECT(eval_is(sab, "x=b", "outer", "1/2"));
  EXPECT(eval_is(sab, "x=b", "inner", "1/2"));
  EXPECT(eval_is(sab, "x=a", "inner", "1/1"));

  rbmx_model* twice = NULL;
  EXPECT(rbmx_compose(sab, sab, NULL, NULL, &twice) == RBMX_OK);
  int same = 0;
  EXPECT(rbmx_equivalent(twice, twice, &same) == RBMX_OK && same == 1);

  char* json = NULL;
  EXPECT(rbmx_model_to_json(sab, &json) == RBMX_OK && strstr(json, "\"omega\"") != NULL);
  rbmx_model* back = NULL;
  EXPECT(rbmx_model_from_json(json, &back) == RBMX_OK);
  EXPECT(rbmx_equivalent(sab, back, &same) == RBMX_OK && same == 1);
  rbmx_string_free(json);

  /* Errors carry a status and a message. */
  rbmx_model* bad = NULL;
  EXPECT(rbmx_model_from_json("{\"kind\":", &bad) == RBMX_ERR_INVALID_INPUT);
  EXPECT(bad == NULL);
  EXPECT(strlen(rbmx_last_error()) > 0);
  EXPECT(rbmx_program_parse("var x : bool\nx = pre pre x\n", &bad) == RBMX_ERR_SYNTAX);
  EXPECT(strcmp(rbmx_status_name(RBMX_ERR_SYNTAX), "SyntaxError") == 0);
  EXPECT(rbmx_eval(NULL, "x=a", "outer", &json) == RBMX_ERR_ARGUMENT);
  EXPECT(rbmx_eval(sab, "x=a", "sideways", &json) == RBMX_ERR_ARGUMENT);

  /* Programs: elaborate, run and self-simulate. */
  rbmx_model* counter = NULL;
  EXPECT(rbmx_program_parse(kCounter, &counter) == RBMX_OK);
  rbmx_model* automaton = NULL;
  EXPECT(rbmx_elaborate(counter, "dynamic", NULL, 0, &automaton) == RBMX_OK);
  EXPECT(rbmx_model_kind(automaton, &kind) == RBMX_OK && kind == RBMX_KIND_AUTOMATON);
  int holds = 0;
  char* verdict = NULL;
  EXPECT(rbmx_simcheck(automaton, automaton, 0, &holds, &verdict) == RBMX_OK && holds == 1);
  rbmx_string_free(verdict);

  char* run1 = NULL;
  char* run2 = NULL;
  EXPECT(rbmx_sample(counter, 5, 7, NULL, "lex", &run1) == RBMX_OK);
  EXPECT(rbmx_sample(counter, 5, 7, NULL, "lex", &run2) == RBMX_OK);
  EXPECT(run1 && run2 && strcmp(run1, run2) == 0);
  rbmx_string_free(run1);
  rbmx_string_free(run2);

  rbmx_model* spa = NULL;
  char* note = NULL;
  EXPECT(rbmx_embed(automaton, "ma2spa", 0, &spa, &note) == RBMX_OK);
  EXPECT(rbmx_model_kind(spa, &kind) == RBMX_OK && kind == RBMX_KIND_SPA);
  EXPECT(note && strlen(note) > 0);
  rbmx_string_free(note);

  rbmx_model_free(spa);
  rbmx_model_free(automaton);
  rbmx_model_free(counter);
  rbmx_model_free(back);
  rbmx_model_free(twice);
  rbmx_model_free(sab);
  rbmx_model_free(NULL);

  if (failures) {
    fprintf(stderr, "%d failure(s)\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
