#ifndef RBMX_H
#define RBMX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define RBMX_API __attribute__((visibility("default")))
#else
#define RBMX_API
#endif

/* Error codes of the core, in order, then API-level codes. */
typedef enum rbmx_status {
  RBMX_OK = 0,
  RBMX_ERR_MALFORMED_SYSTEM,
  RBMX_ERR_INCONSISTENT_SYSTEM,
  RBMX_ERR_UNKNOWN_VARIABLE,
  RBMX_ERR_DOMAIN_MISMATCH,
  RBMX_ERR_BAD_PARTITION,
  RBMX_ERR_MISSING_INIT,
  RBMX_ERR_VARIABLE_SET_MISMATCH,
  RBMX_ERR_INVALID_NETWORK,
  RBMX_ERR_NOT_A_TREE,
  RBMX_ERR_NO_TRANSITION,
  RBMX_ERR_INCOMPATIBLE_INITIALS,
  RBMX_ERR_NONDETERMINISTIC_JOIN,
  RBMX_ERR_CAP_EXCEEDED,
  RBMX_ERR_SYNTAX,
  RBMX_ERR_UNDECLARED_VARIABLE,
  RBMX_ERR_MISSING_OBSERVATION,
  RBMX_ERR_UNKNOWN_DISTRIBUTION,
  RBMX_ERR_NOT_INCREMENTAL,
  RBMX_ERR_GUARD_NOT_BOOLEAN,
  RBMX_ERR_INVALID_INPUT,
  RBMX_ERR_ARGUMENT = 100, /* null pointer, wrong model kind, unknown option */
  RBMX_ERR_OUT_OF_MEMORY,
  RBMX_ERR_INTERNAL
} rbmx_status;

typedef enum rbmx_kind {
  RBMX_KIND_SYSTEM,
  RBMX_KIND_NETWORK,
  RBMX_KIND_AUTOMATON,
  RBMX_KIND_SPA,
  RBMX_KIND_PA,
  RBMX_KIND_FACTOR_GRAPH,
  RBMX_KIND_PROGRAM
} rbmx_kind;

/* Immutable model of one kind. */
typedef struct rbmx_model rbmx_model;

/* Message of the last failed call on this thread; empty after success. */
RBMX_API const char* rbmx_last_error(void);
RBMX_API const char* rbmx_status_name(rbmx_status s);
/* Strings returned through char** are owned by the caller. */
RBMX_API void rbmx_string_free(char* s);

/* Any JSON model (field "kind"; objects with "omega" are systems). */
RBMX_API rbmx_status rbmx_model_from_json(const char* json, rbmx_model** out);
RBMX_API rbmx_status rbmx_program_parse(const char* text, rbmx_model** out);
RBMX_API rbmx_status rbmx_model_kind(const rbmx_model* m, rbmx_kind* out);
RBMX_API rbmx_status rbmx_model_to_json(const rbmx_model* m, char** out);
/* Networks and factor graphs; programs render their factor graph. */
RBMX_API rbmx_status rbmx_model_to_dot(const rbmx_model* m, char** out);
RBMX_API void rbmx_model_free(rbmx_model* m);

/* mode: "static" (obs_json: object of observed values, may be NULL),
   "graph", "dynamic". cap = 0 selects the default. */
RBMX_API rbmx_status rbmx_elaborate(const rbmx_model* program, const char* mode, const char* obs_json,
                                    size_t cap, rbmx_model** out);

/* Factor graph of a program or of a system list. */
RBMX_API rbmx_status rbmx_factor_graph(const rbmx_model* m, rbmx_model** out);
/* root may be NULL. Accepts programs and factor graphs. */
RBMX_API rbmx_status rbmx_fg_to_bn(const rbmx_model* m, const char* root, rbmx_model** out);

/* Systems: parallel composition. Automata: synchronized product with algebra
   "equality" or "conjunction". SPA: synchronized product. PA: sigma "n/d". */
RBMX_API rbmx_status rbmx_compose(const rbmx_model* a, const rbmx_model* b, const char* algebra,
                                  const char* sigma, rbmx_model** out);
RBMX_API rbmx_status rbmx_compress(const rbmx_model* system, rbmx_model** out);
/* vars: comma-separated names. */
RBMX_API rbmx_status rbmx_marginal(const rbmx_model* system, const char* vars, rbmx_model** out);
RBMX_API rbmx_status rbmx_equivalent(const rbmx_model* a, const rbmx_model* b, int* out);
/* JSON {"consistent", "mass", "omega_c"}. */
RBMX_API rbmx_status rbmx_consistency(const rbmx_model* system, char** out);

/* mode: "outer", "inner", "likelihood", "polarized" (blocks from the system
   JSON). Result "n/d". */
RBMX_API rbmx_status rbmx_eval(const rbmx_model* system, const char* query, const char* mode, char** out);

/* Systems: `steps` draws. Networks: `steps` samples, input = init valuation.
   Automata: input = JSON array of actions. Programs: `steps` instants, input =
   observation trace as JSON lines. resolver: "lex" or "uniform". A program run
   that stops early still fills *out and returns the stopping error. */
RBMX_API rbmx_status rbmx_sample(const rbmx_model* m, size_t steps, uint64_t seed, const char* input,
                                 const char* resolver, char** out);

/* Network score of a total state (JSON object). Result {"value", "factors"}. */
RBMX_API rbmx_status rbmx_score(const rbmx_model* network, const char* state_json, char** out);
/* Violations of a network as a JSON array. */
RBMX_API rbmx_status rbmx_validate(const rbmx_model* network, char** out);

/* Automata (programs elaborate dynamically), SPA or PA pairs. *holds is 1 when
   b simulates a (bisimilar when bisim != 0). Verdict JSON in *out. */
RBMX_API rbmx_status rbmx_simcheck(const rbmx_model* a, const rbmx_model* b, int bisim, int* holds, char** out);

/* which: "spa2ma", "pa2ma", "ma2spa", "spa2pa". note (may be NULL) receives a
   one-line description of the construction. */
RBMX_API rbmx_status rbmx_embed(const rbmx_model* m, const char* which, size_t cap, rbmx_model** out,
                                char** note);

#ifdef __cplusplus
}
#endif

#endif
