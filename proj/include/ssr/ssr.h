/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The ssrkit Authors
 *
 * C interface of libssr. Structured values cross the boundary as UTF-8 JSON
 * text. Strings returned through `char** out` are owned by the caller and
 * must be released with ssr_string_free. On failure a function returns a
 * non-zero status and ssr_last_error() describes the problem; `*out` is left
 * NULL.
 */
#ifndef SSR_SSR_H
#define SSR_SSR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSR_BUILDING_LIBRARY)
#    define SSR_API __declspec(dllexport)
#  else
#    define SSR_API __declspec(dllimport)
#  endif
#else
#  define SSR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssr_status {
  SSR_OK = 0,
  SSR_ERR_INVALID_ARGUMENT = 1,
  SSR_ERR_MALFORMED = 2,     /* input does not match the expected format */
  SSR_ERR_VALIDATION = 3,    /* well-formed input breaking a domain rule */
  SSR_ERR_MISSING_GOLD = 4,  /* scoring needs a gold label */
  SSR_ERR_TRANSPORT = 5,
  SSR_ERR_PROVIDER = 6,
  SSR_ERR_IO = 7,
  SSR_ERR_INTERNAL = 8
} ssr_status;

SSR_API const char* ssr_version(void);
SSR_API const char* ssr_status_name(ssr_status status);
/* Message of the last failure on the calling thread; never NULL. */
SSR_API const char* ssr_last_error(void);
SSR_API void ssr_string_free(char* s);

/* Receives one line (no trailing newline) of streamed output. */
typedef void (*ssr_line_fn)(const char* line, void* user);

/* ---- graphs ---------------------------------------------------------- */

typedef struct ssr_graph ssr_graph;

SSR_API ssr_status ssr_graph_load(const char* tag_json, size_t len, ssr_graph** out);
SSR_API void ssr_graph_free(ssr_graph* g);
SSR_API size_t ssr_graph_node_count(const ssr_graph* g);
SSR_API size_t ssr_graph_edge_count(const ssr_graph* g);
SSR_API size_t ssr_graph_task_count(const ssr_graph* g);
SSR_API ssr_status ssr_graph_serialize(const ssr_graph* g, char** out);
/* {"context": subgraph, "texts": {...}} around the given central ids. */
SSR_API ssr_status ssr_graph_extract(const ssr_graph* g, const uint64_t* central, size_t n_central,
                                     unsigned hops, size_t max_nodes, char** out);
/* One instance line per task in the document, ids "task-<i>". */
SSR_API ssr_status ssr_graph_instances(const ssr_graph* g, unsigned hops, size_t max_nodes, ssr_line_fn fn,
                                       void* user);

/* ---- prompts and traces ---------------------------------------------- */

/* template_dir may be NULL. Output: {"text", "manifest":[{"name","offset","length"}]}. */
SSR_API ssr_status ssr_render_prompt(const char* instance_json, size_t sample_count, const char* template_dir,
                                     char** out);
/* request: {"a": subgraph, "b": subgraph, "texts": {...}}. */
SSR_API ssr_status ssr_render_diversity_prompt(const char* request_json, const char* template_dir, char** out);
/* Output: {"trace": ..., "defects": [...]}. Never fails on completion text. */
SSR_API ssr_status ssr_parse_trace(const char* completion, size_t len, size_t expected_k, char** out);
SSR_API ssr_status ssr_format_trace(const char* trace_json, char** out);
/* *found = 0 when the text holds no number. */
SSR_API ssr_status ssr_parse_distance_score(const char* completion, size_t len, int* found, double* value,
                                            int* clamped);

/* ---- scoring ---------------------------------------------------------- */

/* Bodies follow the /v1/verify and /v1/score wire schemas. */
SSR_API ssr_status ssr_verify(const char* request_json, char** out);
SSR_API ssr_status ssr_score(const char* request_json, char** out);
SSR_API ssr_status ssr_reward_r1(int real, int consist, int ans, double* out);
SSR_API ssr_status ssr_group_advantages(const double* rewards, size_t n, double* out);
SSR_API ssr_status ssr_grpo_objective(const double* ratios, const double* advantages, const double* kl, size_t n,
                                      double epsilon, double beta, double* out);

/* ---- pipelines ------------------------------------------------------- */
/* Inputs are JSONL instance streams; options are JSON objects documented in
 * the README. Records are streamed through `fn` in input order. */

SSR_API ssr_status ssr_synth_sft(const char* instances_jsonl, const char* options_json, ssr_line_fn fn,
                                 void* user);
SSR_API ssr_status ssr_assess_difficulty(const char* instances_jsonl, const char* options_json, ssr_line_fn fn,
                                         void* user);
/* Pool lines carry a "tier" field; selected lines are streamed, the
 * allocation report is returned in *report. */
SSR_API ssr_status ssr_build_rl(const char* pool_jsonl, const char* options_json, ssr_line_fn fn, void* user,
                                char** report);
SSR_API ssr_status ssr_eval(const char* instances_jsonl, const char* options_json, char** out);
SSR_API ssr_status ssr_lambda_sweep(const char* instances_jsonl, const char* options_json, char** out);
SSR_API ssr_status ssr_planted_suite(size_t n_tasks, uint64_t seed, ssr_line_fn fn, void* user);

/* ---- reward service ---------------------------------------------------- */

typedef struct ssr_server ssr_server;

SSR_API ssr_status ssr_server_create(const char* host, int port, size_t threads, ssr_server** out);
/* Binds the socket; port 0 picks a free one, reported in *bound_port. */
SSR_API ssr_status ssr_server_bind(ssr_server* s, int* bound_port);
/* Blocks until ssr_server_stop is called from another thread. */
SSR_API ssr_status ssr_server_serve(ssr_server* s);
SSR_API void ssr_server_stop(ssr_server* s);
SSR_API void ssr_server_free(ssr_server* s);

#ifdef __cplusplus
}
#endif

#endif /* SSR_SSR_H */
