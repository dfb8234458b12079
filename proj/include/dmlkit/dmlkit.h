/* C interface to the dmlkit metadata pipeline.
 *
 * Every function returns a dmlkit_status. On failure a description of the
 * last error on the calling thread is available from dmlkit_last_error().
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching *_free function. Strings returned by getters
 * stay valid until the owning object is freed.
 */
#ifndef DMLKIT_H
#define DMLKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DMLKIT_API __declspec(dllexport)
#else
#define DMLKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmlkit_status {
  DMLKIT_OK = 0,
  DMLKIT_E_INVALID_ARGUMENT = 1,
  DMLKIT_E_IO = 2,
  DMLKIT_E_PARSE = 3,
  DMLKIT_E_TRANSPORT = 4,
  DMLKIT_E_PROTOCOL = 5,
  DMLKIT_E_VALIDATION = 6,
  DMLKIT_E_NOT_FOUND = 7,
  DMLKIT_E_INTERNAL = 8
} dmlkit_status;

typedef struct dmlkit_config dmlkit_config;
typedef struct dmlkit_report dmlkit_report;
typedef struct dmlkit_fixture_server dmlkit_fixture_server;
typedef struct dmlkit_citation dmlkit_citation;

DMLKIT_API const char* dmlkit_version(void);
/* Message of the last failed call on this thread, "" if none. */
DMLKIT_API const char* dmlkit_last_error(void);
DMLKIT_API const char* dmlkit_status_name(dmlkit_status status);

/* ---- configuration ---------------------------------------------------- */

DMLKIT_API dmlkit_status dmlkit_config_new(dmlkit_config** out);
DMLKIT_API dmlkit_status dmlkit_config_load(const char* path, dmlkit_config** out);
/* Keys: spool_dir, store, enriched_store, mr_table, totals, output_dir,
 * request_delay_ms, max_retries. */
DMLKIT_API dmlkit_status dmlkit_config_set(dmlkit_config* cfg, const char* key, const char* value);
/* Appends an endpoint; set_spec, from and until may be NULL. */
DMLKIT_API dmlkit_status dmlkit_config_add_endpoint(dmlkit_config* cfg, const char* name, const char* base_url,
                                                    const char* metadata_prefix, const char* set_spec,
                                                    const char* from, const char* until);
DMLKIT_API size_t dmlkit_config_endpoint_count(const dmlkit_config* cfg);
DMLKIT_API void dmlkit_config_free(dmlkit_config* cfg);

/* ---- reports ------------------------------------------------------------ */

/* 0 success, 1 partial failure, 2 usage or configuration error. */
DMLKIT_API int dmlkit_report_exit_code(const dmlkit_report* report);
/* Summary and warnings; details too when verbose is nonzero. */
DMLKIT_API const char* dmlkit_report_text(dmlkit_report* report, int verbose);
DMLKIT_API const char* dmlkit_report_json(const dmlkit_report* report);
DMLKIT_API size_t dmlkit_report_warning_count(const dmlkit_report* report);
DMLKIT_API void dmlkit_report_free(dmlkit_report* report);

/* ---- pipeline commands ------------------------------------------------ */

/* names may be NULL when count is 0, meaning every endpoint. */
DMLKIT_API dmlkit_status dmlkit_harvest(const dmlkit_config* cfg, const char* const* names, size_t count,
                                        dmlkit_report** out);
DMLKIT_API dmlkit_status dmlkit_transform(const dmlkit_config* cfg, dmlkit_report** out);
DMLKIT_API dmlkit_status dmlkit_enrich(const dmlkit_config* cfg, dmlkit_report** out);

typedef struct dmlkit_export_options {
  const char* format;      /* "eprints", "ore" or "mets" */
  const char* name;        /* ORE aggregation name, NULL for default */
  const char* title;       /* ORE aggregation title, NULL for default */
  const char* portal_base; /* ORE resource map base URI, NULL for default */
  const char* deposit_url; /* METS deposit target, NULL for none */
} dmlkit_export_options;

DMLKIT_API dmlkit_status dmlkit_export(const dmlkit_config* cfg, const dmlkit_export_options* options,
                                       dmlkit_report** out);

/* Either path may be NULL: totals then comes from the config, counts from
 * the store. */
DMLKIT_API dmlkit_status dmlkit_stats(const dmlkit_config* cfg, const char* totals_path, const char* counts_path,
                                      dmlkit_report** out);

typedef enum dmlkit_hits_convention { DMLKIT_HITS_DEFAULT = 0, DMLKIT_HITS_KLEINBERG = 1 } dmlkit_hits_convention;

typedef struct dmlkit_hits_options {
  int from_year;
  int to_year;
  int window;               /* 0 means 10 */
  const char* const* nodes; /* two-digit MSC fields, may be NULL */
  size_t node_count;
  dmlkit_hits_convention convention;
  int exclude_self_loops;
} dmlkit_hits_options;

DMLKIT_API dmlkit_status dmlkit_hits(const dmlkit_config* cfg, const dmlkit_hits_options* options,
                                     dmlkit_report** out);

/* ---- fixture endpoint ------------------------------------------------- */

/* Serves the *.xml fixtures in dir over OAI-PMH. port 0 picks a free port. */
DMLKIT_API dmlkit_status dmlkit_fixture_server_start(const char* dir, size_t page_size, const char* host, int port,
                                                     dmlkit_fixture_server** out);
DMLKIT_API int dmlkit_fixture_server_port(const dmlkit_fixture_server* server);
DMLKIT_API const char* dmlkit_fixture_server_url(const dmlkit_fixture_server* server);
DMLKIT_API size_t dmlkit_fixture_server_requests(const dmlkit_fixture_server* server);
DMLKIT_API void dmlkit_fixture_server_stop(dmlkit_fixture_server* server);
DMLKIT_API void dmlkit_fixture_server_free(dmlkit_fixture_server* server);

/* ---- primitives ----------------------------------------------------------- */

DMLKIT_API dmlkit_status dmlkit_parse_citation(const char* text, dmlkit_citation** out);
/* Empty string when the component is absent. */
DMLKIT_API const char* dmlkit_citation_journal(const dmlkit_citation* c);
DMLKIT_API const char* dmlkit_citation_volume(const dmlkit_citation* c);
DMLKIT_API const char* dmlkit_citation_issue(const dmlkit_citation* c);
/* 0 when absent. */
DMLKIT_API int dmlkit_citation_year(const dmlkit_citation* c);
DMLKIT_API unsigned dmlkit_citation_spage(const dmlkit_citation* c);
DMLKIT_API unsigned dmlkit_citation_epage(const dmlkit_citation* c);
DMLKIT_API void dmlkit_citation_free(dmlkit_citation* c);

/* HITS on a row-major n x n weight matrix. hub and authority receive n
 * values each. non_unique may be NULL. */
DMLKIT_API dmlkit_status dmlkit_hits_dense(const double* weights, size_t n, dmlkit_hits_convention convention,
                                           double* hub, double* authority, int* non_unique);

/* floor(10000 * count / total), i.e. the share in hundredths of a percent. */
DMLKIT_API dmlkit_status dmlkit_field_share_basis_points(uint64_t count, uint64_t total, uint64_t* out);

#ifdef __cplusplus
}
#endif

#endif /* DMLKIT_H */
