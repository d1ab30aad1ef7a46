/*
 * otfsidet - delay-Doppler data+energy waveform design library.
 *
 * C interface to the experiment runner: opaque handles, integer status
 * codes, string payloads (JSON or CSV). All functions are thread-safe as
 * long as each handle is used from one thread at a time. Strings returned
 * through `char**` out-parameters are owned by the caller and must be freed
 * with oi_string_free; `const char*` accessors stay valid until the owning
 * handle is freed.
 */

#ifndef OTFSIDET_H
#define OTFSIDET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct oi_config oi_config;
typedef struct oi_result oi_result;

typedef enum oi_status {
    OI_OK = 0,
    OI_E_INVALID_ARG = 1, /* null pointer or out-of-range argument */
    OI_E_PARSE = 2,       /* malformed JSON */
    OI_E_CONFIG = 3,      /* configuration violates an invariant */
    OI_E_INFEASIBLE = 4,  /* design problem has no feasible point */
    OI_E_VALIDATION = 5,  /* validation checks failed */
    OI_E_RUNTIME = 6,     /* internal failure; see oi_last_error */
    OI_E_IO = 7           /* file could not be read or written */
} oi_status;

const char* oi_version(void);
const char* oi_status_message(oi_status status);

/* Most recent error detail for the calling thread (empty string if none). */
const char* oi_last_error(void);

/* --- configuration ------------------------------------------------------ */

/* New configuration with the default simulation parameters. */
oi_status oi_config_create(oi_config** out);

/* Parse a configuration from JSON text; unknown keys are rejected only by
 * schema_version, absent keys keep their defaults. */
oi_status oi_config_from_json(const char* json_text, oi_config** out);

oi_status oi_config_set_seed(oi_config* cfg, uint64_t seed);
oi_status oi_config_set_threads(oi_config* cfg, int threads);
oi_status oi_config_set_trials(oi_config* cfg, int64_t trials);

/* Canonical JSON form (caller frees with oi_string_free). */
oi_status oi_config_to_json(const oi_config* cfg, char** out);

/* Stable hash of the canonical configuration. */
oi_status oi_config_hash(const oi_config* cfg, uint64_t* out);

void oi_config_free(oi_config* cfg);

/* --- experiment runs ----------------------------------------------------- */

/* Each runner validates the configuration, executes, and returns a result
 * handle carrying a text payload. Runs are deterministic for a fixed seed. */
oi_status oi_run_design(const oi_config* cfg, oi_result** out);
oi_status oi_run_sweep(const oi_config* cfg, oi_result** out);
oi_status oi_run_validate(const oi_config* cfg, oi_result** out);
oi_status oi_run_compare(const oi_config* cfg, oi_result** out);
oi_status oi_run_channel_gen(const oi_config* cfg, oi_result** out);

/* Payload text (JSON or CSV); owned by the result handle. */
const char* oi_result_payload(const oi_result* res);

/* "json" or "csv". */
const char* oi_result_kind(const oi_result* res);

/* 1 when the run fully succeeded (all validation checks passed, no
 * infeasible cells errored out), else 0. */
int oi_result_ok(const oi_result* res);

void oi_result_free(oi_result* res);

void oi_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OTFSIDET_H */
