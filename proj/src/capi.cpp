#include "otfsidet.h"

#include <cstring>
#include <string>

#include "experiment.hpp"
#include "json.hpp"

using oi::ExperimentConfig;
using oi::RunResult;

struct oi_config {
    ExperimentConfig cfg;
};

struct oi_result {
    std::string payload;
    std::string kind;
    bool ok = true;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
oi_status run_command(const oi_config* cfg, oi_result** out, F&& runner) {
    if (!cfg || !out) return OI_E_INVALID_ARG;
    *out = nullptr;
    try {
        RunResult r = runner(cfg->cfg);
        auto* res = new oi_result{std::move(r.payload), std::move(r.kind), r.ok};
        *out = res;
        if (!r.ok) {
            set_error("run completed with failures; see payload");
            // distinguish infeasible designs from failed validation checks
            if (res->payload.find("infeasible") != std::string::npos)
                return OI_E_INFEASIBLE;
            return OI_E_VALIDATION;
        }
        return OI_OK;
    } catch (const oi::InfeasibleError& e) {
        set_error(e.what());
        return OI_E_INFEASIBLE;
    } catch (const nlohmann::json::exception& e) {
        set_error(e.what());
        return OI_E_PARSE;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return OI_E_CONFIG;
    } catch (const std::exception& e) {
        set_error(e.what());
        return OI_E_RUNTIME;
    }
}

}  // namespace

extern "C" {

const char* oi_version(void) { return "0.1.0"; }

const char* oi_status_message(oi_status status) {
    switch (status) {
        case OI_OK: return "ok";
        case OI_E_INVALID_ARG: return "invalid argument";
        case OI_E_PARSE: return "parse error";
        case OI_E_CONFIG: return "invalid configuration";
        case OI_E_INFEASIBLE: return "infeasible design problem";
        case OI_E_VALIDATION: return "validation failed";
        case OI_E_RUNTIME: return "runtime error";
        case OI_E_IO: return "i/o error";
    }
    return "unknown status";
}

const char* oi_last_error(void) { return g_last_error.c_str(); }

oi_status oi_config_create(oi_config** out) {
    if (!out) return OI_E_INVALID_ARG;
    *out = new oi_config{};
    return OI_OK;
}

oi_status oi_config_from_json(const char* json_text, oi_config** out) {
    if (!json_text || !out) return OI_E_INVALID_ARG;
    *out = nullptr;
    try {
        auto cfg = ExperimentConfig::from_json(json_text);
        cfg.validate();
        *out = new oi_config{std::move(cfg)};
        return OI_OK;
    } catch (const nlohmann::json::exception& e) {
        set_error(e.what());
        return OI_E_PARSE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return OI_E_CONFIG;
    }
}

oi_status oi_config_set_seed(oi_config* cfg, uint64_t seed) {
    if (!cfg) return OI_E_INVALID_ARG;
    cfg->cfg.seed = seed;
    return OI_OK;
}

oi_status oi_config_set_threads(oi_config* cfg, int threads) {
    if (!cfg || threads < 1) return OI_E_INVALID_ARG;
    cfg->cfg.threads = threads;
    return OI_OK;
}

oi_status oi_config_set_trials(oi_config* cfg, int64_t trials) {
    if (!cfg || trials < 1) return OI_E_INVALID_ARG;
    cfg->cfg.trials = trials;
    return OI_OK;
}

oi_status oi_config_to_json(const oi_config* cfg, char** out) {
    if (!cfg || !out) return OI_E_INVALID_ARG;
    *out = dup_string(cfg->cfg.to_json());
    return OI_OK;
}

oi_status oi_config_hash(const oi_config* cfg, uint64_t* out) {
    if (!cfg || !out) return OI_E_INVALID_ARG;
    *out = cfg->cfg.config_hash();
    return OI_OK;
}

void oi_config_free(oi_config* cfg) { delete cfg; }

oi_status oi_run_design(const oi_config* cfg, oi_result** out) {
    return run_command(cfg, out, oi::run_design);
}

oi_status oi_run_sweep(const oi_config* cfg, oi_result** out) {
    return run_command(cfg, out, oi::run_sweep);
}

oi_status oi_run_validate(const oi_config* cfg, oi_result** out) {
    return run_command(cfg, out, oi::run_validate);
}

oi_status oi_run_compare(const oi_config* cfg, oi_result** out) {
    return run_command(cfg, out, oi::run_compare);
}

oi_status oi_run_channel_gen(const oi_config* cfg, oi_result** out) {
    return run_command(cfg, out, oi::run_channel_gen);
}

const char* oi_result_payload(const oi_result* res) {
    return res ? res->payload.c_str() : "";
}

const char* oi_result_kind(const oi_result* res) {
    return res ? res->kind.c_str() : "";
}

int oi_result_ok(const oi_result* res) { return res && res->ok ? 1 : 0; }

void oi_result_free(oi_result* res) { delete res; }

void oi_string_free(char* s) { delete[] s; }

}  // extern "C"
