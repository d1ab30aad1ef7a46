#include <cstring>
#include <string>

#include "doctest.h"
#include "otfsidet.h"

namespace {

const char* kSmallConfig = R"({
  "n_slots": 6, "m_subcarriers": 6,
  "r_min": 12.0, "l_max": 4,
  "realizations": 1, "seed": 11, "trials": 2000,
  "sweep_r_min": [12.0], "sweep_lambda": [0.1],
  "sweep_err_var": [0.0], "sweep_speed_kmph": [300.0]
})";

}  // namespace

TEST_CASE("version and status strings") {
    CHECK(std::string(oi_version()) == "0.1.0");
    CHECK(std::string(oi_status_message(OI_OK)) == "ok");
    CHECK(std::strlen(oi_status_message(OI_E_INFEASIBLE)) > 0);
}

TEST_CASE("config lifecycle and argument validation") {
    CHECK(oi_config_create(nullptr) == OI_E_INVALID_ARG);

    oi_config* cfg = nullptr;
    REQUIRE(oi_config_create(&cfg) == OI_OK);
    REQUIRE(cfg != nullptr);

    CHECK(oi_config_set_seed(nullptr, 1) == OI_E_INVALID_ARG);
    CHECK(oi_config_set_threads(cfg, 0) == OI_E_INVALID_ARG);
    CHECK(oi_config_set_trials(cfg, -5) == OI_E_INVALID_ARG);
    CHECK(oi_config_set_seed(cfg, 123) == OI_OK);
    CHECK(oi_config_set_threads(cfg, 2) == OI_OK);
    CHECK(oi_config_set_trials(cfg, 1000) == OI_OK);

    char* json = nullptr;
    REQUIRE(oi_config_to_json(cfg, &json) == OI_OK);
    CHECK(std::string(json).find("\"seed\": 123") != std::string::npos);
    oi_string_free(json);

    uint64_t h1 = 0, h2 = 0;
    CHECK(oi_config_hash(cfg, &h1) == OI_OK);
    CHECK(oi_config_set_seed(cfg, 124) == OI_OK);
    CHECK(oi_config_hash(cfg, &h2) == OI_OK);
    CHECK(h1 != h2);

    oi_config_free(cfg);
}

TEST_CASE("config parsing errors are classified") {
    oi_config* cfg = nullptr;
    CHECK(oi_config_from_json("{not json", &cfg) == OI_E_PARSE);
    CHECK(cfg == nullptr);
    CHECK(std::strlen(oi_last_error()) > 0);

    // pilot power above transmit power is a config error
    CHECK(oi_config_from_json(R"({"p_tx_dbm": 10.0, "p_pilot_dbm": 20.0})", &cfg) ==
          OI_E_CONFIG);
    CHECK(cfg == nullptr);

    CHECK(oi_config_from_json(nullptr, &cfg) == OI_E_INVALID_ARG);
}

TEST_CASE("channel-gen runs deterministically through the C API") {
    oi_config* cfg = nullptr;
    REQUIRE(oi_config_from_json(kSmallConfig, &cfg) == OI_OK);

    oi_result* r1 = nullptr;
    oi_result* r2 = nullptr;
    REQUIRE(oi_run_channel_gen(cfg, &r1) == OI_OK);
    REQUIRE(oi_run_channel_gen(cfg, &r2) == OI_OK);
    CHECK(oi_result_ok(r1) == 1);
    CHECK(std::string(oi_result_kind(r1)) == "json");
    CHECK(std::string(oi_result_payload(r1)) == oi_result_payload(r2));
    oi_result_free(r1);
    oi_result_free(r2);
    oi_config_free(cfg);
}

TEST_CASE("design runs through the C API") {
    oi_config* cfg = nullptr;
    REQUIRE(oi_config_from_json(kSmallConfig, &cfg) == OI_OK);

    oi_result* res = nullptr;
    REQUIRE(oi_run_design(cfg, &res) == OI_OK);
    CHECK(oi_result_ok(res) == 1);
    const std::string payload = oi_result_payload(res);
    CHECK(payload.find("\"solution\"") != std::string::npos);
    CHECK(payload.find("\"i_out\"") != std::string::npos);
    oi_result_free(res);

    CHECK(oi_run_design(nullptr, &res) == OI_E_INVALID_ARG);
    CHECK(oi_run_design(cfg, nullptr) == OI_E_INVALID_ARG);
    oi_config_free(cfg);
}

TEST_CASE("null result accessors are safe") {
    CHECK(std::string(oi_result_payload(nullptr)).empty());
    CHECK(std::string(oi_result_kind(nullptr)).empty());
    CHECK(oi_result_ok(nullptr) == 0);
    oi_result_free(nullptr);
    oi_string_free(nullptr);
    oi_config_free(nullptr);
}
