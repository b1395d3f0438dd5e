#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <set>

#include "wta/network.hpp"

namespace {

wta::NetworkSpec small_valid_spec() {
    wta::NetworkSpec s;
    s.n = 256;
    s.alpha = 2;
    s.lambda = wta::lambda_for(256);
    s.w_x = 3.0;
    s.w_self = 2.0;
    s.b_out = 3.0;
    s.w_z = {-1.0, -1.0};
    s.w_y = {1.0, 1.0};
    s.b_z = {0.5, 1.5};
    s.provenance = "test";
    return s;
}

}  // namespace

TEST_CASE("validate_spec accepts a well-formed spec") {
    REQUIRE_NOTHROW(wta::validate_spec(small_valid_spec()));
}

TEST_CASE("validate_spec enforces the sign discipline") {
    auto s = small_valid_spec();
    s.w_z[1] = 0.25;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.w_y[0] = -0.1;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.w_x = 0.0;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.w_self = -2.0;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.lambda = 0.0;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);
}

TEST_CASE("validate_spec enforces the quiet-network bias floor") {
    auto s = small_valid_spec();
    // Floor at n = 256, default parameters: 10 * (1/160) * 8 = 0.5.
    s.b_out = 0.4;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.b_z[0] = 0.25;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.b_z[0] = 0.5;  // exactly on the floor
    REQUIRE_NOTHROW(wta::validate_spec(s));
}

TEST_CASE("validate_spec rejects weight magnitudes beyond 1e6") {
    auto s = small_valid_spec();
    s.w_x = 2e6;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.w_z[0] = -1.5e6;
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);

    s = small_valid_spec();
    s.b_z[1] = 1e6;  // at the bound
    REQUIRE_NOTHROW(wta::validate_spec(s));
}

TEST_CASE("validate_spec checks array lengths") {
    auto s = small_valid_spec();
    s.w_z.push_back(-1.0);
    REQUIRE_THROWS_AS(wta::validate_spec(s), std::invalid_argument);
}

TEST_CASE("JSON round trip is value-exact, including awkward doubles") {
    auto s = small_valid_spec();
    s.lambda = 1.0 / 160.0;
    s.w_x = 3.141592653589793;
    s.w_self = 2.718281828459045;
    s.b_out = 2.9999999999999996;
    s.w_z = {-1.0 / 3.0, -1e-300};
    s.w_y = {0.1, 123456.789012345};
    s.b_z = {0.5000000000000001, 999999.9999999999};
    s.provenance = "round-trip fixture";

    const auto j = wta::spec_to_json(s);
    const auto text = j.dump();
    const auto back = wta::spec_from_json(nlohmann::json::parse(text));
    REQUIRE(back == s);
}

TEST_CASE("spec JSON carries exactly the documented keys") {
    const auto j = wta::spec_to_json(small_valid_spec());
    std::set<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    const std::set<std::string> expected = {"n",   "alpha", "lambda", "w_x",  "w_self",
                                            "b_out", "w_z",   "w_y",    "b_z", "provenance"};
    REQUIRE(keys == expected);
}

TEST_CASE("spec_from_json validates and reports malformed documents") {
    auto j = wta::spec_to_json(small_valid_spec());
    j.erase("lambda");
    REQUIRE_THROWS_AS(wta::spec_from_json(j), std::invalid_argument);

    j = wta::spec_to_json(small_valid_spec());
    j["w_z"] = {0.5, -1.0};  // excitatory inhibitor weight
    REQUIRE_THROWS_AS(wta::spec_from_json(j), std::invalid_argument);
}

TEST_CASE("save/load round trip through a file") {
    const auto s = small_valid_spec();
    const std::string path = "network_roundtrip_test.json";
    wta::save_spec(s, path);
    const auto back = wta::load_spec(path);
    REQUIRE(back == s);
    std::remove(path.c_str());

    REQUIRE_THROWS_AS(wta::load_spec("does_not_exist.json"), std::invalid_argument);
}

TEST_CASE("lambda_for matches the temperature convention") {
    REQUIRE(wta::lambda_for(256, 20.0) == 1.0 / 160.0);
    REQUIRE(wta::lambda_for(2, 20.0) == 1.0 / 20.0);
    REQUIRE_THROWS_AS(wta::lambda_for(1), std::invalid_argument);
}
