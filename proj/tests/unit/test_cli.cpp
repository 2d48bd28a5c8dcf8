#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgslab/cli.hpp"

using namespace sgs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("sgslab_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sgslab");
    return run_cli(args);
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("sha256") {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("config parsing reports field paths") {
        auto d = ExperimentConfig::ising_defaults();
        CHECK_THROWS_WITH_AS(parse_run_config(nlohmann::json::parse(R"({"experiment":{"shotz":5}})"), d),
                             doctest::Contains("experiment.shotz"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config(nlohmann::json::parse(R"({"experiment":{"shots":"many"}})"), d),
                             doctest::Contains("experiment.shots"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_run_config(nlohmann::json::parse(R"({"noise":{"fidelity_1q":0.99}})"), d),
                             doctest::Contains("noise.fidelity_2q"), ConfigError);
        CHECK_THROWS_AS(parse_run_config(nlohmann::json::parse(R"({"bogus":1})"), d), ConfigError);
        auto rc = parse_run_config(
            nlohmann::json::parse(
                R"({"experiment":{"shots":100,"seed":7},"noise":"aria","ising":{"geometry":"lattice","rows":2,"cols":2,"h3_values":[1.5]}})"),
            d);
        CHECK(rc.experiment.shots == 100);
        CHECK(rc.experiment.seed == 7u);
        CHECK(rc.experiment.noise.has_value());
        CHECK(rc.ising.num_sites() == 4);
        CHECK(rc.h3_values == std::vector<double>{1.5});
    }

    TEST_CASE("exit codes for bad input") {
        auto out = scratch("bad");
        spit(out / "c.json", R"({"experiment":{"evo_steps":30}})");
        CHECK(cli({"ising", "--config", (out / "c.json").string(), "--out", (out / "o").string()}) == kExitConfig);
        spit(out / "d.json", "{not json");
        CHECK(cli({"ising", "--config", (out / "d.json").string(), "--out", (out / "o").string()}) == kExitConfig);
        CHECK(cli({"ising", "--geometry", "ring", "4", "--out", (out / "o").string()}) == kExitConfig);
        CHECK(cli({"fit", "--input", (out / "missing.csv").string()}) == kExitConfig);
        CHECK(cli({"nosuchcommand"}) != kExitOk);
    }

    TEST_CASE("fit command recovers a planted frequency") {
        auto out = scratch("fit");
        TimeSeries s;
        for (double t : chebyshev_times(25, 0, 12)) {
            s.times.push_back(t);
            s.values.push_back(0.1 + 0.6 * std::cos(0.85 * t + 0.3));
            s.sigmas.push_back(0.01);
        }
        spit(out / "in.csv", s.to_csv());
        REQUIRE(cli({"fit", "--input", (out / "in.csv").string(), "--out", (out / "o").string()}) == kExitOk);
        auto j = nlohmann::json::parse(slurp(out / "o" / "result.json"));
        CHECK(j["fit"]["gap"].get<double>() == doctest::Approx(0.85).epsilon(1e-6));
        CHECK(fs::exists(out / "o" / "manifest.json"));
    }

    TEST_CASE("benchmark and search commands") {
        auto out = scratch("bench");
        REQUIRE(cli({"benchmark", "--hamiltonian", std::string(SGSLAB_FIXTURES) + "/h2_0.74.qubit", "--out",
                     (out / "b").string()}) == kExitOk);
        auto b = nlohmann::json::parse(slurp(out / "b" / "benchmark.json"));
        CHECK(b["gap"].get<double>() == doctest::Approx(0.599078386923605).epsilon(1e-9));

        REQUIRE(cli({"search", "--geometry", "chain", "4", "--h3", "3", "--out", (out / "s").string(), "--show",
                     "0"}) == kExitOk);
        auto csv = slurp(out / "s" / "search.csv");
        CHECK(csv.rfind("pauli_word,rho,theta\n", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 257);
    }

    TEST_CASE("ising run twice gives identical bytes") {
        auto out = scratch("det");
        spit(out / "c.json", R"({"experiment":{"shots":256,"seed":5},"ising":{"L":3,"h3_values":[2.0,2.5]}})");
        const std::vector<std::string> base{"ising", "--config", (out / "c.json").string(), "--workers", "2"};
        auto a = base, b = base;
        a.insert(a.end(), {"--out", (out / "a").string()});
        b.insert(b.end(), {"--out", (out / "b").string()});
        const int ra = cli(a), rb = cli(b);
        CHECK(ra == rb);
        CHECK(ra != kExitConfig);
        for (const char* f : {"sweep.csv", "result.json", "series_h3_2.csv", "series_h3_2.5.csv"}) {
            INFO(f);
            REQUIRE(fs::exists(out / "a" / f));
            CHECK(slurp(out / "a" / f) == slurp(out / "b" / f));
        }
        auto ma = nlohmann::json::parse(slurp(out / "a" / "manifest.json"));
        auto mb = nlohmann::json::parse(slurp(out / "b" / "manifest.json"));
        ma.erase("timestamp");
        mb.erase("timestamp");
        CHECK(ma == mb);
        CHECK(ma["inputs"].contains("config"));
        CHECK(slurp(out / "a" / "sweep.csv").rfind("h3_over_J1,gap_fit,gap_err,gap_exact,rel_error", 0) == 0);
    }

    TEST_CASE("molecule command on a fixture") {
        auto out = scratch("mol");
        const int rc = cli({"molecule", "--hamiltonian", "0.74=" + std::string(SGSLAB_FIXTURES) + "/h2_0.74.qubit",
                            "--shots", "2048", "--out", (out / "o").string()});
        CHECK(rc == kExitOk);
        auto j = nlohmann::json::parse(slurp(out / "o" / "result.json"));
        REQUIRE(j["points"].size() == 1);
        CHECK(j["points"][0]["aux_link"].get<double>() == doctest::Approx(1.0));
        CHECK(j["points"][0]["benchmark"]["relative_error"].get<double>() < 0.05);
    }
}
