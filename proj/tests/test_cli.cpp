#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef GWHARM_CLI_PATH
#error "GWHARM_CLI_PATH must point at the command line binary"
#endif

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "gwh_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(GWHARM_CLI_PATH) + " " + args + " > " +
                      (workdir() / "cli_stdout.txt").string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<char>(std::istreambuf_iterator<char>(in),
                             std::istreambuf_iterator<char>());
}

nlohmann::json parse_file(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

std::string pool_path() { return (workdir() / "pool.bin").string(); }

}  // namespace

TEST_CASE("gamma solves, reports, and reproduces bit for bit") {
    std::string out = pool_path();
    std::string report = (workdir() / "gamma.json").string();
    std::string base = "gamma --alpha 2.0 --pool-size 4000 --max-iter 40 "
                       "--tol 0.02 --seed 4242 --threads 1 --out " +
                       out + " --report " + report;
    CHECK(run_cli(base) == 0);
    REQUIRE(fs::exists(out));
    REQUIRE(fs::exists(out + ".json"));
    REQUIRE(fs::exists(report));

    nlohmann::json rep = parse_file(report);
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["tool"] == "gwharm");
    CHECK(rep["subcommand"] == "gamma");
    CHECK(rep["config"]["alpha"] == 2.0);
    CHECK(rep["results"]["converged"] == true);
    CHECK(rep["results"]["pool_size"] == 4000);
    CHECK(rep.find("timestamp") == rep.end());

    std::vector<char> pool_bytes = slurp(out);
    std::vector<char> side_bytes = slurp(out + ".json");
    std::vector<char> rep_bytes = slurp(report);

    // Same seed, different thread count: identical artifacts.
    std::string rerun = "gamma --alpha 2.0 --pool-size 4000 --max-iter 40 "
                        "--tol 0.02 --seed 4242 --threads 3 --out " +
                        out + " --report " + report;
    CHECK(run_cli(rerun) == 0);
    CHECK(slurp(out) == pool_bytes);
    CHECK(slurp(out + ".json") == side_bytes);
    CHECK(slurp(report) == rep_bytes);
}

TEST_CASE("gamma reports non-convergence through its exit code") {
    std::string out = (workdir() / "stub.bin").string();
    int rc = run_cli("gamma --alpha 1.5 --pool-size 500 --max-iter 5 "
                     "--tol 1e-12 --seed 1 --threads 1 --out " + out);
    CHECK(rc == 1);
    // The pool is still written so the run can be inspected.
    CHECK(fs::exists(out));
    nlohmann::json side = parse_file(out + ".json");
    CHECK(side["converged"] == false);
}

TEST_CASE("beta estimates all three routes from a saved pool") {
    std::string report = (workdir() / "beta.json").string();
    int rc = run_cli("beta --pool " + pool_path() +
                     " --samples 4000 --kappa-comps 1500 --seed 7 --out " + report);
    CHECK(rc == 0);
    nlohmann::json rep = parse_file(report);
    CHECK(rep["subcommand"] == "beta");
    const nlohmann::json& res = rep["results"];
    for (const char* key : {"beta_value", "beta_formula1", "beta_formula2"}) {
        REQUIRE(res.find(key) != res.end());
        double point = res[key]["point"];
        CHECK(point > 0.5);
        CHECK(point < 1.1);
        CHECK(double(res[key]["ci_low"]) <= point);
        CHECK(double(res[key]["ci_high"]) >= point);
    }
    CHECK(res.find("beta_formula2_kappa1") == res.end());

    int rc2 = run_cli("beta --pool " + pool_path() +
                      " --samples 4000 --kappa-comps 1500 --seed 7 --ablation "
                      "--out " + report);
    CHECK(rc2 == 0);
    nlohmann::json rep2 = parse_file(report);
    CHECK(rep2["results"].find("beta_formula2_kappa1") != rep2["results"].end());
}

TEST_CASE("ode writes one row per evaluation point") {
    std::string report = (workdir() / "ode.json").string();
    int rc = run_cli("ode --pool " + pool_path() + " --out " + report);
    CHECK((rc == 0 || rc == 1));  // small pools may sit a few se off
    nlohmann::json rep = parse_file(report);
    REQUIRE(rep["results"].is_array());
    REQUIRE(rep["results"].size() == 3);
    CHECK(rep["results"][0]["ell"] == 0.25);
    CHECK(rep["results"][1]["ell"] == 1.0);
    CHECK(rep["results"][2]["ell"] == 4.0);
}

TEST_CASE("identities run the selected check against the pool") {
    std::string report = (workdir() / "ident.json").string();
    int rc = run_cli("identities --pool " + pool_path() +
                     " --which moment --seed 5 --out " + report);
    CHECK(rc == 0);
    nlohmann::json rep = parse_file(report);
    REQUIRE(rep["results"].is_array());
    REQUIRE(rep["results"].size() == 1);
    CHECK(rep["results"][0]["name"] == "second_moment_identity");
}

TEST_CASE("usage errors exit with code two") {
    CHECK(run_cli("gamma --alpha 2.0") == 2);            // missing --out
    CHECK(run_cli("--no-such-flag") == 2);
    CHECK(run_cli("gamma --alpha 3.0 --out x.bin") == 2);  // alpha out of range
    CHECK(run_cli("beta --pool " +
                  (workdir() / "missing.bin").string()) == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("gamma --help") == 0);
}
