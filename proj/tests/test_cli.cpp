#include "doctest.h"
#include "test_util.hpp"

#include <sparsepsi/cli.hpp>
#include <sparsepsi/csv.hpp>

#include "json.hpp"

#include <fstream>
#include <sstream>

using namespace sparsepsi;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "sparsepsi");
    return run_cli(args);
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json load_json(const fs::path& path)
{
    return json::parse(slurp(path));
}

bool has_pair(const json& support, int i, int j)
{
    for (const auto& e : support)
        if (e.at("i") == i && e.at("j") == j)
            return true;
    return false;
}

} // namespace

TEST_CASE("simulate")
{
    const fs::path dir = testutil::temp_dir("cli_sim");

    SUBCASE("model precondition")
    {
        CHECK(run({"simulate", "--model", "9", "--n", "20", "--p", "5", "--seed", "1", "--out",
                   (dir / "m9").string()}) == kExitUsage);
    }
    SUBCASE("noiseless Model 1 and determinism")
    {
        const std::vector<std::string> args{"simulate", "--model", "1", "--n", "30", "--p", "6",
                                            "--sigma", "0", "--seed", "5", "--out"};
        auto a = args;
        a.push_back((dir / "a").string());
        auto b = args;
        b.push_back((dir / "b").string());
        REQUIRE(run(a) == kExitOk);
        REQUIRE(run(b) == kExitOk);
        CHECK(slurp(dir / "a" / "data.csv") == slurp(dir / "b" / "data.csv"));

        const NumericTable t = read_numeric_csv(dir / "a" / "data.csv");
        REQUIRE(t.header.size() == 7);
        CHECK(t.header[0] == "y");
        CHECK(t.header[1] == "x1");
        CHECK(t.header[6] == "x6");
        for (Index r = 0; r < t.values.rows(); ++r)
            CHECK(t.values(r, 0) == t.values(r, 1) + t.values(r, 5));
        CHECK(load_json(dir / "a" / "truth.json").empty());
        const json manifest = load_json(dir / "a" / "manifest.json");
        CHECK(manifest.at("subcommand") == "simulate");
        CHECK(manifest.at("exit_code") == 0);
    }
}

TEST_CASE("fit")
{
    const fs::path dir = testutil::temp_dir("cli_fit");
    REQUIRE(run({"simulate", "--model", "2", "--n", "100", "--p", "20", "--sigma", "0.1", "--seed",
                 "11", "--out", (dir / "sim").string()}) == kExitOk);
    const std::string data = (dir / "sim" / "data.csv").string();

    SUBCASE("fully penalized")
    {
        REQUIRE(run({"fit", "--data", data, "--lambda", "1e6", "--out", (dir / "big").string()}) ==
                kExitOk);
        CHECK(load_json(dir / "big" / "support.json").empty());
        const NumericTable psi = read_numeric_csv(dir / "big" / "psi.csv");
        CHECK(psi.values.cols() == 20);
    }
    SUBCASE("cross-validated fit finds both pairs")
    {
        REQUIRE(run({"fit", "--data", data, "--cv", "--seed", "3", "--out", (dir / "cv").string()}) ==
                kExitOk);
        const json support = load_json(dir / "cv" / "support.json");
        CHECK(has_pair(support, 1, 2));
        CHECK(has_pair(support, 4, 5));
        CHECK(support[0].contains("name_i"));
        CHECK(fs::exists(dir / "cv" / "cv.csv"));
        const json manifest = load_json(dir / "cv" / "manifest.json");
        CHECK(manifest.at("inputs").size() == 1);
        CHECK(manifest.at("inputs")[0].at("sha256").get<std::string>().size() == 64);
    }
    SUBCASE("nonconvergence still writes outputs")
    {
        CHECK(run({"fit", "--data", data, "--lambda", "0.05", "--max-iter", "2", "--out",
                   (dir / "short").string()}) == kExitNotConverged);
        CHECK(fs::exists(dir / "short" / "psi.csv"));
        CHECK(fs::exists(dir / "short" / "support.json"));
        CHECK(load_json(dir / "short" / "manifest.json").at("exit_code") == kExitNotConverged);
    }
    SUBCASE("usage errors")
    {
        CHECK(run({"fit", "--lambda", "1", "--out", (dir / "x").string()}) == kExitUsage);
        CHECK(run({"fit", "--data", data, "--out", (dir / "x").string()}) == kExitUsage);
        CHECK(run({"fit", "--data", data, "--cv", "--out", (dir / "x").string()}) == kExitUsage);
        CHECK(run({"fit", "--data", (dir / "missing.csv").string(), "--lambda", "1", "--out",
                   (dir / "x").string()}) == kExitUsage);
        testutil::write_file(dir / "bad.csv", "y,x1\n1,2\n3,\n4,5\n");
        CHECK(run({"fit", "--data", (dir / "bad.csv").string(), "--lambda", "1", "--out",
                   (dir / "x").string()}) == kExitUsage);
    }
    SUBCASE("cv subcommand")
    {
        REQUIRE(run({"cv", "--data", data, "--seed", "3", "--grid-size", "8", "--out",
                     (dir / "cvonly").string()}) == kExitOk);
        const json summary = load_json(dir / "cvonly" / "cv.json");
        CHECK(summary.contains("selected_lambda"));
        const NumericTable table = read_numeric_csv(dir / "cvonly" / "cv.csv");
        CHECK(table.values.rows() == 8);
    }
    SUBCASE("prescreen subcommand")
    {
        REQUIRE(run({"prescreen", "--data", data, "--keep", "5", "--out", (dir / "scr").string()}) ==
                kExitOk);
        const json screen = load_json(dir / "scr" / "screen.json");
        CHECK(screen.at("kept").size() == 5);
        CHECK(read_numeric_csv(dir / "scr" / "screened.csv").header.size() == 6);
    }
    SUBCASE("oracle-check")
    {
        REQUIRE(run({"fit", "--data", data, "--lambda", "0.3", "--tol", "1e-6", "--max-iter", "100000",
                     "--out", (dir / "fixed").string()}) == kExitOk);
        CHECK(run({"oracle-check", "--data", data, "--lambda", "0.3", "--psi",
                   (dir / "fixed" / "psi.csv").string(), "--out", (dir / "cert").string()}) == kExitOk);
        CHECK(load_json(dir / "cert" / "certificate.json").at("kkt").at("passed") == true);

        CHECK(run({"oracle-check", "--data", data, "--lambda", "0.3", "--tol", "1e-8", "--max-iter",
                   "100000", "--out", (dir / "solve").string()}) == kExitOk);
        const json solved = load_json(dir / "solve" / "certificate.json");
        CHECK(solved.at("reference").at("support_agrees") == true);

        std::ostringstream zeros;
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j)
                zeros << (j ? "," : "") << "0";
            zeros << "\n";
        }
        testutil::write_file(dir / "zero.csv", zeros.str());
        CHECK(run({"oracle-check", "--data", data, "--lambda", "0.01", "--psi",
                   (dir / "zero.csv").string(), "--out", (dir / "fail").string()}) == kExitNotConverged);
    }
}

TEST_CASE("bench")
{
    const fs::path dir = testutil::temp_dir("cli_bench");
    testutil::write_file(dir / "grid.json",
                         R"({"cells": [{"model": 2, "rho": 0.0, "sigma": 0.5, "p": 10, "n": 60}],
                             "method": {"folds": 5, "grid_size": 6}})");
    REQUIRE(run({"bench", "--grid", (dir / "grid.json").string(), "--reps", "2", "--seed", "9", "--out",
                 (dir / "out").string()}) == kExitOk);
    std::istringstream rows(slurp(dir / "out" / "results.csv"));
    std::string line;
    int count = 0;
    std::getline(rows, line);
    CHECK(line.rfind("Model,rho,sigma,p,n,Method,TPR,FPR,Time", 0) == 0);
    while (std::getline(rows, line))
        count += !line.empty();
    CHECK(count == 1);
    CHECK(load_json(dir / "out" / "reps.json").is_array());

    CHECK(run({"bench", "--grid", (dir / "grid.json").string(), "--reps", "0", "--seed", "9", "--out",
               (dir / "zero").string()}) == kExitUsage);
    testutil::write_file(dir / "bad.json", "{\"cells\": [{\"rho\": 0}]}");
    CHECK(run({"bench", "--grid", (dir / "bad.json").string(), "--reps", "1", "--seed", "9", "--out",
               (dir / "bad").string()}) == kExitUsage);
    testutil::write_file(dir / "garbage.json", "not json");
    CHECK(run({"bench", "--grid", (dir / "garbage.json").string(), "--reps", "1", "--seed", "9",
               "--out", (dir / "bad").string()}) == kExitUsage);
}

TEST_CASE("top-level usage")
{
    CHECK(run({}) == kExitUsage);
    CHECK(run({"nonsense"}) == kExitUsage);
    CHECK(run({"--version"}) == kExitOk);
}
