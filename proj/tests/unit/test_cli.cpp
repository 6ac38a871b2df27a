#include <doctest.h>

#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "parapack/cli.hpp"
#include "parapack/config_io.hpp"
#include "parapack/table.hpp"

using namespace parapack;
namespace fs = std::filesystem;

namespace {
struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("parapack_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, int cycles = 1) {
    auto cfg = sample_module(5, lg_m50_like(), SamplingRanges{});
    cfg.numerics = fast_numerics();
    cfg.n_cycles = cycles;
    save_config(cfg, dir / "module.json");
    return dir / "module.json";
}
}

TEST_SUITE("cli") {

TEST_CASE("simulate writes trace, summary and manifest") {
    const auto dir = scratch("sim");
    const auto cfg = write_config(dir);
    const auto r = run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(), "--record-every", "5"});
    CHECK(r.code == kExitOk);
    const Table trace = read_csv(dir / "o" / "trace.csv");
    CHECK(trace.names[0] == "t");
    CHECK(trace.names[4] == "i_mod");
    CHECK(trace.has("r_sei_4"));
    const Table sum = read_csv(dir / "o" / "summary.csv");
    CHECK(sum.rows() == 1);
    CHECK(sum.has("q_mod_ah"));
    const auto m = nlohmann::json::parse(read_file(dir / "o" / "manifest.json"));
    CHECK(m["command"] == "simulate");
    CHECK(m["outputs"].size() == 2);
    CHECK(m["seed"] == 5);
    fs::remove_all(dir);
}

TEST_CASE("bad configs exit 2 without outputs") {
    const auto dir = scratch("bad");
    write_file_atomic(dir / "broken.json", "{\"n_p\": 4, ");
    auto r = run({"simulate", "--config", (dir / "broken.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == kExitUsage);
    CHECK_FALSE(fs::exists(dir / "o"));
    CHECK(r.err.find("error") != std::string::npos);

    const auto cfg = write_config(dir);
    r = run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string(), "--cycles", "0"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("cycles") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o"));
    fs::remove_all(dir);
}

TEST_CASE("unknown flags print usage and exit 2") {
    const auto r = run({"simulate", "--bogus"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("solver failures exit 3") {
    const auto dir = scratch("fail");
    auto cfg = sample_module(5, lg_m50_like(), SamplingRanges{});
    cfg.numerics = fast_numerics();
    cfg.numerics.max_phase_duration = 10.0;
    save_config(cfg, dir / "m.json");
    const auto r = run({"simulate", "--config", (dir / "m.json").string(), "--out", (dir / "o").string()});
    CHECK(r.code == kExitRuntime);
    CHECK_FALSE(r.err.empty());
    fs::remove_all(dir);
}

TEST_CASE("sweep then analyze gives a Pareto table that sums to R^2") {
    const auto dir = scratch("pipeline");
    auto r = run({"sweep", "--fast", "--modules", "24", "--cycles", "2", "--seed", "3", "--out", (dir / "sw").string(),
                  "--workers", "2"});
    REQUIRE(r.code == kExitOk);
    r = run({"analyze", "--results", (dir / "sw" / "results.csv").string(), "--response", "sigma_i", "--out",
             (dir / "an").string()});
    REQUIRE(r.code == kExitOk);
    const Table p = read_csv(dir / "an" / "pareto.csv");
    const auto& share = p.numbers("share");
    double sum = 0.0;
    for (double s : share) sum += s;
    const auto& cum = p.numbers("cumulative");
    REQUIRE_FALSE(cum.empty());
    CHECK(std::abs(sum - cum.back()) <= 1e-10);
    CHECK(read_file(dir / "an" / "report.txt").find("R^2") != std::string::npos);
    CHECK(fs::exists(dir / "an" / "residuals.csv"));
    CHECK(fs::exists(dir / "an" / "model.csv"));

    r = run({"analyze", "--results", (dir / "sw" / "results.csv").string(), "--response", "dq",
             "--extended-predictors", "--out", (dir / "an2").string()});
    CHECK(r.code == kExitOk);
    r = run({"analyze", "--results", (dir / "sw" / "results.csv").string(), "--response", "voltage", "--out",
             (dir / "an3").string()});
    CHECK(r.code == kExitUsage);
    fs::remove_all(dir);
}

TEST_CASE("export round-trips csv through binary") {
    const auto dir = scratch("export");
    REQUIRE(run({"sweep", "--fast", "--modules", "3", "--cycles", "1", "--out", (dir / "sw").string()}).code == 0);
    const auto csv = (dir / "sw" / "results.csv").string();
    CHECK(run({"export", "--in", csv, "--out", (dir / "r.bin").string()}).code == 0);
    CHECK(read_file(dir / "r.bin").rfind("PPKTAB01", 0) == 0);
    CHECK(run({"export", "--in", (dir / "r.bin").string(), "--out", (dir / "r.csv").string()}).code == 0);
    CHECK(read_file(dir / "r.csv") == read_file(csv));
    CHECK(run({"export", "--in", (dir / "missing.csv").string(), "--out", (dir / "x.csv").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("arrange writes the comparison") {
    const auto dir = scratch("arrange");
    const auto cfg = write_config(dir);
    const auto r = run({"arrange", "--config", cfg.string(), "--cycles", "1", "--out", (dir / "a").string()});
    CHECK(r.code == kExitOk);
    const Table t = read_csv(dir / "a" / "arrangement.csv");
    CHECK(t.rows() == 3);
    CHECK(t.strings("label")[1] == "descending");
    CHECK(r.out.find("descending vs ascending") != std::string::npos);
    CHECK(run({"arrange", "--config", cfg.string(), "--cycles", "0", "--out", (dir / "b").string()}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("sweep output is reproducible from the same seed") {
    const auto dir = scratch("repro");
    for (const char* sub : {"a", "b"}) {
        REQUIRE(run({"sweep", "--fast", "--modules", "4", "--cycles", "1", "--seed", "11", "--out",
                     (dir / sub).string()})
                    .code == 0);
    }
    CHECK(read_file(dir / "a" / "results.csv") == read_file(dir / "b" / "results.csv"));
    fs::remove_all(dir);
}

TEST_CASE("worker count from the environment") {
    ::setenv("PARAPACK_WORKERS", "3", 1);
    CHECK(default_workers() == 3);
    ::setenv("PARAPACK_WORKERS", "lots", 1);
    CHECK(default_workers() == 0);
    ::unsetenv("PARAPACK_WORKERS");
    CHECK(default_workers() == 0);
}

}
