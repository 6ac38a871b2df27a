#include <doctest.h>

#include <vector>

#include <filesystem>
#include <fstream>

#include "parapack/config_io.hpp"
#include "parapack/error.hpp"
#include "parapack/params.hpp"

using namespace parapack;
namespace fs = std::filesystem;

namespace {
std::string error_field(const std::string& text) {
    try {
        config_from_json(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

const char* kMinimal = R"({
  "n_p": 4, "r_int": 0.0003, "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1,
  "nominal": {"preset": "lg_m50_like"},
  "cells": [{}, {"eps_s_n": 0.79}, {}, {"eps_s_p": 0.69}]
})";
}

TEST_SUITE("config_io") {

TEST_CASE("minimal file expands against the nominal cell") {
    const auto cfg = config_from_json(kMinimal);
    CHECK(cfg.n_p == 4);
    CHECK(cfg.cells[0] == cfg.nominal);
    CHECK(cfg.cells[1].eps_s_n == 0.79);
    CHECK(cfg.cells[3].eps_s_p == 0.69);
    CHECK(cfg.protocol == standard_cycle());
}

TEST_CASE("save then load returns an equal config") {
    const fs::path dir = fs::temp_directory_path() / "parapack_cfg_test";
    fs::create_directories(dir);
    for (std::uint64_t seed : {1u, 2u, 3u, 77u, 1234567u}) {
        auto cfg = sample_module(seed, lg_m50_like(), SamplingRanges{});
        cfg.n_cycles = 3;
        cfg.cells[1].sei.i0 = 2.5e-7;
        cfg.cells[2].r_cell = 0.0175;
        cfg.protocol.phases.push_back(RestPhase{60.0});
        cfg.numerics = fast_numerics();
        save_config(cfg, dir / "c.json");
        CHECK(load_config(dir / "c.json") == cfg);
        CHECK(config_from_json(config_to_json(cfg)) == cfg);
    }
    auto custom = reference_module(lg_m50_like());
    std::vector<double> x, u, dudt;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i / 9.0);
        u.push_back(1.0 - 0.1 * i);
        dudt.push_back(-1e-4 * i);
    }
    custom.nominal.ocp_n = OcpTable(x, u, dudt);
    custom.cells.assign(4, custom.nominal);
    CHECK(config_from_json(config_to_json(custom)) == custom);
    fs::remove_all(dir);
}

TEST_CASE("invalid files name the field") {
    CHECK(error_field(R"({"n_p": 4, "r_int": 0.0003, "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1,
        "nominal": {"preset": "lg_m50_like"}, "cells": [{}, {}, {"eps_s_n": 1.3}, {}]})") == "cells[2].eps_s_n");
    CHECK(error_field(R"({"n_p": 4, "r_int": 0.0003, "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1,
        "nominal": {"preset": "lg_m50_like"}, "cells": [{}, {}, {}]})") == "cells");
    CHECK(error_field(R"({"n_p": 4, "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1,
        "nominal": {"preset": "lg_m50_like"}, "cells": [{}, {}, {}, {}]})") == "r_int");
    CHECK(error_field(R"({"n_p": 4, "r_int": 0.0003, "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1, "bogus": 1,
        "nominal": {"preset": "lg_m50_like"}, "cells": [{}, {}, {}, {}]})") == "bogus");
    CHECK(error_field(R"({"n_p": 4, "r_int": "x", "spacing": 0.004, "t_amb": 298.15, "n_cycles": 1,
        "nominal": {"preset": "lg_m50_like"}, "cells": [{}, {}, {}, {}]})") == "r_int");
    CHECK(error_field("{not json") == "");
}

}
