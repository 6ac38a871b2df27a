#include <doctest.h>

#include "parapack/arrange.hpp"
#include "parapack/error.hpp"

using namespace parapack;

namespace {
ModuleConfig fast_module(std::uint64_t seed) {
    auto cfg = sample_module(seed, lg_m50_like(), SamplingRanges{});
    cfg.numerics = fast_numerics();
    return cfg;
}
}

TEST_SUITE("arrange") {

TEST_CASE("descending order by capacity") {
    CHECK(arrange_descending({4.8, 4.9, 4.7, 4.85}) == Order{1, 3, 0, 2});
    CHECK(arrange_descending({5.0, 4.9, 4.8, 4.7}) == Order{0, 1, 2, 3});
    CHECK(arrange_descending({4.85, 4.85, 4.85, 4.85}) == Order{0, 1, 2, 3});
    CHECK(arrange_ascending({4.8, 4.9, 4.7, 4.85}) == Order{2, 0, 3, 1});
}

TEST_CASE("limiting-electrode key follows the eps relations") {
    auto cfg = fast_module(4);
    CapacityOptions o;
    o.key = CapacityKey::limiting_electrode;
    const auto caps = cell_capacities(cfg.cells, o);
    for (int k = 0; k < 4; ++k) CHECK(caps[k] == limiting_capacity(cfg.cells[k]));
}

TEST_CASE("measured capacity of the nominal cell") {
    CapacityOptions o;
    o.numerics = fast_numerics();
    const double q = measured_capacity(lg_m50_like(), o);
    CHECK(q > 4.6);
    CHECK(q < 4.9);
}

TEST_CASE("reorder validates permutations") {
    const auto cfg = fast_module(1);
    const auto r = reorder(cfg, {3, 2, 1, 0});
    CHECK(r.cells[0] == cfg.cells[3]);
    CHECK(r.cells[3] == cfg.cells[0]);
    CHECK_THROWS(reorder(cfg, {0, 0, 1, 2}));
    CHECK_THROWS(reorder(cfg, {0, 1, 2}));
    CHECK(all_orders(4).size() == 24);
    CHECK(all_orders(3).front() == Order{0, 1, 2});
}

TEST_CASE("identical cells are indifferent to order") {
    auto cfg = reference_module(lg_m50_like());
    cfg.numerics = fast_numerics();
    const auto out = evaluate_orders(cfg, all_orders(4), 1);
    for (const auto& o : out) {
        CHECK(std::abs(o.responses.sigma_i - out[0].responses.sigma_i) <= 1e-9);
        CHECK(std::abs(o.responses.dtmax - out[0].responses.dtmax) <= 1e-9);
        CHECK(std::abs(o.q_mod_ah - out[0].q_mod_ah) <= 1e-9);
    }
}

TEST_CASE("reordering keeps the module capacity") {
    const auto cfg = fast_module(8);
    const auto out = evaluate_orders(cfg, all_orders(4), 1);
    for (const auto& o : out) CHECK(std::abs(o.q_mod_ah - out[0].q_mod_ah) <= 0.005 * out[0].q_mod_ah);
}

TEST_CASE("relative changes are recomputable") {
    const auto cfg = fast_module(2);
    CapacityOptions o;
    o.numerics = fast_numerics();
    const auto desc = arrange_descending_capacity(cfg.cells, o);
    const auto asc = arrange_ascending_capacity(cfg.cells, o);
    const auto cmp = compare_arrangements(cfg, {asc, desc}, 1);
    REQUIRE(cmp.size() == 2);
    const auto& c = cmp[1];
    CHECK(c.baseline == asc);
    CHECK(c.proposed == desc);
    CHECK(c.rel_dtmax == relative_change(c.baseline_outcome.responses.dtmax, c.proposed_outcome.responses.dtmax));
    CHECK(c.rel_sigma_i ==
          relative_change(c.baseline_outcome.responses.sigma_i, c.proposed_outcome.responses.sigma_i));
    CHECK(cmp[0].rel_dtmax == 0.0);
    CHECK(relative_change(0.0, 1.0) == 0.0);
    CHECK(relative_change(2.0, 1.0) == -0.5);
}

}
