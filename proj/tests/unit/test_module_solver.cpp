#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parapack/error.hpp"
#include "parapack/module_solver.hpp"

using namespace parapack;

namespace {
ModuleConfig fast_module(double tol = 0.025, std::uint64_t seed = 5) {
    SamplingRanges r;
    r.capacity_rel_tol = tol;
    auto cfg = sample_module(seed, lg_m50_like(), r);
    cfg.numerics = fast_numerics();
    return cfg;
}

ModuleConfig homogeneous_module() {
    auto cfg = reference_module(lg_m50_like());
    cfg.numerics = fast_numerics();
    return cfg;
}

std::vector<CellState> states_at(const std::vector<EspmModel>& models, double soc) {
    std::vector<CellState> s;
    for (const auto& m : models) s.push_back(m.initial_state(soc, 298.15));
    return s;
}

std::vector<EspmModel> models_of(const ModuleConfig& cfg) {
    std::vector<EspmModel> m;
    for (const auto& c : cfg.cells) m.emplace_back(c, cfg.numerics);
    return m;
}

// current drawn from a cell at terminal voltage v, by bisection on the decreasing v(I)
double current_at_voltage(const FrozenVoltage& f, double v) {
    double lo = -200.0, hi = 200.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (f.voltage(mid) > v ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

SimTrace synthetic(std::vector<double> t, int n_p, double i0, double temp0) {
    SimTrace tr;
    tr.n_p = n_p;
    tr.t = std::move(t);
    for (std::size_t r = 0; r < tr.t.size(); ++r) {
        for (int k = 0; k < n_p; ++k) {
            tr.i_branch.push_back(i0 + 0.1 * k + std::sin(tr.t[r]));
            tr.temp.push_back(temp0 + 0.2 * k + std::cos(tr.t[r]));
        }
    }
    return tr;
}
}

TEST_SUITE("module_solver") {

TEST_CASE("identical cells split the current evenly without interconnection resistance") {
    const auto cfg = homogeneous_module();
    const auto models = models_of(cfg);
    for (double soc : {0.2, 0.5, 0.9}) {
        const auto states = states_at(models, soc);
        for (double i_mod : {-6.0, 1.0, 19.4}) {
            const auto sol = solve_branch_currents(states, models, i_mod, 0.0);
            for (double i : sol.currents) CHECK(i == doctest::Approx(i_mod / 4).epsilon(1e-12));
        }
    }
}

TEST_CASE("identical cells favour the terminal end of the ladder") {
    // the interconnects raise the voltage seen by cells further from the terminals
    const auto cfg = homogeneous_module();
    const auto models = models_of(cfg);
    for (double soc : {0.2, 0.5, 0.9}) {
        const auto states = states_at(models, soc);
        for (double r_int : {0.1e-3, 0.5e-3, 5e-3}) {
            for (double i_mod : {-6.0, 1.0, 19.4}) {
                const auto sol = solve_branch_currents(states, models, i_mod, r_int);
                const double sum = std::accumulate(sol.currents.begin(), sol.currents.end(), 0.0);
                CHECK(std::abs(sum - i_mod) <= 1e-9 * std::max(1.0, std::abs(i_mod)));
                for (int k = 1; k < 4; ++k) CHECK(std::copysign(1.0, i_mod) * (sol.currents[k - 1] - sol.currents[k]) > 0.0);
            }
        }
    }
}

TEST_CASE("zero interconnection resistance equalises the cell voltages") {
    auto cfg = homogeneous_module();
    const double caps[4] = {4.75, 4.95, 4.85, 4.80};
    for (int k = 0; k < 4; ++k) {
        cfg.cells[k].eps_s_n = eps_from_capacity(caps[k], Electrode::negative);
        cfg.cells[k].eps_s_p = eps_from_capacity(caps[k], Electrode::positive);
    }
    const auto models = models_of(cfg);
    const auto states = states_at(models, 0.9);
    const double i_mod = 19.4;
    const auto sol = solve_branch_currents(states, models, i_mod, 0.0);

    std::vector<FrozenVoltage> f;
    for (int k = 0; k < 4; ++k) f.push_back(models[k].frozen(states[k]));
    double lo = 2.0, hi = 4.5;
    for (int it = 0; it < 200; ++it) {
        const double v = 0.5 * (lo + hi);
        double total = 0.0;
        for (const auto& fk : f) total += current_at_voltage(fk, v);
        (total > i_mod ? lo : hi) = v;
    }
    const double v = 0.5 * (lo + hi);
    for (int k = 0; k < 4; ++k) {
        CHECK(sol.currents[k] == doctest::Approx(current_at_voltage(f[k], v)).epsilon(1e-8));
        CHECK(sol.v_cell[k] == doctest::Approx(v).epsilon(1e-10));
    }
    // bigger cells carry more current
    CHECK(sol.currents[1] > sol.currents[2]);
    CHECK(sol.currents[2] > sol.currents[3]);
    CHECK(sol.currents[3] > sol.currents[0]);
}

TEST_CASE("two cells match the linearised current divider") {
    auto cfg = homogeneous_module();
    cfg.n_p = 2;
    cfg.cells.resize(2);
    cfg.cells[1].eps_s_n *= 1.02;
    cfg.cells[1].eps_s_p *= 1.02;
    const auto models = models_of(cfg);
    auto states = states_at(models, 0.7);
    states[1].temperature = 303.0;
    const double r = 0.4e-3;
    const double i_mod = 2.0;
    const auto sol = solve_branch_currents(states, models, i_mod, r);
    const FrozenVoltage f1 = models[0].frozen(states[0]);
    const FrozenVoltage f2 = models[1].frozen(states[1]);

    // v1(I1) + 2R (I_mod - I1) = v2(I_mod - I1), cells linearised at x1, x2
    auto divider = [&](double x1, double x2) {
        const double a1 = f1.voltage(x1), s1 = f1.slope(x1);
        const double a2 = f2.voltage(x2), s2 = f2.slope(x2);
        // a1 + s1 (I1 - x1) + 2R (I_mod - I1) = a2 + s2 (I_mod - I1 - x2)
        const double lhs = s1 - 2 * r + s2;
        const double rhs = a2 + s2 * (i_mod - x2) - a1 + s1 * x1 - 2 * r * i_mod;
        return rhs / lhs;
    };
    // at the Newton solution the linear model reproduces it exactly
    CHECK(divider(sol.currents[0], sol.currents[1]) == doctest::Approx(sol.currents[0]).epsilon(1e-10));
    // from the even split it lands close
    const double i1 = divider(i_mod / 2, i_mod / 2);
    MESSAGE("divider " << i1 << " newton " << sol.currents[0]);
    CHECK(std::abs(i1 - sol.currents[0]) < 1e-3 * i_mod);
    CHECK(sol.v_mod == doctest::Approx(sol.v_cell[0] - 2 * r * i_mod).epsilon(1e-14));
}

TEST_CASE("random ladders satisfy Kirchhoff to 1e-9") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto cfg = fast_module(0.025, seed);
        const auto models = models_of(cfg);
        std::vector<CellState> states;
        for (int k = 0; k < 4; ++k) {
            states.push_back(models[k].initial_state(0.15 + 0.2 * k, 295.0 + 3.0 * k));
        }
        for (double i_mod : {-19.4, -3.0, 0.0, 7.0, 19.4}) {
            const auto sol = solve_branch_currents(states, models, i_mod, cfg.r_int * (1 + seed % 5));
            const double sum = std::accumulate(sol.currents.begin(), sol.currents.end(), 0.0);
            CHECK(std::abs(sum - i_mod) <= 1e-9 * std::max(1.0, std::abs(i_mod)));
            CHECK(sol.ladder_residual <= 1e-9);
            CHECK(sol.kcl_residual <= 1e-9 * std::max(1.0, std::abs(i_mod)));
        }
    }
}

TEST_CASE("voltage drive meets its target") {
    const auto cfg = fast_module();
    const auto models = models_of(cfg);
    const auto states = states_at(models, 0.95);
    std::vector<FrozenVoltage> f;
    for (int k = 0; k < 4; ++k) f.push_back(models[k].frozen(states[k]));
    const auto sol = solve_branch_currents(f, 4.2, Drive::voltage, cfg.r_int);
    CHECK(sol.v_mod == doctest::Approx(4.2).epsilon(1e-12));
    CHECK(sol.i_mod < 0.0);
    CHECK(sol.ladder_residual <= 1e-9);
}

TEST_CASE("homogeneous module without interconnection resistance produces identical cell traces") {
    auto cfg = homogeneous_module();
    cfg.r_int = 0.0;
    const auto trace = run_protocol(cfg);
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        for (int k = 1; k < 4; ++k) {
            REQUIRE(std::abs(trace.branch(r, k) - trace.branch(r, 0)) <= 1e-9);
            REQUIRE(std::abs(trace.temperature(r, k) - trace.temperature(r, 0)) <= 1e-9);
        }
    }
    CHECK(trace.cycles[0].sigma_i <= 1e-9);
    CHECK(trace.cycles[0].sigma_t <= 1e-9);
    CHECK(trace.cycles[0].dtmax <= 1e-9);
}

TEST_CASE("time is strictly increasing and the protocol completes") {
    auto cfg = fast_module();
    cfg.n_cycles = 2;
    const auto trace = run_protocol(cfg);
    for (std::size_t r = 1; r < trace.rows(); ++r) REQUIRE(trace.t[r] > trace.t[r - 1]);
    REQUIRE(trace.cycles.size() == 2);
    CHECK(trace.cycles[0].q_mod_ah > 18.0);
    CHECK(trace.cycles[1].t_start == trace.cycles[0].t_end);
    CHECK(trace.diag.max_kcl_residual <= 1e-9 * 4 * 4.85);
    CHECK(trace.diag.max_ladder_residual <= 1e-9);
}

TEST_CASE("half the discharge rate roughly doubles the discharge") {
    auto fast = fast_module();
    auto slow = fast;
    std::get<CcPhase>(slow.protocol.phases[3]).c_rate = 0.5;
    const auto a = run_protocol(fast).cycles[0];
    const auto b = run_protocol(slow).cycles[0];
    const double ratio = (b.discharge_t1 - b.discharge_t0) / (a.discharge_t1 - a.discharge_t0);
    MESSAGE("duration ratio " << ratio);
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("window integrals close") {
    const auto trace = run_protocol(fast_module());
    const auto& c = trace.cycles[0];
    const double q_cells = std::accumulate(c.q_branch_ah.begin(), c.q_branch_ah.end(), 0.0);
    CHECK(std::abs(q_cells - c.q_mod_ah) <= 1e-8 * c.q_mod_ah);
    CHECK(std::abs(c.e_cells_wh - c.e_ladder_loss_wh - c.e_mod_wh) <= 1e-6 * c.e_mod_wh);
    const auto re = summarize_samples(trace, c);
    CHECK(re.sigma_i == c.sigma_i);
    CHECK(re.sigma_t == c.sigma_t);
    CHECK(re.dtmax == c.dtmax);
    CHECK(re.q_mod_ah == c.q_mod_ah);
}

TEST_CASE("decimated traces keep the summaries close") {
    const auto cfg = fast_module();
    const auto full = run_protocol(cfg);
    const auto thin = run_protocol(cfg, SimOptions{10, -1});
    CHECK(thin.rows() < full.rows() / 5);
    CHECK(thin.cycles[0].sigma_i == full.cycles[0].sigma_i);
    const auto re = summarize_samples(thin, thin.cycles[0]);
    CHECK(re.sigma_i == doctest::Approx(full.cycles[0].sigma_i).epsilon(0.02));
}

TEST_CASE("larger interconnection resistance spreads the currents") {
    auto lo = fast_module(0.025, 11);
    auto hi = lo;
    lo.r_int = 0.1e-3;
    hi.r_int = 0.5e-3;
    CHECK(run_protocol(hi).cycles[0].sigma_i > run_protocol(lo).cycles[0].sigma_i);
}

TEST_CASE("mse identities") {
    const auto a = synthetic({0, 1, 2, 3, 4}, 3, 1.0, 300.0);
    for (double m : mse_current(a, a)) CHECK(m == 0.0);
    for (double m : mse_temperature(a, a)) CHECK(m == 0.0);

    auto b = a;
    for (std::size_t r = 0; r < b.rows(); ++r) b.i_branch[r * 3 + 1] += 0.25;
    const auto m = mse_current(a, b);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(m[2] == 0.0);

    const auto c = synthetic({0.5, 1.7, 2.2, 3.9, 6.0}, 3, 1.3, 301.0);
    const auto ab = mse_temperature(a, c);
    const auto ba = mse_temperature(c, a);
    for (int k = 0; k < 3; ++k) CHECK(ab[k] == doctest::Approx(ba[k]).epsilon(1e-14));

    const auto far = synthetic({10, 11, 12}, 3, 1.0, 300.0);
    CHECK_THROWS_AS(mse_current(a, far), DomainError);
}

}
