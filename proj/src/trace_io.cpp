#include "parapack/trace_io.hpp"

#include <cmath>
#include <string>

namespace parapack {

namespace {

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

std::vector<double> per_cell(const std::vector<double>& row_major, int n_p, int k) {
    std::vector<double> out;
    out.reserve(row_major.size() / n_p);
    for (std::size_t i = k; i < row_major.size(); i += n_p) out.push_back(row_major[i]);
    return out;
}

}  // namespace

Table trace_table(const SimTrace& trace) {
    Table t;
    t.add("t", trace.t);
    t.add("cycle", as_double(trace.cycle));
    t.add("phase", as_double(trace.phase));
    t.add("v_mod", trace.v_mod);
    t.add("i_mod", trace.i_mod);
    const int n = trace.n_p;
    for (int k = 0; k < n; ++k) t.add("i_" + std::to_string(k + 1), per_cell(trace.i_branch, n, k));
    for (int k = 0; k < n; ++k) t.add("temp_" + std::to_string(k + 1), per_cell(trace.temp, n, k));
    for (int k = 0; k < n; ++k) t.add("soc_" + std::to_string(k + 1), per_cell(trace.soc, n, k));
    for (int k = 0; k < n; ++k) t.add("r_sei_" + std::to_string(k + 1), per_cell(trace.r_sei, n, k));
    return t;
}

Table summary_table(const SimTrace& trace) {
    Table t;
    auto col = [&](const char* name, auto get) {
        std::vector<double> v;
        for (const auto& c : trace.cycles) v.push_back(get(c));
        t.add(name, std::move(v));
    };
    col("cycle", [](const CycleSummary& c) { return double(c.cycle); });
    col("t_start", [](const CycleSummary& c) { return c.t_start; });
    col("t_end", [](const CycleSummary& c) { return c.t_end; });
    col("discharge_t0", [](const CycleSummary& c) { return c.discharge_t0; });
    col("discharge_t1", [](const CycleSummary& c) { return c.discharge_t1; });
    col("q_mod_ah", [](const CycleSummary& c) { return c.q_mod_ah; });
    col("e_mod_wh", [](const CycleSummary& c) { return c.e_mod_wh; });
    col("e_cells_wh", [](const CycleSummary& c) { return c.e_cells_wh; });
    col("e_ladder_loss_wh", [](const CycleSummary& c) { return c.e_ladder_loss_wh; });
    col("sigma_i", [](const CycleSummary& c) { return c.sigma_i; });
    col("sigma_t", [](const CycleSummary& c) { return c.sigma_t; });
    col("dtmax", [](const CycleSummary& c) { return c.dtmax; });
    for (int k = 0; k < trace.n_p; ++k) {
        const std::string s = std::to_string(k + 1);
        std::vector<double> q, soc, rsei, tavg;
        for (const auto& c : trace.cycles) {
            q.push_back(c.q_branch_ah[k]);
            soc.push_back(c.soc_eod.empty() ? std::nan("") : c.soc_eod[k]);
            rsei.push_back(c.r_sei_end[k]);
            tavg.push_back(c.temp_avg[k]);
        }
        t.add("q_branch_ah_" + s, std::move(q));
        t.add("soc_eod_" + s, std::move(soc));
        t.add("r_sei_end_" + s, std::move(rsei));
        t.add("temp_avg_" + s, std::move(tavg));
    }
    return t;
}

}  // namespace parapack
