#include "parapack/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <omp.h>

#include "parapack/trace_io.hpp"

namespace parapack {

CampaignSpec fast_campaign() {
    CampaignSpec s;
    s.n_modules = 50;
    s.n_cycles = 50;
    s.numerics = fast_numerics();
    return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) { return splitmix64(splitmix64(master) + index); }

CellParameters campaign_nominal(const CampaignSpec& spec) { return lg_m50_like(spec.nominal_capacity_ah); }

ModuleConfig campaign_module(const CampaignSpec& spec, int index) {
    ModuleConfig cfg = sample_module(child_seed(spec.master_seed, static_cast<std::uint64_t>(index)),
                                     campaign_nominal(spec), spec.ranges, spec.n_p);
    cfg.n_cycles = spec.n_cycles;
    cfg.t_amb = spec.t_amb;
    cfg.numerics = spec.numerics;
    return cfg;
}

ModuleConfig campaign_reference(const CampaignSpec& spec) {
    ModuleConfig cfg = reference_module(campaign_nominal(spec), spec.n_p);
    cfg.n_cycles = 1;
    cfg.t_amb = spec.t_amb;
    cfg.numerics = spec.numerics;
    return cfg;
}

SimTrace simulate_reference(const CampaignSpec& spec) {
    return run_protocol(campaign_reference(spec), SimOptions{0, 0});
}

std::vector<std::string> result_columns(int n_p) {
    std::vector<std::string> c{"module", "seed", "status", "r_int", "sp"};
    for (int k = 1; k <= n_p; ++k) c.push_back("eps_n_" + std::to_string(k));
    for (int k = 1; k <= n_p; ++k) c.push_back("eps_p_" + std::to_string(k));
    for (const char* p : {"mu_eps_n", "mu_eps_p", "sigma_eps_n", "sigma_eps_p", "loc", "mu_comb", "sigma_comb",
                          "loc_n", "loc_p", "mu_soc", "sigma_soc"})
        c.push_back(p);
    for (const auto& r : stats::response_names()) c.push_back(r);
    for (const char* x : {"e_lost_pct", "q_mod_ah", "e_mod_wh"}) c.push_back(x);
    for (int k = 1; k <= n_p; ++k) c.push_back("temp_avg_" + std::to_string(k));
    for (int k = 1; k <= n_p; ++k) c.push_back("r_sei_" + std::to_string(k));
    for (const char* x : {"max_kcl_residual", "max_ladder_residual", "max_thermal_residual", "accepted_steps"})
        c.push_back(x);
    return c;
}

namespace {

Table row_table(const std::vector<std::string>& names, const std::vector<double>& values, const std::string& seed,
                const std::string& status) {
    Table t;
    std::size_t v = 0;
    for (const auto& n : names) {
        if (n == "seed") t.add(n, std::vector<std::string>{seed});
        else if (n == "status") t.add(n, std::vector<std::string>{status});
        else t.add(n, std::vector<double>{values[v++]});
    }
    return t;
}

void append_rows(Table& dst, const Table& src) {
    if (dst.names.empty()) {
        dst = src;
        return;
    }
    for (std::size_t j = 0; j < dst.columns.size(); ++j) {
        std::visit(
            [&](auto& d) {
                using V = std::decay_t<decltype(d)>;
                const auto& s = std::get<V>(src.columns[j]);
                d.insert(d.end(), s.begin(), s.end());
            },
            dst.columns[j]);
    }
}

std::string status_text(const std::string& what) {
    std::string s = "failed: " + what;
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

std::filesystem::path marker_path(const CampaignSpec& spec, int index) {
    char name[32];
    std::snprintf(name, sizeof name, "module_%06d.csv", index);
    return spec.output_dir / "modules" / name;
}

}  // namespace

Table run_module(const CampaignSpec& spec, int index, const SimTrace& reference, SimTrace* trace_out,
                 bool record_samples) {
    const std::vector<std::string> names = result_columns(spec.n_p);
    const ModuleConfig cfg = campaign_module(spec, index);
    std::vector<double> v;
    v.push_back(index);
    v.push_back(cfg.r_int);
    v.push_back(cfg.spacing);
    for (const auto& c : cfg.cells) v.push_back(c.eps_s_n);
    for (const auto& c : cfg.cells) v.push_back(c.eps_s_p);
    char seed[24];
    std::snprintf(seed, sizeof seed, "0x%016llx", static_cast<unsigned long long>(cfg.seed));
    try {
        SimOptions opt;
        opt.record_every = trace_out && record_samples ? 1 : 0;
        SimTrace trace = run_protocol(cfg, opt);
        const auto p = stats::compute_predictors(cfg, trace, spec.predictor_options);
        const auto r = stats::compute_responses(trace, &reference);
        for (double x : {p.mu_eps_n, p.mu_eps_p, p.sigma_eps_n, p.sigma_eps_p, p.loc, p.mu_comb, p.sigma_comb, p.loc_n,
                         p.loc_p, p.mu_soc, p.sigma_soc})
            v.push_back(x);
        for (double x : {r.sigma_i, r.sigma_t, r.dtmax, r.pct_delta_q.value_or(std::nan("")),
                         r.pct_delta_e.value_or(std::nan("")), r.e_lost, r.sigma_r_sei})
            v.push_back(x);
        v.push_back(r.e_lost_pct);
        v.push_back(trace.cycles.front().q_mod_ah);
        v.push_back(trace.cycles.front().e_mod_wh);
        for (double x : trace.temp_time_avg) v.push_back(x);
        for (double x : trace.cycles.back().r_sei_end) v.push_back(x);
        v.push_back(trace.diag.max_kcl_residual);
        v.push_back(trace.diag.max_ladder_residual);
        v.push_back(trace.diag.max_thermal_residual);
        v.push_back(static_cast<double>(trace.diag.accepted_steps));
        if (trace_out) *trace_out = std::move(trace);
        return row_table(names, v, seed, "ok");
    } catch (const std::exception& e) {
        v.resize(names.size() - 2, std::nan(""));
        return row_table(names, v, seed, status_text(e.what()));
    }
}

namespace {

Table campaign_impl(const CampaignSpec& spec, int workers, bool parallel, const ModuleObserver& observe = {}) {
    const bool persist = !spec.output_dir.empty();
    const SimTrace reference = simulate_reference(spec);
    if (persist) {
        std::filesystem::create_directories(spec.output_dir / "modules");
        write_csv(summary_table(reference), spec.output_dir / "reference_summary.csv");
    }
    std::vector<Table> rows(static_cast<std::size_t>(spec.n_modules));
    std::vector<int> todo;
    for (int i = 0; i < spec.n_modules; ++i) {
        if (persist && std::filesystem::exists(marker_path(spec, i))) rows[i] = read_csv(marker_path(spec, i));
        else todo.push_back(i);
    }
    if (spec.stop_after >= 0 && static_cast<int>(todo.size()) > spec.stop_after) todo.resize(spec.stop_after);

    auto job = [&](int i) {
        SimTrace trace;
        const bool keep = persist && spec.keep_traces;
        rows[i] = run_module(spec, i, reference, keep || observe ? &trace : nullptr, keep);
        if (observe && rows[i].strings("status")[0] == "ok") observe(i, trace);
        if (keep && rows[i].strings("status")[0] == "ok") {
            char name[32];
            std::snprintf(name, sizeof name, "module_%06d", i);
            write_csv(trace_table(trace), spec.output_dir / "traces" / (std::string(name) + "_trace.csv"));
            write_csv(summary_table(trace), spec.output_dir / "traces" / (std::string(name) + "_summary.csv"));
        }
        if (persist) write_csv(rows[i], marker_path(spec, i));
    };

    const int n = static_cast<int>(todo.size());
    if (parallel) {
        const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (int j = 0; j < n; ++j) job(todo[j]);
    } else {
        for (int j = 0; j < n; ++j) job(todo[j]);
    }

    Table out;
    for (int i = 0; i < spec.n_modules; ++i)
        if (!rows[i].names.empty()) append_rows(out, rows[i]);
    const bool complete = static_cast<int>(out.rows()) == spec.n_modules;
    if (persist && complete) write_csv(out, spec.output_dir / "results.csv");
    return out;
}

}  // namespace

Table run_campaign(const CampaignSpec& spec, int workers) { return campaign_impl(spec, workers, true); }
Table run_campaign(const CampaignSpec& spec, int workers, const ModuleObserver& observe) {
    return campaign_impl(spec, workers, true, observe);
}
Table run_campaign_serial(const CampaignSpec& spec) { return campaign_impl(spec, 1, false); }

}  // namespace parapack
