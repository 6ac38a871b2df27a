#include "parapack/stats/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "parapack/error.hpp"

namespace parapack::stats {

std::vector<double> loc_weights(int n_p) {
    std::vector<double> w(n_p);
    const double half = n_p / 2.0;
    for (int i = 1; i <= n_p; ++i) w[i - 1] = i <= half ? (half + 1.0) - i : half - i;
    return w;
}

double sample_sd(const std::vector<double>& x) {
    if (x.size() < 2) return 0.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

namespace {

double mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

std::vector<double> eps_of(const ModuleConfig& cfg, Electrode e) {
    std::vector<double> out;
    for (const auto& c : cfg.cells) out.push_back(e == Electrode::negative ? c.eps_s_n : c.eps_s_p);
    return out;
}

double weighted(const std::vector<double>& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i];
    return s;
}

}  // namespace

std::vector<double> normalized_eps(const ModuleConfig& cfg, Electrode electrode, const PredictorOptions& options,
                                   bool* degenerate) {
    const std::vector<double> eps = eps_of(cfg, electrode);
    double lo, hi;
    if (options.normalization == Normalization::module_minmax) {
        const auto [a, b] = std::minmax_element(eps.begin(), eps.end());
        lo = *a;
        hi = *b;
    } else {
        const double nominal = electrode == Electrode::negative ? cfg.nominal.eps_s_n : cfg.nominal.eps_s_p;
        std::tie(lo, hi) = eps_bounds(capacity_from_eps(nominal, electrode), options.capacity_rel_tol, electrode);
    }
    std::vector<double> out(eps.size(), 0.5);
    if (!(hi > lo)) {
        if (degenerate) *degenerate = true;
        return out;
    }
    for (std::size_t i = 0; i < eps.size(); ++i) out[i] = (eps[i] - lo) / (hi - lo);
    return out;
}

PredictorSet compute_predictors(const ModuleConfig& cfg, const SimTrace& trace, const PredictorOptions& options) {
    if (trace.cycles.empty()) throw DomainError("compute_predictors: trace holds no complete cycle");
    const int n = cfg.n_p;
    PredictorSet p;
    const auto eps_n = eps_of(cfg, Electrode::negative);
    const auto eps_p = eps_of(cfg, Electrode::positive);
    p.mu_eps_n = mean(eps_n);
    p.mu_eps_p = mean(eps_p);
    p.sigma_eps_n = sample_sd(eps_n);
    p.sigma_eps_p = sample_sd(eps_p);
    p.r_int = cfg.r_int;
    p.sp = cfg.spacing;

    bool degenerate = false;
    const auto bar_n = normalized_eps(cfg, Electrode::negative, options, &degenerate);
    const auto bar_p = normalized_eps(cfg, Electrode::positive, options, &degenerate);
    p.degenerate_normalization = degenerate;
    std::vector<double> comb(n);
    for (int i = 0; i < n; ++i) comb[i] = std::min(bar_n[i], bar_p[i]);
    const auto w = loc_weights(n);
    p.loc = weighted(w, comb);
    p.mu_comb = mean(comb);
    p.sigma_comb = sample_sd(comb);
    p.loc_n = weighted(w, eps_n);
    p.loc_p = weighted(w, eps_p);

    const CycleSummary& first = trace.cycles.front();
    p.mu_soc = mean(first.soc_eod);
    p.sigma_soc = sample_sd(first.soc_eod);
    p.dtmax = first.dtmax;
    return p;
}

ResponseSet compute_responses(const SimTrace& trace, const SimTrace* reference) {
    if (trace.cycles.empty()) throw DomainError("compute_responses: trace holds no complete cycle");
    const CycleSummary& first = trace.cycles.front();
    const CycleSummary& last = trace.cycles.back();
    ResponseSet r;
    r.sigma_i = first.sigma_i;
    r.sigma_t = first.sigma_t;
    r.dtmax = first.dtmax;
    r.e_lost = last.e_mod_wh - first.e_mod_wh;
    r.e_lost_pct = first.e_mod_wh != 0.0 ? 100.0 * r.e_lost / first.e_mod_wh : 0.0;
    r.sigma_r_sei = sample_sd(last.r_sei_end);
    if (reference && !reference->cycles.empty()) {
        const CycleSummary& ref = reference->cycles.front();
        r.pct_delta_e = 100.0 * (first.e_mod_wh - ref.e_mod_wh) / ref.e_mod_wh;
        r.pct_delta_q = 100.0 * (first.q_mod_ah - ref.q_mod_ah) / ref.q_mod_ah;
    }
    return r;
}

const std::vector<std::string>& response_names() {
    static const std::vector<std::string> names{"sigma_i", "sigma_t", "dtmax", "dq", "de", "elost", "sigma_rsei"};
    return names;
}

std::vector<std::string> predictor_columns(const std::string& response, bool extended) {
    if (std::find(response_names().begin(), response_names().end(), response) == response_names().end())
        throw DomainError("unknown response '" + response + "'");
    std::vector<std::string> base{"mu_eps_n", "mu_eps_p", "sigma_eps_n", "sigma_eps_p", "loc", "r_int", "sp"};
    if (!extended) return base;
    if (response == "sigma_i") {
        base.push_back("dtmax");
        base.push_back("sigma_soc");
        return base;
    }
    if (response == "dq" || response == "de") return {"mu_comb", "sigma_comb", "loc", "r_int", "sp", "mu_soc"};
    if (response == "sigma_t" || response == "dtmax")
        return {"mu_eps_n", "mu_eps_p", "sigma_eps_n", "sigma_eps_p", "loc_n", "loc_p", "r_int", "sp"};
    base.push_back("loc_n");
    base.push_back("loc_p");
    return base;
}

}  // namespace parapack::stats
