#include "parapack/stats/analysis.hpp"

#include <cmath>
#include <cstdio>

#include "parapack/error.hpp"
#include "parapack/stats/predictors.hpp"

namespace parapack::stats {

Analysis analyze_results(const Table& results, const std::string& response, const AnalysisOptions& options) {
    Analysis a;
    a.response = response;
    a.predictors = predictor_columns(response, options.extended);
    if (!results.has(response)) throw StatsError("results table has no column '" + response + "'");
    for (const auto& p : a.predictors)
        if (!results.has(p)) throw StatsError("results table has no column '" + p + "'");

    const auto& status = results.strings("status");
    const auto& ids = results.numbers("module");
    const auto& yc = results.numbers(response);
    std::vector<std::size_t> use;
    for (std::size_t r = 0; r < results.rows(); ++r) {
        if (status[r] != "ok" || !std::isfinite(yc[r])) continue;
        bool finite = true;
        for (const auto& p : a.predictors) finite = finite && std::isfinite(results.numbers(p)[r]);
        if (finite) use.push_back(r);
    }
    const auto n = static_cast<Eigen::Index>(use.size());
    const auto q = static_cast<Eigen::Index>(a.predictors.size());
    a.raw.resize(n, q);
    a.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a.modules.push_back(ids[use[i]]);
        a.y(i) = yc[use[i]];
        for (Eigen::Index j = 0; j < q; ++j) a.raw(i, j) = results.numbers(a.predictors[j])[use[i]];
    }
    if (n < 3) throw StatsError("too few completed modules (" + std::to_string(n) + ") to fit '" + response + "'");
    a.standardizer = Standardizer::fit(a.raw);
    a.z = a.standardizer.apply(a.raw);

    const auto candidates = full_quadratic_terms(static_cast<int>(q));
    a.model = stepwise_fit(a.z, a.y, candidates, a.predictors, options.stepwise);
    try {
        a.model.raw_coefficients = fit_terms(a.raw, a.y, a.model.terms, a.predictors).coefficients;
    } catch (const StatsError&) {
        a.model.raw_coefficients = Eigen::VectorXd::Constant(a.model.coefficients.size(), std::nan(""));
    }
    a.importance = relative_importance(a.model, a.z, a.y);
    a.pareto = pareto_report(a.importance);
    return a;
}

Table model_table(const Analysis& a) {
    Table t;
    const auto& m = a.model;
    t.add("term", m.column_names);
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    t.add("coefficient", vec(m.coefficients));
    t.add("raw_coefficient", vec(m.raw_coefficients));
    t.add("std_error", vec(m.std_errors));
    t.add("t_stat", vec(m.t_stats));
    t.add("p_value", vec(m.p_values));
    return t;
}

Table pareto_table(const ParetoReport& report) {
    Table t;
    std::vector<double> rank, share, cum;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        rank.push_back(static_cast<double>(i + 1));
        names.push_back(report.rows[i].predictor);
        share.push_back(report.rows[i].share);
        cum.push_back(report.rows[i].cumulative);
    }
    t.add("rank", std::move(rank));
    t.add("predictor", std::move(names));
    t.add("share", std::move(share));
    t.add("cumulative", std::move(cum));
    return t;
}

Table residual_table(const Analysis& a) {
    Table t;
    std::vector<double> obs(a.y.data(), a.y.data() + a.y.size());
    std::vector<double> res(a.model.residuals.data(), a.model.residuals.data() + a.model.residuals.size());
    std::vector<double> fit(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) fit[i] = obs[i] - res[i];
    t.add("module", a.modules);
    t.add("observed", std::move(obs));
    t.add("fitted", std::move(fit));
    t.add("residual", std::move(res));
    return t;
}

std::string format_model(const Analysis& a) {
    std::string out;
    char line[256];
    const auto& m = a.model;
    std::snprintf(line, sizeof line, "response %s, %d observations, %zu terms, R^2 = %.6f (adjusted %.6f)\n",
                  a.response.c_str(), m.n_obs, m.terms.size(), m.r_squared, m.adj_r_squared);
    out += line;
    std::snprintf(line, sizeof line, "%-32s %14s %14s %10s %12s\n", "term", "coefficient", "std_error", "t",
                  "p");
    out += line;
    for (Eigen::Index j = 0; j < m.coefficients.size(); ++j) {
        std::snprintf(line, sizeof line, "%-32s %14.6g %14.6g %10.3f %12.4g\n", m.column_names[j].c_str(),
                      m.coefficients(j), m.std_errors(j), m.t_stats(j), m.p_values(j));
        out += line;
    }
    if (m.step_limit_hit) out += "stepwise stopped at the step limit\n";
    return out;
}

}  // namespace parapack::stats
