#include "parapack/stats/dominance.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>

#include "parapack/error.hpp"

namespace parapack::stats {

namespace {

struct Groups {
    std::vector<int> predictors;
    // for each term, bitmask over groups it needs
    std::vector<unsigned> need;
};

Groups collect(const RegressionModel& model) {
    Groups g;
    for (const Term& t : model.terms) {
        for (int p : {t.a, t.b})
            if (p >= 0 && std::find(g.predictors.begin(), g.predictors.end(), p) == g.predictors.end())
                g.predictors.push_back(p);
    }
    std::sort(g.predictors.begin(), g.predictors.end());
    if (static_cast<int>(g.predictors.size()) > kMaxDominanceGroups)
        throw StatsError("relative_importance: " + std::to_string(g.predictors.size()) +
                         " predictor groups exceed the subset-enumeration limit of " +
                         std::to_string(kMaxDominanceGroups) + "; reduce the predictor set");
    auto bit = [&](int p) {
        const auto it = std::find(g.predictors.begin(), g.predictors.end(), p);
        return 1u << static_cast<unsigned>(it - g.predictors.begin());
    };
    for (const Term& t : model.terms) g.need.push_back(bit(t.a) | (t.b >= 0 ? bit(t.b) : 0u));
    return g;
}

double subset_r2(unsigned mask, const Groups& g, const Eigen::MatrixXd& full, const Eigen::VectorXd& y) {
    if (mask == 0) return 0.0;
    std::vector<Eigen::Index> cols{0};
    for (std::size_t j = 0; j < g.need.size(); ++j)
        if ((g.need[j] & mask) == g.need[j]) cols.push_back(static_cast<Eigen::Index>(j) + 1);
    Eigen::MatrixXd x(full.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = full.col(cols[c]);
    return r_squared_of(x, y);
}

Importance reduce(const RegressionModel& model, const Groups& g, const std::vector<double>& r2) {
    const int n = static_cast<int>(g.predictors.size());
    Importance out;
    out.predictors = g.predictors;
    for (int p : g.predictors) out.names.push_back(model.predictors[p]);
    out.shares.assign(n, 0.0);
    out.r_squared = r2.empty() ? 0.0 : r2.back();
    if (n == 0) return out;
    // binomial(n-1, k)
    std::vector<double> binom(n, 1.0);
    for (int k = 1; k < n; ++k) binom[k] = binom[k - 1] * static_cast<double>(n - k) / static_cast<double>(k);
    const unsigned full = (1u << n) - 1u;
    for (int i = 0; i < n; ++i) {
        const unsigned bit = 1u << i;
        std::vector<double> by_size(n, 0.0);
        for (unsigned s = 0; s <= full; ++s) {
            if (s & bit) continue;
            by_size[std::popcount(s)] += r2[s | bit] - r2[s];
        }
        double total = 0.0;
        for (int k = 0; k < n; ++k) total += by_size[k] / binom[k];
        out.shares[i] = total / static_cast<double>(n);
    }
    return out;
}

Importance importance_impl(const RegressionModel& model, const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                           bool parallel) {
    const Groups g = collect(model);
    const Eigen::MatrixXd x = design_matrix(z, model.terms);
    const long count = 1L << g.predictors.size();
    std::vector<double> r2(static_cast<std::size_t>(count), 0.0);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long s = 0; s < count; ++s) r2[s] = subset_r2(static_cast<unsigned>(s), g, x, y);
    } else {
        for (long s = 0; s < count; ++s) r2[s] = subset_r2(static_cast<unsigned>(s), g, x, y);
    }
    return reduce(model, g, r2);
}

}  // namespace

Importance relative_importance(const RegressionModel& model, const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    return importance_impl(model, z, y, true);
}

Importance relative_importance_serial(const RegressionModel& model, const Eigen::MatrixXd& z,
                                      const Eigen::VectorXd& y) {
    return importance_impl(model, z, y, false);
}

ParetoReport pareto_report(const Importance& importance) {
    ParetoReport r;
    r.r_squared = importance.r_squared;
    std::vector<std::size_t> order(importance.shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance.shares[a] > importance.shares[b]; });
    double cum = 0.0;
    for (std::size_t i : order) {
        cum += importance.shares[i];
        r.rows.push_back({importance.names[i], importance.shares[i], cum});
    }
    return r;
}

std::string format_pareto(const ParetoReport& report) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-16s %12s %12s\n", "rank", "predictor", "share", "cumulative");
    out += line;
    int rank = 1;
    for (const auto& row : report.rows) {
        std::snprintf(line, sizeof line, "%-4d %-16s %12.6f %12.6f\n", rank++, row.predictor.c_str(), row.share,
                      row.cumulative);
        out += line;
    }
    std::snprintf(line, sizeof line, "R^2 = %.6f\n", report.r_squared);
    out += line;
    return out;
}

}  // namespace parapack::stats
