#include "parapack/stats/stepwise.hpp"

#include <algorithm>
#include <optional>

#include "parapack/error.hpp"

namespace parapack::stats {

namespace {

std::optional<RegressionModel> try_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                       std::span<const Term> terms, std::span<const std::string> predictors) {
    if (z.rows() < static_cast<Eigen::Index>(terms.size()) + 2) return std::nullopt;
    try {
        return fit_terms(z, y, terms, predictors);
    } catch (const StatsError&) {
        return std::nullopt;
    }
}

bool has_children(const Term& t, std::span<const Term> terms) {
    if (t.kind != Term::Kind::linear) return false;
    return std::any_of(terms.begin(), terms.end(),
                       [&](const Term& o) { return o.kind != Term::Kind::linear && o.involves(t.a); });
}

}  // namespace

RegressionModel stepwise_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, std::span<const Term> candidates,
                             std::span<const std::string> predictors, const StepwiseOptions& options) {
    if (candidates.empty()) throw StatsError("stepwise_fit: no candidate terms");
    std::vector<Term> current;
    auto model = try_fit(z, y, current, predictors);
    if (!model) throw StatsError("stepwise_fit: intercept-only model cannot be fitted");
    std::vector<std::string> history;
    int steps = 0;
    bool limit = false;

    for (;;) {
        if (steps >= options.max_steps) {
            limit = true;
            break;
        }
        // forward
        double best_p = options.p_enter;
        std::optional<Term> best;
        std::optional<RegressionModel> best_model;
        for (const Term& c : candidates) {
            if (std::find(current.begin(), current.end(), c) != current.end()) continue;
            if (!parents_present(c, current)) continue;
            std::vector<Term> trial = current;
            trial.push_back(c);
            auto m = try_fit(z, y, trial, predictors);
            if (!m) continue;
            const double p = m->p_values(m->p_values.size() - 1);
            if (p < best_p) {
                best_p = p;
                best = c;
                best_model = std::move(m);
            }
        }
        if (best) {
            current.push_back(*best);
            model = std::move(best_model);
            history.push_back("+" + term_name(*best, predictors));
            ++steps;
            continue;
        }
        // backward
        double worst_p = options.p_remove;
        std::optional<std::size_t> worst;
        for (std::size_t j = 0; j < current.size(); ++j) {
            if (has_children(current[j], current)) continue;
            const double p = model->p_values(static_cast<Eigen::Index>(j) + 1);
            if (p > worst_p) {
                worst_p = p;
                worst = j;
            }
        }
        if (!worst) break;
        history.push_back("-" + term_name(current[*worst], predictors));
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(*worst));
        model = try_fit(z, y, current, predictors);
        if (!model) throw StatsError("stepwise_fit: reduced model became unfittable");
        ++steps;
    }
    model->history = std::move(history);
    model->step_limit_hit = limit;
    return std::move(*model);
}

}  // namespace parapack::stats
