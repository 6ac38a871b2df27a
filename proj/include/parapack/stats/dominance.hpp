#pragma once

#include <string>
#include <vector>

#include "parapack/stats/regression.hpp"

namespace parapack::stats {

inline constexpr int kMaxDominanceGroups = 15;

/// General dominance share per predictor appearing in the model.
struct Importance {
    std::vector<int> predictors;       // column indices into the model's predictor list
    std::vector<std::string> names;
    std::vector<double> shares;
    double r_squared = 0.0;            // full model, equals the sum of shares
};

/// Groups are predictors; a subset of groups carries every model term whose linear
/// parents all lie in the subset. Each share averages the R^2 gain of adding its group
/// over subsets of the others, first within each subset size, then across sizes.
/// R^2 of the 2^g subsets is evaluated in parallel; the reduction order is fixed.
Importance relative_importance(const RegressionModel& model, const Eigen::MatrixXd& z, const Eigen::VectorXd& y);
Importance relative_importance_serial(const RegressionModel& model, const Eigen::MatrixXd& z,
                                      const Eigen::VectorXd& y);

struct ParetoRow {
    std::string predictor;
    double share = 0.0;
    double cumulative = 0.0;
};

struct ParetoReport {
    std::vector<ParetoRow> rows;  // descending share
    double r_squared = 0.0;
};

ParetoReport pareto_report(const Importance& importance);
std::string format_pareto(const ParetoReport& report);

}  // namespace parapack::stats
