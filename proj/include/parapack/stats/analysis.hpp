#pragma once

#include <string>
#include <vector>

#include "parapack/stats/dominance.hpp"
#include "parapack/stats/stepwise.hpp"
#include "parapack/table.hpp"

namespace parapack::stats {

struct AnalysisOptions {
    bool extended = false;
    StepwiseOptions stepwise;
};

struct Analysis {
    std::string response;
    std::vector<std::string> predictors;
    std::vector<double> modules;  // module ids of the rows used
    Eigen::MatrixXd raw;          // predictor columns as read
    Eigen::MatrixXd z;            // standardised
    Eigen::VectorXd y;
    Standardizer standardizer;
    RegressionModel model;        // stepwise over the full quadratic candidate set
    Importance importance;
    ParetoReport pareto;
};

/// Stepwise MLR and dominance analysis of one response over the completed rows of a
/// campaign results table.
Analysis analyze_results(const Table& results, const std::string& response, const AnalysisOptions& options = {});

/// term, coefficient, raw_coefficient, std_error, t_stat, p_value
Table model_table(const Analysis& a);
/// rank, predictor, share, cumulative
Table pareto_table(const ParetoReport& report);
/// module, observed, fitted, residual
Table residual_table(const Analysis& a);

std::string format_model(const Analysis& a);

}  // namespace parapack::stats
