#pragma once

#include "parapack/stats/regression.hpp"

namespace parapack::stats {

struct StepwiseOptions {
    double p_enter = 0.05;
    double p_remove = 0.10;
    int max_steps = 200;
};

/// Bidirectional stepwise selection starting from the intercept-only model.
/// Each round adds the eligible candidate with the smallest p-value below p_enter;
/// when nothing enters, removes the term with the largest p-value above p_remove.
/// Quadratic and interaction terms enter only after their linear parents and a linear
/// term leaves only once none of its children remain. Candidates that would make the
/// design rank deficient are skipped.
RegressionModel stepwise_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, std::span<const Term> candidates,
                             std::span<const std::string> predictors, const StepwiseOptions& options = {});

}  // namespace parapack::stats
