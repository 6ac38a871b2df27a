#pragma once

#include <Eigen/Dense>
#include <compare>
#include <span>
#include <string>
#include <vector>

namespace parapack::stats {

/// One column of the regression design built from predictor columns a and b.
struct Term {
    enum class Kind { linear, quadratic, interaction };
    Kind kind = Kind::linear;
    int a = 0;
    int b = -1;  // interaction partner, a < b

    static Term linear(int a) { return {Kind::linear, a, -1}; }
    static Term quadratic(int a) { return {Kind::quadratic, a, -1}; }
    static Term interaction(int a, int b) { return a < b ? Term{Kind::interaction, a, b} : Term{Kind::interaction, b, a}; }

    bool involves(int predictor) const { return a == predictor || b == predictor; }
    friend auto operator<=>(const Term&, const Term&) = default;
};

std::string term_name(const Term& term, std::span<const std::string> predictors);

/// Linear, then quadratic, then pairwise interaction terms over q predictors.
std::vector<Term> full_quadratic_terms(int q);

/// True when every linear parent of `term` is in `present`.
bool parents_present(const Term& term, std::span<const Term> present);

/// Column means and sample standard deviations (a zero scale is replaced by 1).
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer fit(const Eigen::MatrixXd& x);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

/// Intercept column followed by one column per term.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& predictors, std::span<const Term> terms);

struct RegressionModel {
    std::vector<std::string> predictors;   // names of predictor columns
    std::vector<Term> terms;               // excluding the intercept
    std::vector<std::string> column_names; // "(Intercept)" then one per term
    Eigen::VectorXd coefficients;          // on the fitted (standardised) scale
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    Eigen::VectorXd raw_coefficients;      // same terms refitted on raw predictors; empty if not computed
    Eigen::VectorXd residuals;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double sigma = 0.0;                    // residual standard error
    int n_obs = 0;
    int dof = 0;
    std::vector<std::string> history;      // "+term" / "-term" in stepwise order
    bool step_limit_hit = false;
};

/// Least squares on an explicit design (first column normally the intercept).
/// Throws StatsError naming the collinear columns when X is rank deficient.
RegressionModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> column_names);

/// Fits intercept + terms on `z` (typically standardised predictors).
RegressionModel fit_terms(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, std::span<const Term> terms,
                          std::span<const std::string> predictors);

/// Centred R^2 of the least-squares fit of y on X; tolerates rank deficiency.
double r_squared_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace parapack::stats
