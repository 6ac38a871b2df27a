#include "parapack/stats/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parapack/error.hpp"
#include "parapack/stats/distributions.hpp"

namespace parapack::stats {

std::string term_name(const Term& term, std::span<const std::string> predictors) {
    switch (term.kind) {
        case Term::Kind::linear: return predictors[term.a];
        case Term::Kind::quadratic: return predictors[term.a] + "^2";
        case Term::Kind::interaction: return predictors[term.a] + ":" + predictors[term.b];
    }
    return {};
}

std::vector<Term> full_quadratic_terms(int q) {
    std::vector<Term> out;
    for (int a = 0; a < q; ++a) out.push_back(Term::linear(a));
    for (int a = 0; a < q; ++a) out.push_back(Term::quadratic(a));
    for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b) out.push_back(Term::interaction(a, b));
    return out;
}

bool parents_present(const Term& term, std::span<const Term> present) {
    if (term.kind == Term::Kind::linear) return true;
    auto has = [&](int p) { return std::find(present.begin(), present.end(), Term::linear(p)) != present.end(); };
    return has(term.a) && (term.b < 0 || has(term.b));
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
    Standardizer s;
    const double n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean(j)).square().sum() / std::max(1.0, n - 1.0);
        s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd z = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) z.col(j) = (x.col(j).array() - mean(j)) / scale(j);
    return z;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& predictors, std::span<const Term> terms) {
    Eigen::MatrixXd x(predictors.rows(), static_cast<Eigen::Index>(terms.size()) + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < terms.size(); ++j) {
        const Term& t = terms[j];
        auto col = x.col(static_cast<Eigen::Index>(j) + 1);
        switch (t.kind) {
            case Term::Kind::linear: col = predictors.col(t.a); break;
            case Term::Kind::quadratic: col = predictors.col(t.a).array().square(); break;
            case Term::Kind::interaction: col = predictors.col(t.a).cwiseProduct(predictors.col(t.b)); break;
        }
    }
    return x;
}

namespace {

double centred_r2(const Eigen::VectorXd& y, const Eigen::VectorXd& residuals) {
    const double tss = (y.array() - y.mean()).square().sum();
    if (!(tss > 0.0)) return 0.0;
    return std::clamp(1.0 - residuals.squaredNorm() / tss, 0.0, 1.0);
}

}  // namespace

RegressionModel fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> column_names) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (y.size() != n) throw StatsError("fit_ols: design has " + std::to_string(n) + " rows but response has " +
                                        std::to_string(y.size()));
    if (static_cast<Eigen::Index>(column_names.size()) != p) throw StatsError("fit_ols: column name count mismatch");
    if (n < p + 1)
        throw StatsError("fit_ols: need at least " + std::to_string(p + 1) + " observations for " +
                         std::to_string(p) + " columns, got " + std::to_string(n));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::string msg = "fit_ols: design is rank deficient; collinear terms:";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) msg += " " + column_names[perm(k)];
        throw StatsError(msg);
    }

    RegressionModel m;
    m.column_names = std::move(column_names);
    m.n_obs = static_cast<int>(n);
    m.dof = static_cast<int>(n - p);
    m.coefficients = qr.solve(y);
    m.residuals = y - x * m.coefficients;
    const double rss = m.residuals.squaredNorm();
    const double s2 = rss / static_cast<double>(m.dof);
    m.sigma = std::sqrt(s2);
    m.r_squared = centred_r2(y, m.residuals);
    m.adj_r_squared = p > 1 ? 1.0 - (1.0 - m.r_squared) * static_cast<double>(n - 1) / static_cast<double>(m.dof)
                            : m.r_squared;

    // diag((X'X)^-1) = row norms of R^-1, mapped back through the column permutation
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const auto& perm = qr.colsPermutation().indices();
    m.std_errors.resize(p);
    m.t_stats.resize(p);
    m.p_values.resize(p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index j = perm(k);
        m.std_errors(j) = std::sqrt(s2 * r_inv.row(k).squaredNorm());
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const double b = m.coefficients(j);
        const double se = m.std_errors(j);
        double t;
        if (se > 0.0) t = b / se;
        else t = b == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), b);
        m.t_stats(j) = t;
        m.p_values(j) = student_t_two_sided_p(t, static_cast<double>(m.dof));
    }
    return m;
}

RegressionModel fit_terms(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, std::span<const Term> terms,
                          std::span<const std::string> predictors) {
    std::vector<std::string> names{"(Intercept)"};
    for (const Term& t : terms) names.push_back(term_name(t, predictors));
    RegressionModel m = fit_ols(design_matrix(z, terms), y, std::move(names));
    m.predictors.assign(predictors.begin(), predictors.end());
    m.terms.assign(terms.begin(), terms.end());
    return m;
}

double r_squared_of(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.cols() == 0) return 0.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    // solve() keeps pivots the threshold rejects, so project onto the first rank() columns of Q instead
    const Eigen::Index rank = qr.rank();
    const Eigen::VectorXd qty = qr.householderQ().transpose() * y;
    return centred_r2(y, qty.tail(x.rows() - rank));
}

}  // namespace parapack::stats
