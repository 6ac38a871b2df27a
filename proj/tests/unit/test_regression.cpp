#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "parapack/error.hpp"
#include "parapack/stats/distributions.hpp"
#include "parapack/stats/regression.hpp"

using namespace parapack;
using namespace parapack::stats;

namespace {
std::vector<std::string> names(int p) {
    std::vector<std::string> n{"(Intercept)"};
    for (int j = 1; j < p; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

Eigen::MatrixXd random_design(std::mt19937_64& rng, int n, int p) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (int j = 1; j < p; ++j) x(i, j) = g(rng) * (1.0 + j) + 0.3 * j;
    }
    return x;
}

// 1 - 2 * integral_0^|t| of the t density, composite Simpson
double t_p_quadrature(double t, double dof) {
    const double c = std::exp(std::lgamma(0.5 * (dof + 1)) - std::lgamma(0.5 * dof)) / std::sqrt(dof * std::numbers::pi);
    auto f = [&](double x) { return c * std::pow(1.0 + x * x / dof, -0.5 * (dof + 1)); };
    const int m = 20000;
    const double h = std::abs(t) / m;
    double s = f(0) + f(std::abs(t));
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return 1.0 - 2.0 * s * h / 3.0;
}
}

TEST_SUITE("regression") {

TEST_CASE("exact linear data is recovered") {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd x = random_design(rng, 40, 3);
    const Eigen::VectorXd y = 2.0 * x.col(0) + 3.0 * x.col(1) - x.col(2);
    const auto m = fit_ols(x, y, names(3));
    CHECK(std::abs(m.coefficients(0) - 2.0) <= 1e-10);
    CHECK(std::abs(m.coefficients(1) - 3.0) <= 1e-10);
    CHECK(std::abs(m.coefficients(2) + 1.0) <= 1e-10);
    CHECK(m.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coefficients and errors agree with the normal equations") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> pdist(2, 21);
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 100; ++rep) {
        const int p = pdist(rng);
        const int n = std::uniform_int_distribution<int>(p + 5, 1000)(rng);
        const Eigen::MatrixXd x = random_design(rng, n, p);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = x.row(i).sum() * 0.7 + g(rng);
        const auto m = fit_ols(x, y, names(p));

        const Eigen::MatrixXd xtx = x.transpose() * x;
        const Eigen::LLT<Eigen::MatrixXd> llt(xtx);
        const Eigen::VectorXd beta = llt.solve(x.transpose() * y);
        const Eigen::VectorXd r = y - x * beta;
        const double s2 = r.squaredNorm() / (n - p);
        const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(p, p));
        for (int j = 0; j < p; ++j) {
            CHECK(std::abs(m.coefficients(j) - beta(j)) <= 1e-8 * std::max(1.0, std::abs(beta(j))));
            CHECK(m.std_errors(j) == doctest::Approx(std::sqrt(s2 * inv(j, j))).epsilon(1e-8));
        }
        CHECK(m.dof == n - p);
    }
}

TEST_CASE("residuals are orthogonal to the design") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const Eigen::MatrixXd x = random_design(rng, 300, 8);
    Eigen::VectorXd y(300);
    for (int i = 0; i < 300; ++i) y(i) = g(rng) + x(i, 3);
    const auto m = fit_ols(x, y, names(8));
    CHECK((x.transpose() * m.residuals).cwiseAbs().maxCoeff() < 1e-8 * y.norm());
    for (int j = 0; j < 8; ++j) {
        CHECK(m.p_values(j) >= 0.0);
        CHECK(m.p_values(j) <= 1.0);
    }
    CHECK(m.r_squared >= 0.0);
    CHECK(m.r_squared <= 1.0);
}

TEST_CASE("independent noise is rarely significant") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    int rejections = 0;
    int tests = 0;
    double r2_sum = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        const Eigen::MatrixXd x = random_design(rng, 100, 3);
        Eigen::VectorXd y(100);
        for (int i = 0; i < 100; ++i) y(i) = g(rng);
        const auto m = fit_ols(x, y, names(3));
        for (int j = 1; j < 3; ++j, ++tests) rejections += m.p_values(j) < 0.05;
        r2_sum += m.r_squared;
    }
    const double rate = static_cast<double>(rejections) / tests;
    // binomial(800, 0.05): 3 sigma band
    CHECK(std::abs(rate - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / tests));
    // E[R^2] = k / (n - 1) under the null
    CHECK(r2_sum / reps == doctest::Approx(2.0 / 99.0).epsilon(0.25));
}

TEST_CASE("rank deficiency names the collinear columns") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd x = random_design(rng, 30, 4);
    x.col(3) = 2.0 * x.col(1) - x.col(2);
    const Eigen::VectorXd y = x.col(1);
    try {
        fit_ols(x, y, {"(Intercept)", "a", "b", "c"});
        FAIL("expected StatsError");
    } catch (const StatsError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("c") != std::string::npos);
    }
    CHECK_THROWS_AS(fit_ols(x.topRows(3), y.head(3), {"(Intercept)", "a", "b", "c"}), StatsError);
    CHECK(r_squared_of(x, y) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("t p-values match quadrature of the density") {
    for (double dof : {1.0, 3.0, 10.0, 57.0}) {
        for (double t : {0.1, 0.7, 1.5, 2.0, 3.2}) {
            CHECK(student_t_two_sided_p(t, dof) == doctest::Approx(t_p_quadrature(t, dof)).epsilon(1e-9));
        }
    }
    // frozen from the quadrature above
    CHECK(student_t_two_sided_p(2.0, 10.0) == doctest::Approx(0.0733880347707404).epsilon(1e-12));
}

TEST_CASE("p is one at t = 0 and falls with |t|") {
    for (double dof : {1.0, 2.0, 5.0, 30.0, 500.0}) {
        CHECK(student_t_two_sided_p(0.0, dof) == 1.0);
        double prev = 1.0;
        for (double t = 0.05; t < 40.0; t += 0.05) {
            const double p = student_t_two_sided_p(t, dof);
            CHECK(p < prev);
            CHECK(student_t_two_sided_p(-t, dof) == p);
            prev = p;
        }
    }
    CHECK_THROWS_AS(student_t_two_sided_p(1.0, 0.0), DomainError);
}

TEST_CASE("term bookkeeping") {
    const auto t = full_quadratic_terms(3);
    CHECK(t.size() == 9);
    const std::vector<std::string> p{"a", "b", "c"};
    CHECK(term_name(t[0], p) == "a");
    CHECK(term_name(t[3], p) == "a^2");
    CHECK(term_name(t[8], p) == "b:c");
    const std::vector<Term> present{Term::linear(0)};
    CHECK(parents_present(Term::quadratic(0), present));
    CHECK_FALSE(parents_present(Term::interaction(0, 1), present));
}

TEST_CASE("standardizer centres and scales") {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd x = random_design(rng, 50, 4);
    const auto s = Standardizer::fit(x.rightCols(3));
    const Eigen::MatrixXd z = s.apply(x.rightCols(3));
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(z.col(j).mean()) < 1e-12);
        CHECK((z.col(j).array() - z.col(j).mean()).square().sum() / 49.0 == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto c = Standardizer::fit(Eigen::MatrixXd::Constant(5, 1, 3.0));
    CHECK(c.scale(0) == 1.0);
}

}
