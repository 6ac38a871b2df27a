#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <random>

#include "parapack/error.hpp"
#include "parapack/stats/dominance.hpp"

using namespace parapack;
using namespace parapack::stats;

namespace {
std::vector<std::string> pnames(int q) {
    std::vector<std::string> n;
    for (int j = 0; j < q; ++j) n.push_back("x" + std::to_string(j));
    return n;
}

RegressionModel model_of(std::vector<Term> terms, int q) {
    RegressionModel m;
    m.predictors = pnames(q);
    m.terms = std::move(terms);
    return m;
}

// centred R^2 through a complete orthogonal decomposition
double oracle_r2(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::VectorXd yc = y.array() - y.mean();
    if (x.cols() == 0) return 0.0;
    Eigen::MatrixXd xc = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) xc.col(j).array() -= x.col(j).mean();
    const Eigen::VectorXd b = xc.completeOrthogonalDecomposition().solve(yc);
    return 1.0 - (yc - xc * b).squaredNorm() / yc.squaredNorm();
}

// Shapley value over predictor orderings; a term joins once all its predictors are in
std::vector<double> shapley(const std::vector<Term>& terms, const Eigen::MatrixXd& z, const Eigen::VectorXd& y, int q) {
    auto r2_of = [&](const std::vector<int>& in) {
        std::vector<Eigen::VectorXd> cols;
        for (const Term& t : terms) {
            const bool a = std::count(in.begin(), in.end(), t.a) > 0;
            const bool b = t.b < 0 || std::count(in.begin(), in.end(), t.b) > 0;
            if (!(a && b)) continue;
            if (t.kind == Term::Kind::linear) cols.push_back(z.col(t.a));
            else if (t.kind == Term::Kind::quadratic) cols.push_back(z.col(t.a).array().square());
            else cols.push_back(z.col(t.a).cwiseProduct(z.col(t.b)));
        }
        Eigen::MatrixXd x(z.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = cols[j];
        return oracle_r2(x, y);
    };
    std::vector<int> order(q);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> share(q, 0.0);
    int count = 0;
    do {
        std::vector<int> in;
        double prev = 0.0;
        for (int p : order) {
            in.push_back(p);
            const double now = r2_of(in);
            share[p] += now - prev;
            prev = now;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (double& s : share) s /= count;
    return share;
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int n, int q) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd z(n, q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < q; ++j) z(i, j) = g(rng);
    return z;
}
}

TEST_SUITE("dominance") {

TEST_CASE("orthogonal predictors take their squared correlations") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd raw = gaussian(rng, 200, 4);
    for (int j = 0; j < 4; ++j) raw.col(j).array() -= raw.col(j).mean();
    const Eigen::MatrixXd z = raw.householderQr().householderQ() * Eigen::MatrixXd::Identity(200, 4);
    Eigen::MatrixXd zc = z;
    for (int j = 0; j < 4; ++j) zc.col(j).array() -= zc.col(j).mean();
    // re-orthogonalise after centring
    const Eigen::MatrixXd q = zc.householderQr().householderQ() * Eigen::MatrixXd::Identity(200, 4);
    const Eigen::VectorXd y = 3 * q.col(0) - 2 * q.col(1) + 0.5 * q.col(3) + gaussian(rng, 200, 1).col(0) * 0.05;
    const auto m = model_of({Term::linear(0), Term::linear(1), Term::linear(2), Term::linear(3)}, 4);
    const auto imp = relative_importance(m, q, y);
    double sum = 0.0;
    const Eigen::VectorXd yc = y.array() - y.mean();
    for (int j = 0; j < 4; ++j) {
        const Eigen::VectorXd xc = q.col(j).array() - q.col(j).mean();
        const double corr = xc.dot(yc) / (xc.norm() * yc.norm());
        CHECK(imp.shares[j] == doctest::Approx(corr * corr).epsilon(1e-8));
        CHECK(imp.shares[j] >= 0.0);
        sum += imp.shares[j];
    }
    CHECK(std::abs(sum - imp.r_squared) <= 1e-10);
}

TEST_CASE("a duplicated predictor splits its share") {
    std::mt19937_64 rng(2);
    Eigen::MatrixXd z = gaussian(rng, 150, 3);
    z.col(1) = z.col(0);
    const Eigen::VectorXd y = 2 * z.col(0) + z.col(2) + gaussian(rng, 150, 1).col(0);
    const std::vector<Term> terms{Term::linear(0), Term::linear(1), Term::linear(2)};
    const auto imp = relative_importance(model_of(terms, 3), z, y);
    const auto oracle = shapley(terms, z, y, 3);
    CHECK(imp.shares[0] == doctest::Approx(imp.shares[1]).epsilon(1e-10));
    for (int j = 0; j < 3; ++j) CHECK(imp.shares[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
}

TEST_CASE("subset averaging matches the ordering oracle with nonlinear terms") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(40 + seed);
        const Eigen::MatrixXd z = gaussian(rng, 120, 4);
        Eigen::VectorXd y = z.col(0) + 0.5 * z.col(1).cwiseProduct(z.col(2)) + 0.3 * z.col(3).array().square().matrix();
        y += gaussian(rng, 120, 1).col(0) * 0.5;
        const std::vector<Term> terms{Term::linear(0), Term::linear(1), Term::linear(2), Term::linear(3),
                                      Term::interaction(1, 2), Term::quadratic(3)};
        const auto m = model_of(terms, 4);
        const auto imp = relative_importance(m, z, y);
        const auto oracle = shapley(terms, z, y, 4);
        double sum = 0.0;
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(imp.shares[j] - oracle[j]) <= 1e-12);
            sum += imp.shares[j];
        }
        CHECK(std::abs(sum - imp.r_squared) <= 1e-10);
        const auto serial = relative_importance_serial(m, z, y);
        CHECK(serial.shares == imp.shares);
    }
}

TEST_CASE("a single predictor carries the whole R^2") {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd z = gaussian(rng, 80, 1);
    const Eigen::VectorXd y = z.col(0) + gaussian(rng, 80, 1).col(0);
    const auto m = model_of({Term::linear(0), Term::quadratic(0)}, 1);
    const auto imp = relative_importance(m, z, y);
    REQUIRE(imp.shares.size() == 1);
    CHECK(imp.shares[0] == imp.r_squared);
    CHECK(imp.r_squared == doctest::Approx(fit_terms(z, y, m.terms, m.predictors).r_squared).epsilon(1e-12));
}

TEST_CASE("only predictors in the model are ranked") {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd z = gaussian(rng, 80, 5);
    const Eigen::VectorXd y = z.col(3) + gaussian(rng, 80, 1).col(0);
    const auto imp = relative_importance(model_of({Term::linear(1), Term::linear(3)}, 5), z, y);
    CHECK(imp.predictors == std::vector<int>{1, 3});
    CHECK(imp.names == std::vector<std::string>{"x1", "x3"});
}

TEST_CASE("too many groups are refused") {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd z = gaussian(rng, 60, 16);
    std::vector<Term> t;
    for (int j = 0; j < 16; ++j) t.push_back(Term::linear(j));
    CHECK_THROWS_AS(relative_importance(model_of(t, 16), z, z.col(0)), StatsError);
}

TEST_CASE("pareto report ordering and cumulative line") {
    Importance imp;
    imp.names = {"b", "a", "c"};
    imp.shares = {0.3, 0.5, 0.1};
    imp.r_squared = 0.9;
    const auto r = pareto_report(imp);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].predictor == "a");
    CHECK(r.rows[0].cumulative == doctest::Approx(0.5));
    CHECK(r.rows[1].cumulative == doctest::Approx(0.8));
    CHECK(r.rows[2].cumulative == doctest::Approx(0.9));
    CHECK(std::abs(r.rows.back().cumulative - r.r_squared) <= 1e-10);
    CHECK(format_pareto(r).find("R^2 = 0.900000") != std::string::npos);

    const auto empty = pareto_report(relative_importance(model_of({}, 2), Eigen::MatrixXd::Zero(10, 2),
                                                         Eigen::VectorXd::LinSpaced(10, 0, 1)));
    CHECK(empty.rows.empty());
    CHECK(empty.r_squared == 0.0);
}

}
