#include "parapack/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parapack/error.hpp"

namespace parapack {

namespace {
thread_local long g_clamps = 0;

OcpTable tabulate(double (*u)(double), double (*dudt)(double)) {
    constexpr int n = 201;
    std::vector<double> theta(n), pot(n), ent(n);
    for (int i = 0; i < n; ++i) {
        theta[i] = static_cast<double>(i) / (n - 1);
        pot[i] = u(theta[i]);
        ent[i] = dudt(theta[i]);
    }
    return OcpTable(std::move(theta), std::move(pot), std::move(ent));
}

double graphite_u(double x) {
    return 1.9793 * std::exp(-39.3631 * x) + 0.2482 - 0.0909 * std::tanh(29.8538 * (x - 0.1234)) -
           0.04478 * std::tanh(14.9159 * (x - 0.2769)) - 0.0205 * std::tanh(30.4444 * (x - 0.6103));
}

double graphite_dudt(double x) {
    return 1e-4 * (1.5 * std::exp(-x / 0.05) - 0.6 * std::tanh((x - 0.5) / 0.1) - 0.6);
}

double nmc_u(double x) {
    return -0.8090 * x + 4.4875 - 0.0428 * std::tanh(18.5138 * (x - 0.5542)) -
           17.7326 * std::tanh(15.7890 * (x - 0.3117)) + 17.5842 * std::tanh(15.9308 * (x - 0.3120));
}

double nmc_dudt(double x) { return -1e-4 * (0.5 + 0.5 * std::tanh((x - 0.8) / 0.1)); }
}  // namespace

std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 2) return m;
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            // weighted harmonic mean (Fritsch-Butland), keeps each interval monotone
            const double h0 = x[i] - x[i - 1];
            const double h1 = x[i + 1] - x[i];
            const double w1 = 2.0 * h1 + h0;
            const double w2 = h1 + 2.0 * h0;
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    return m;
}

OcpTable::OcpTable(std::vector<double> stoichiometry, std::vector<double> potential,
                   std::vector<double> entropic)
    : theta_(std::move(stoichiometry)), potential_(std::move(potential)), entropic_(std::move(entropic)) {
    if (theta_.size() < 10) throw ConfigError("ocp.stoichiometry", "need at least 10 grid points");
    if (potential_.size() != theta_.size() || entropic_.size() != theta_.size())
        throw ConfigError("ocp", "stoichiometry, potential and entropic_coeff must have equal length");
    for (std::size_t i = 0; i < theta_.size(); ++i) {
        if (!std::isfinite(theta_[i]) || !std::isfinite(potential_[i]) || !std::isfinite(entropic_[i]))
            throw ConfigError("ocp", "non-finite entry at index " + std::to_string(i));
        if (theta_[i] < 0.0 || theta_[i] > 1.0)
            throw ConfigError("ocp.stoichiometry", "values must lie in [0, 1]");
        if (i > 0 && !(theta_[i] > theta_[i - 1]))
            throw ConfigError("ocp.stoichiometry", "grid must be strictly increasing");
    }
    slope_u_ = monotone_slopes(theta_, potential_);
    slope_s_ = monotone_slopes(theta_, entropic_);
}

double OcpTable::eval(double theta, const std::vector<double>& y, const std::vector<double>& m) const {
    if (theta <= theta_.front()) {
        if (theta < theta_.front()) ++g_clamps;
        return y.front();
    }
    if (theta >= theta_.back()) {
        if (theta > theta_.back()) ++g_clamps;
        return y.back();
    }
    const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
    const std::size_t i = static_cast<std::size_t>(it - theta_.begin()) - 1;
    const double h = theta_[i + 1] - theta_[i];
    const double s = (theta - theta_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1];
}

double OcpTable::eval_slope(double theta, const std::vector<double>& y, const std::vector<double>& m) const {
    if (theta <= theta_.front() || theta >= theta_.back()) return 0.0;
    const auto it = std::upper_bound(theta_.begin(), theta_.end(), theta);
    const std::size_t i = static_cast<std::size_t>(it - theta_.begin()) - 1;
    const double h = theta_[i + 1] - theta_[i];
    const double s = (theta - theta_[i]) / h;
    const double s2 = s * s;
    const double d00 = 6 * s2 - 6 * s;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = -6 * s2 + 6 * s;
    const double d11 = 3 * s2 - 2 * s;
    return (d00 * y[i] + d01 * y[i + 1]) / h + d10 * m[i] + d11 * m[i + 1];
}

long OcpTable::clamp_count() { return g_clamps; }
void OcpTable::reset_clamp_count() { g_clamps = 0; }

OcpTable lg_m50_graphite_ocp() {
    static const OcpTable table = tabulate(graphite_u, graphite_dudt);
    return table;
}

OcpTable lg_m50_nmc811_ocp() {
    static const OcpTable table = tabulate(nmc_u, nmc_dudt);
    return table;
}

}  // namespace parapack
