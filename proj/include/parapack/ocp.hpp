#pragma once

#include <vector>

namespace parapack {

/// Tabulated open-circuit potential of one electrode with its entropic coefficient.
///
/// Values between grid points use monotone (Fritsch-Carlson) cubic Hermite
/// interpolation. Queries outside the grid are clamped to the end points and
/// counted; extrapolation is never performed.
class OcpTable {
public:
    OcpTable() = default;
    OcpTable(std::vector<double> stoichiometry, std::vector<double> potential,
             std::vector<double> entropic);

    double potential(double theta) const { return eval(theta, potential_, slope_u_); }
    double entropic(double theta) const { return eval(theta, entropic_, slope_s_); }
    /// d/dtheta of potential and entropic coefficient; zero outside the grid.
    double potential_slope(double theta) const { return eval_slope(theta, potential_, slope_u_); }
    double entropic_slope(double theta) const { return eval_slope(theta, entropic_, slope_s_); }

    const std::vector<double>& stoichiometry() const { return theta_; }
    const std::vector<double>& potentials() const { return potential_; }
    const std::vector<double>& entropic_coefficients() const { return entropic_; }
    double min_theta() const { return theta_.front(); }
    double max_theta() const { return theta_.back(); }
    bool empty() const { return theta_.empty(); }

    /// Number of clamped out-of-grid queries made on this thread since the last reset.
    static long clamp_count();
    static void reset_clamp_count();

    friend bool operator==(const OcpTable& a, const OcpTable& b) {
        return a.theta_ == b.theta_ && a.potential_ == b.potential_ && a.entropic_ == b.entropic_;
    }

private:
    double eval(double theta, const std::vector<double>& y, const std::vector<double>& m) const;
    double eval_slope(double theta, const std::vector<double>& y, const std::vector<double>& m) const;

    std::vector<double> theta_;
    std::vector<double> potential_;
    std::vector<double> entropic_;
    std::vector<double> slope_u_;
    std::vector<double> slope_s_;
};

/// Fritsch-Carlson node slopes for a monotone piecewise cubic through (x, y).
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y);

/// Silicon-graphite negative electrode, LG M50 parameterization.
OcpTable lg_m50_graphite_ocp();
/// NMC811 positive electrode, LG M50 parameterization.
OcpTable lg_m50_nmc811_ocp();

}  // namespace parapack
