#include "parapack/thermal.hpp"

#include <cmath>

#include "parapack/error.hpp"
#include "parapack/tridiag.hpp"

namespace parapack {

double shape_factor(double d, double h, double spacing) {
    const double w = d + spacing;
    const double arg = (4.0 * w * w - 2.0 * d * d) / (2.0 * d * d);
    if (!(spacing > 0.0) || !(arg > 1.0)) throw DomainError("shape_factor: degenerate cell geometry");
    return 2.0 * M_PI * h / std::acosh(arg);
}

double r_m_from_geometry(double d, double h, double spacing, double k_air, double k_tabs, double a_cell) {
    const double r_air = 1.0 / (shape_factor(d, h, spacing) * k_air);
    const double r_tabs = (d + spacing) / (a_cell * k_tabs);
    return parallel_resistance(r_air, r_tabs);
}

ThermalNetwork make_network(const ModuleConfig& cfg) {
    ThermalNetwork net;
    net.t_amb = cfg.t_amb;
    for (const auto& c : cfg.cells) {
        net.r_u.push_back(c.r_u);
        net.c_s.push_back(c.heat_capacity);
    }
    const auto& n = cfg.nominal;
    net.r_m = r_m_from_geometry(n.diameter, n.height, cfg.spacing, cfg.coupling.k_air, cfg.coupling.k_tabs,
                                n.tab_area);
    return net;
}

std::vector<double> step_temperatures(std::span<const double> temps, std::span<const double> heats,
                                      const ThermalNetwork& net, double dt) {
    const std::size_t n = temps.size();
    if (heats.size() != n || net.r_u.size() != n || net.c_s.size() != n)
        throw DomainError("step_temperatures: size mismatch");
    if (!(dt > 0.0)) throw DomainError("step_temperatures: dt must be > 0");
    std::vector<double> lo(n), di(n), up(n), sc(n), x(n);
    const double g = 1.0 / net.r_m;
    for (std::size_t k = 0; k < n; ++k) {
        const double cap = net.c_s[k] / dt;
        const double g_prev = k > 0 ? g : 0.0;
        const double g_next = k + 1 < n ? g : 0.0;
        lo[k] = -g_prev;
        up[k] = -g_next;
        di[k] = cap + 1.0 / net.r_u[k] + g_prev + g_next;
        x[k] = cap * temps[k] + heats[k] + net.t_amb / net.r_u[k];
    }
    detail::solve_tridiagonal(lo, di, up, x, sc);
    return x;
}

double thermal_energy_residual(std::span<const double> before, std::span<const double> after,
                               std::span<const double> heats, const ThermalNetwork& net, double dt) {
    double stored = 0.0;
    double balance = 0.0;
    for (std::size_t k = 0; k < before.size(); ++k) {
        stored += net.c_s[k] * (after[k] - before[k]) / dt;
        balance += heats[k] - (after[k] - net.t_amb) / net.r_u[k];
    }
    return stored - balance;
}

}  // namespace parapack
