#pragma once

#include <span>
#include <vector>

#include "parapack/params.hpp"

namespace parapack {

/// Lumped cell temperatures coupled to ambient and to their direct neighbours.
struct ThermalNetwork {
    std::vector<double> r_u;  // K/W, cell surface to ambient
    std::vector<double> c_s;  // J/K
    double r_m = 1.0;         // K/W, between adjacent cells
    double t_amb = 298.15;
};

/// Conduction shape factor between two parallel cylinders of diameter d, length h, centre distance d + spacing.
double shape_factor(double d, double h, double spacing);

/// Air path and tab path in parallel.
double r_m_from_geometry(double d, double h, double spacing, double k_air, double k_tabs, double a_cell);

inline double parallel_resistance(double r_a, double r_b) { return 1.0 / (1.0 / r_a + 1.0 / r_b); }

ThermalNetwork make_network(const ModuleConfig& cfg);

/// Irreversible plus reversible heat (W) of one cell; current positive on discharge.
inline double cell_heat(double current, double ocv, double v_cell, double temperature, double entropic) {
    return current * (ocv - v_cell) - current * temperature * entropic;
}

/// Backward-Euler update. End cells exchange heat with their single neighbour only.
std::vector<double> step_temperatures(std::span<const double> temps, std::span<const double> heats,
                                      const ThermalNetwork& net, double dt);

/// sum C dT/dt - (sum q - sum (T' - T_amb)/R_u) for one implicit step; zero up to rounding.
double thermal_energy_residual(std::span<const double> before, std::span<const double> after,
                               std::span<const double> heats, const ThermalNetwork& net, double dt);

}  // namespace parapack
