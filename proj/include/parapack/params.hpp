#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "parapack/ocp.hpp"

namespace parapack {

inline constexpr double kFaraday = 96485.33212;   // C/mol
inline constexpr double kGasConstant = 8.314462618;  // J/(mol K)

enum class Electrode { negative, positive };

/// Kinetics-limited SEI side reaction on the negative electrode.
struct SeiParameters {
    double i0 = 0.0;                   // A/m^2 at t_ref
    double alpha = 0.5;                // cathodic transfer coefficient
    double u_ref = 0.4;                // V vs Li
    double molar_mass = 0.162;         // kg/mol
    double density = 1690.0;           // kg/m^3
    double conductivity = 2.5e-5;      // S/m
    double activation_energy = 6.0e4;  // J/mol
    double initial_thickness = 5e-9;   // m

    friend bool operator==(const SeiParameters&, const SeiParameters&) = default;
};

/// Full per-cell physical parameter set (SI units throughout).
struct CellParameters {
    // active material and electrolyte volume fractions
    double eps_s_n = 0.0;
    double eps_s_p = 0.0;
    double eps_e_n = 0.25;
    double eps_e_sep = 0.47;
    double eps_e_p = 0.335;
    double bruggeman = 1.5;

    // geometry
    double l_n = 85.2e-6;
    double l_sep = 12e-6;
    double l_p = 75.6e-6;
    double r_n = 5.86e-6;
    double r_p = 5.22e-6;
    double area = 0.1;  // electrode area, m^2

    // transport and kinetics at t_ref
    double d_s_n = 3.3e-14;
    double d_s_p = 4.0e-15;
    double d_e = 1.769e-10;
    double kappa_e = 0.9487;
    double t_plus = 0.2594;
    double c_e0 = 1000.0;
    double c_max_n = 33133.0;
    double c_max_p = 63104.0;
    double k_n = 6.716e-12;  // m^2.5 mol^-0.5 s^-1
    double k_p = 3.545e-11;
    double r_cell = 0.015;   // ohm

    // Arrhenius temperature dependence
    double t_ref = 298.15;
    double ea_d_s_n = 3.0e4;
    double ea_d_s_p = 2.5e4;
    double ea_k_n = 3.5e4;
    double ea_k_p = 1.78e4;

    OcpTable ocp_n;
    OcpTable ocp_p;

    // stoichiometry windows at 0 % and 100 % SOC
    double theta_n_0 = 0.0279;
    double theta_n_100 = 0.9014;
    double theta_p_0 = 0.9084;
    double theta_p_100 = 0.2661;

    // lumped thermal and can geometry
    double heat_capacity = 75.0;  // J/K
    double r_u = 18.8;            // K/W
    double diameter = 21e-3;
    double height = 70e-3;
    double tab_area = 2e-6;       // conduction cross-section of the inter-cell tab, m^2

    SeiParameters sei;

    friend bool operator==(const CellParameters&, const CellParameters&) = default;
};

enum class Direction { charge, discharge };

struct CcPhase {
    Direction direction = Direction::discharge;
    double c_rate = 1.0;
    double cutoff_voltage = 2.5;
    friend bool operator==(const CcPhase&, const CcPhase&) = default;
};

struct CvPhase {
    double voltage = 4.2;
    double cutoff_current_per_cell = 0.05;  // A; the module stops at n_p times this
    friend bool operator==(const CvPhase&, const CvPhase&) = default;
};

struct RestPhase {
    double duration = 1800.0;
    friend bool operator==(const RestPhase&, const RestPhase&) = default;
};

using Phase = std::variant<CcPhase, CvPhase, RestPhase>;

/// One cycle is a single pass through `phases`.
struct ProtocolSpec {
    std::vector<Phase> phases;
    double capacity_ah = 4.85;  // per-cell C-rate reference

    friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

/// CCCV charge at C/3 to 4.2 V (50 mA/cell taper), 30 min rest, 1C discharge to 2.5 V, 30 min rest.
ProtocolSpec standard_cycle();

struct NumericsSettings {
    int n_r = 10;
    int n_x_n = 10;
    int n_x_sep = 5;
    int n_x_p = 10;
    double dt_charge = 1.0;
    double dt_cv = 1.0;
    double dt_discharge = 1.0;
    double dt_rest = 5.0;
    double event_tolerance = 0.1;
    int max_halvings = 6;
    double max_phase_duration = 12.0 * 3600.0;

    friend bool operator==(const NumericsSettings&, const NumericsSettings&) = default;
};

/// Coarser grids and steps used by the `--fast` campaign tier.
NumericsSettings fast_numerics();

struct ThermalCoupling {
    double k_air = 0.026;
    double k_tabs = 400.0;
    friend bool operator==(const ThermalCoupling&, const ThermalCoupling&) = default;
};

/// One parallel-connected module: cells ordered by position (index 0 nearest the terminals).
struct ModuleConfig {
    int n_p = 4;
    CellParameters nominal;
    std::vector<CellParameters> cells;
    double r_int = 0.25e-3;
    double spacing = 5e-3;
    double t_amb = 298.15;
    ProtocolSpec protocol = standard_cycle();
    int n_cycles = 1;
    std::uint64_t seed = 0;
    ThermalCoupling coupling;
    NumericsSettings numerics;

    friend bool operator==(const ModuleConfig&, const ModuleConfig&) = default;
};

struct SamplingRanges {
    double capacity_rel_tol = 0.025;
    double r_int_min = 0.1e-3;
    double r_int_max = 0.5e-3;
    double sp_min = 1e-3;
    double sp_max = 10e-3;
    friend bool operator==(const SamplingRanges&, const SamplingRanges&) = default;
};

/// Linear eps_s <-> capacity relations identified on a batch of 19 LG M50T cells.
double eps_from_capacity(double q_cell_ah, Electrode electrode);
double capacity_from_eps(double eps, Electrode electrode);

/// Capacity of the weaker electrode, through the eps <-> capacity relations.
double limiting_capacity(const CellParameters& cell);

/// [lo, hi] eps interval produced by capacity deviations of +-tol around q_nominal.
std::pair<double, double> eps_bounds(double q_nominal_ah, double tol, Electrode electrode);

/// LG-M50-like NMC811/graphite parameter set with eps_s at `q_nominal_ah`.
CellParameters lg_m50_like(double q_nominal_ah = 4.85);

/// Unperturbed module with R_int = 0.25 mOhm and 5 mm spacing.
ModuleConfig reference_module(const CellParameters& nominal, int n_p = 4);

/// Draws eps_s,n and eps_s,p per cell, one R_int and one spacing per module. Same seed, same config.
ModuleConfig sample_module(std::uint64_t seed, const CellParameters& nominal, const SamplingRanges& ranges,
                           int n_p = 4);

/// Throws ConfigError naming the first violated field.
void validate(const CellParameters& cell, const std::string& prefix = "cell");
void validate(const ModuleConfig& cfg);
void validate(const SamplingRanges& ranges);

}  // namespace parapack
