#include "parapack/params.hpp"

#include <cmath>
#include <random>

#include "parapack/error.hpp"

namespace parapack {

namespace {
constexpr double kRelationIntercept[2] = {0.0091055, 0.011719};
constexpr double kRelationSlope[2] = {0.16312, 0.14208};

int idx(Electrode e) { return e == Electrode::negative ? 0 : 1; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    // 53-bit mantissa draw in [0, 1); the result never leaves [lo, hi]
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError(field, msg);
}

void positive(double v, const std::string& field) {
    require(std::isfinite(v) && v > 0.0, field, "must be finite and > 0 (got " + std::to_string(v) + ")");
}

void fraction(double v, const std::string& field) {
    require(std::isfinite(v) && v > 0.0 && v < 1.0, field,
            "must lie in (0, 1) (got " + std::to_string(v) + ")");
}

void unit_interval(double v, const std::string& field) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, field, "must lie in [0, 1] (got " + std::to_string(v) + ")");
}
}  // namespace

ProtocolSpec standard_cycle() {
    ProtocolSpec p;
    p.phases = {CcPhase{Direction::charge, 1.0 / 3.0, 4.2}, CvPhase{4.2, 0.05}, RestPhase{1800.0},
                CcPhase{Direction::discharge, 1.0, 2.5}, RestPhase{1800.0}};
    p.capacity_ah = 4.85;
    return p;
}

NumericsSettings fast_numerics() {
    NumericsSettings n;
    n.n_r = 8;
    n.n_x_n = 6;
    n.n_x_sep = 3;
    n.n_x_p = 6;
    n.dt_charge = 5.0;
    n.dt_cv = 5.0;
    n.dt_discharge = 2.0;
    n.dt_rest = 20.0;
    return n;
}

double eps_from_capacity(double q_cell_ah, Electrode electrode) {
    if (!(q_cell_ah > 0.0)) throw DomainError("eps_from_capacity: capacity must be > 0");
    const int i = idx(electrode);
    return kRelationIntercept[i] + kRelationSlope[i] * q_cell_ah;
}

double capacity_from_eps(double eps, Electrode electrode) {
    const int i = idx(electrode);
    const double q = (eps - kRelationIntercept[i]) / kRelationSlope[i];
    if (!(q > 0.0)) throw DomainError("capacity_from_eps: eps maps to a non-positive capacity");
    return q;
}

double limiting_capacity(const CellParameters& cell) {
    return std::min(capacity_from_eps(cell.eps_s_n, Electrode::negative),
                    capacity_from_eps(cell.eps_s_p, Electrode::positive));
}

std::pair<double, double> eps_bounds(double q_nominal_ah, double tol, Electrode electrode) {
    return {eps_from_capacity(q_nominal_ah * (1.0 - tol), electrode),
            eps_from_capacity(q_nominal_ah * (1.0 + tol), electrode)};
}

CellParameters lg_m50_like(double q_nominal_ah) {
    CellParameters c;
    c.eps_s_n = eps_from_capacity(q_nominal_ah, Electrode::negative);
    c.eps_s_p = eps_from_capacity(q_nominal_ah, Electrode::positive);
    c.ocp_n = lg_m50_graphite_ocp();
    c.ocp_p = lg_m50_nmc811_ocp();

    // Electrode area and positive window chosen so that both electrodes hold
    // q_nominal between the 0 % and 100 % stoichiometry limits.
    const double ah_per_mol = kFaraday / 3600.0;
    const double span_n = c.theta_n_100 - c.theta_n_0;
    c.area = q_nominal_ah / (c.eps_s_n * c.l_n * c.c_max_n * span_n * ah_per_mol);
    const double span_p = q_nominal_ah / (c.eps_s_p * c.l_p * c.area * c.c_max_p * ah_per_mol);
    c.theta_p_0 = c.theta_p_100 + span_p;

    c.sei.i0 = 1.0e-7;
    return c;
}

ModuleConfig reference_module(const CellParameters& nominal, int n_p) {
    ModuleConfig cfg;
    cfg.n_p = n_p;
    cfg.nominal = nominal;
    cfg.cells.assign(static_cast<std::size_t>(n_p), nominal);
    cfg.r_int = 0.25e-3;
    cfg.spacing = 5e-3;
    return cfg;
}

ModuleConfig sample_module(std::uint64_t seed, const CellParameters& nominal, const SamplingRanges& ranges,
                           int n_p) {
    validate(ranges);
    std::mt19937_64 rng(seed);
    ModuleConfig cfg = reference_module(nominal, n_p);
    cfg.seed = seed;
    cfg.r_int = uniform(rng, ranges.r_int_min, ranges.r_int_max);
    cfg.spacing = uniform(rng, ranges.sp_min, ranges.sp_max);

    const double q_nom_n = capacity_from_eps(nominal.eps_s_n, Electrode::negative);
    const auto [n_lo, n_hi] = eps_bounds(q_nom_n, ranges.capacity_rel_tol, Electrode::negative);
    const double q_nom_p = capacity_from_eps(nominal.eps_s_p, Electrode::positive);
    const auto [p_lo, p_hi] = eps_bounds(q_nom_p, ranges.capacity_rel_tol, Electrode::positive);
    for (auto& cell : cfg.cells) {
        // degenerate (zero-width) ranges leave the nominal value untouched
        const double en = uniform(rng, n_lo, n_hi);
        const double ep = uniform(rng, p_lo, p_hi);
        if (ranges.capacity_rel_tol > 0.0) {
            cell.eps_s_n = en;
            cell.eps_s_p = ep;
        }
    }
    return cfg;
}

void validate(const SamplingRanges& r) {
    require(r.capacity_rel_tol >= 0.0 && r.capacity_rel_tol < 0.5, "ranges.capacity_rel_tol", "must lie in [0, 0.5)");
    require(r.r_int_min >= 0.0 && r.r_int_max >= r.r_int_min, "ranges.r_int", "need 0 <= min <= max");
    require(r.sp_min > 0.0 && r.sp_max >= r.sp_min, "ranges.sp", "need 0 < min <= max");
}

void validate(const CellParameters& c, const std::string& p) {
    fraction(c.eps_s_n, p + ".eps_s_n");
    fraction(c.eps_s_p, p + ".eps_s_p");
    fraction(c.eps_e_n, p + ".eps_e_n");
    fraction(c.eps_e_sep, p + ".eps_e_sep");
    fraction(c.eps_e_p, p + ".eps_e_p");
    positive(c.bruggeman, p + ".bruggeman");
    positive(c.l_n, p + ".l_n");
    positive(c.l_sep, p + ".l_sep");
    positive(c.l_p, p + ".l_p");
    positive(c.r_n, p + ".r_n");
    positive(c.r_p, p + ".r_p");
    positive(c.area, p + ".area");
    positive(c.d_s_n, p + ".d_s_n");
    positive(c.d_s_p, p + ".d_s_p");
    positive(c.d_e, p + ".d_e");
    positive(c.kappa_e, p + ".kappa_e");
    fraction(c.t_plus, p + ".t_plus");
    positive(c.c_e0, p + ".c_e0");
    positive(c.c_max_n, p + ".c_max_n");
    positive(c.c_max_p, p + ".c_max_p");
    positive(c.k_n, p + ".k_n");
    positive(c.k_p, p + ".k_p");
    positive(c.r_cell, p + ".r_cell");
    positive(c.t_ref, p + ".t_ref");
    require(c.ea_d_s_n >= 0 && c.ea_d_s_p >= 0 && c.ea_k_n >= 0 && c.ea_k_p >= 0, p + ".activation_energy",
            "must be >= 0");
    require(!c.ocp_n.empty(), p + ".ocp_n", "missing table");
    require(!c.ocp_p.empty(), p + ".ocp_p", "missing table");
    unit_interval(c.theta_n_0, p + ".theta_n_0");
    unit_interval(c.theta_n_100, p + ".theta_n_100");
    unit_interval(c.theta_p_0, p + ".theta_p_0");
    unit_interval(c.theta_p_100, p + ".theta_p_100");
    require(c.theta_n_100 > c.theta_n_0, p + ".theta_n_100", "must exceed theta_n_0");
    require(c.theta_p_0 > c.theta_p_100, p + ".theta_p_0", "must exceed theta_p_100");
    positive(c.heat_capacity, p + ".heat_capacity");
    positive(c.r_u, p + ".r_u");
    positive(c.diameter, p + ".diameter");
    positive(c.height, p + ".height");
    positive(c.tab_area, p + ".tab_area");
    require(c.sei.i0 >= 0.0, p + ".sei.i0", "must be >= 0");
    fraction(c.sei.alpha, p + ".sei.alpha");
    positive(c.sei.molar_mass, p + ".sei.molar_mass");
    positive(c.sei.density, p + ".sei.density");
    positive(c.sei.conductivity, p + ".sei.conductivity");
    require(c.sei.activation_energy >= 0.0, p + ".sei.activation_energy", "must be >= 0");
    positive(c.sei.initial_thickness, p + ".sei.initial_thickness");
}

void validate(const ModuleConfig& cfg) {
    require(cfg.n_p >= 2, "n_p", "need at least 2 parallel cells");
    require(static_cast<int>(cfg.cells.size()) == cfg.n_p, "cells",
            "length " + std::to_string(cfg.cells.size()) + " does not match n_p = " + std::to_string(cfg.n_p));
    require(std::isfinite(cfg.r_int) && cfg.r_int >= 0.0, "r_int", "must be >= 0");
    positive(cfg.spacing, "spacing");
    positive(cfg.t_amb, "t_amb");
    require(cfg.n_cycles >= 1, "n_cycles", "must be >= 1");
    positive(cfg.coupling.k_air, "coupling.k_air");
    positive(cfg.coupling.k_tabs, "coupling.k_tabs");
    positive(cfg.protocol.capacity_ah, "protocol.capacity_ah");
    require(!cfg.protocol.phases.empty(), "protocol.phases", "empty protocol");
    for (std::size_t i = 0; i < cfg.protocol.phases.size(); ++i) {
        const std::string f = "protocol.phases[" + std::to_string(i) + "]";
        if (const auto* cc = std::get_if<CcPhase>(&cfg.protocol.phases[i])) {
            positive(cc->c_rate, f + ".c_rate");
            require(cc->cutoff_voltage >= 2.5 && cc->cutoff_voltage <= 4.2, f + ".cutoff_voltage",
                    "must lie within [2.5, 4.2] V");
        } else if (const auto* cv = std::get_if<CvPhase>(&cfg.protocol.phases[i])) {
            require(cv->voltage >= 2.5 && cv->voltage <= 4.2, f + ".voltage", "must lie within [2.5, 4.2] V");
            positive(cv->cutoff_current_per_cell, f + ".cutoff_current_per_cell");
        } else {
            positive(std::get<RestPhase>(cfg.protocol.phases[i]).duration, f + ".duration");
        }
    }
    const auto& n = cfg.numerics;
    require(n.n_r >= 3 && n.n_x_n >= 2 && n.n_x_sep >= 1 && n.n_x_p >= 2, "numerics", "grid too coarse");
    require(n.dt_charge > 0 && n.dt_cv > 0 && n.dt_discharge > 0 && n.dt_rest > 0, "numerics.dt", "must be > 0");
    positive(n.event_tolerance, "numerics.event_tolerance");
    validate(cfg.nominal, "nominal");
    for (std::size_t i = 0; i < cfg.cells.size(); ++i) validate(cfg.cells[i], "cells[" + std::to_string(i) + "]");
}

}  // namespace parapack
