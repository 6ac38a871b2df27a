#pragma once

#include <vector>

#include "parapack/params.hpp"

namespace parapack {

/// Electrochemical state of one cell. Currents are positive on discharge.
struct CellState {
    std::vector<double> c_s_n;  // mol/m^3, one value per radial shell (centre -> surface)
    std::vector<double> c_s_p;
    std::vector<double> c_e;    // mol/m^3, negative electrode | separator | positive electrode
    double temperature = 298.15;
    double r_sei = 0.0;
    double soc = 0.0;

    friend bool operator==(const CellState&, const CellState&) = default;
};

struct VoltageBreakdown {
    double u_p = 0.0;
    double u_n = 0.0;
    double eta_p = 0.0;
    double eta_n = 0.0;
    double dphi_e = 0.0;
    double ohmic = 0.0;
    double v_cell = 0.0;
};

/// Terminal voltage as a function of current with the cell state held fixed.
///
/// Surface stoichiometries move linearly with the current through the
/// outer-shell flux extrapolation; exchange currents and the electrolyte
/// concentration term are frozen. `breakdown` is the single place the voltage
/// is assembled. Valid while the owning EspmModel is alive.
struct FrozenVoltage {
    const OcpTable* ocp_n = nullptr;
    const OcpTable* ocp_p = nullptr;
    double theta_n0 = 0.0;  // surface stoichiometry at zero current
    double dtheta_n = 0.0;  // d theta_surf / dI
    double theta_p0 = 0.0;
    double dtheta_p = 0.0;
    double dtemp = 0.0;     // T - T_ref for the entropic shift
    double dphi_conc = 0.0;
    double r_electrolyte = 0.0;
    double r_ohmic = 0.0;   // R_cell + R_sei
    double vt = 0.0;        // 2RT/F
    double a_n = 1.0;       // 2 a_s L A i0, A
    double a_p = 1.0;

    VoltageBreakdown breakdown(double current) const;
    double voltage(double current) const { return breakdown(current).v_cell; }
    double slope(double current) const;  // dv/dI
};

struct StepDiagnostics {
    int clamped = 0;
};

/// Enhanced single particle model of one cell on a fixed finite-volume grid.
class EspmModel {
public:
    EspmModel(const CellParameters& params, const NumericsSettings& numerics);

    /// Uniform concentrations at `soc` along the stoichiometry windows; electrolyte at rest.
    CellState initial_state(double soc, double temperature) const;

    /// Backward-Euler step at constant current. `side_current` (A, >= 0) is lithium drawn
    /// from the negative particles by the SEI reaction on top of the external current.
    CellState step(const CellState& state, double current, double dt, double side_current = 0.0,
                   StepDiagnostics* diag = nullptr) const;

    FrozenVoltage frozen(const CellState& state, double side_current = 0.0) const;
    VoltageBreakdown voltage(const CellState& state, double current) const { return frozen(state).breakdown(current); }

    double soc(const CellState& state) const;
    double mean_stoichiometry_n(const CellState& state) const;
    double mean_stoichiometry_p(const CellState& state) const;
    double surface_stoichiometry_n(const CellState& state, double current, double side_current = 0.0) const;
    double surface_stoichiometry_p(const CellState& state, double current) const;

    /// Equilibrium voltage from volume-averaged stoichiometries at the cell temperature.
    double bulk_ocv(const CellState& state) const;
    /// d(U_p - U_n)/dT at the volume-averaged stoichiometries.
    double bulk_entropic(const CellState& state) const;

    /// Moles of lithium in each electrode's solid phase and in the electrolyte.
    double lithium_n(const CellState& state) const;
    double lithium_p(const CellState& state) const;
    double lithium_electrolyte(const CellState& state) const;

    double specific_area_n() const { return 3.0 * p_.eps_s_n / p_.r_n; }
    double specific_area_p() const { return 3.0 * p_.eps_s_p / p_.r_p; }
    const CellParameters& params() const { return p_; }
    int n_r() const { return n_r_; }
    int n_x() const { return static_cast<int>(dx_.size()); }

private:
    double arrhenius(double ea, double temperature) const;
    void diffuse_particle(std::vector<double>& c, double diffusivity, double radius, double out_flux,
                          double dt) const;
    double surface_from(const std::vector<double>& c, double diffusivity, double radius, double out_flux) const;

    CellParameters p_;
    int n_r_;
    std::vector<double> shell_volume_;  // (x_{i+1}^3 - x_i^3)/3, dimensionless
    std::vector<double> face_area_;     // x_i^2 at inner faces, size n_r+1
    std::vector<double> dx_;
    std::vector<double> eps_e_;
    std::vector<double> face_conductance_;  // D_eff / distance at interior faces, size n_x-1
    std::vector<double> source_weight_;     // +1/L_n, 0, -1/L_p
    int n_x_n_;
    int n_x_p_;
};

/// Free-function forms over a throwaway model (convenient in tests and tools).
CellState step_cell(const CellState& state, double i_cell, double dt, const CellParameters& params,
                    const NumericsSettings& numerics = {});
VoltageBreakdown cell_voltage(const CellState& state, double i_cell, const CellParameters& params,
                              const NumericsSettings& numerics = {});
double soc_of(const CellState& state, const CellParameters& params, const NumericsSettings& numerics = {});

}  // namespace parapack
