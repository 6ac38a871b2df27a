#pragma once

#include <span>
#include <vector>

#include "parapack/aging.hpp"
#include "parapack/espm.hpp"
#include "parapack/params.hpp"
#include "parapack/thermal.hpp"

namespace parapack {

enum class Drive { current, voltage };

struct BranchSolution {
    std::vector<double> currents;  // A, positive on discharge
    std::vector<double> v_cell;
    double i_mod = 0.0;
    double v_mod = 0.0;
    double kcl_residual = 0.0;     // |sum I - I_mod|
    double ladder_residual = 0.0;  // max over adjacent pairs, V
    int iterations = 0;
};

/// Solves the interconnection ladder
///   V[k+1] = V[k] + 2 R_int (I_mod - sum_{z<=k} I[z]),  sum I = I_mod
/// with damped Newton. Terminals sit at cell 0: V_mod = V[0] - 2 R_int I_mod.
/// Drive::current fixes I_mod = target; Drive::voltage fixes V_mod = target.
/// Throws SolverError after the retry also stagnates.
BranchSolution solve_branch_currents(std::span<const FrozenVoltage> cells, double target, Drive drive,
                                     double r_int, std::span<const double> initial_guess = {});

/// Convenience form over cell states and their models.
BranchSolution solve_branch_currents(std::span<const CellState> states, std::span<const EspmModel> models,
                                     double i_mod, double r_int);

struct ModuleState {
    std::vector<CellState> cells;
    std::vector<SeiState> sei;
    std::vector<double> i_branch;
    double v_mod = 0.0;
    double i_mod = 0.0;
    double t = 0.0;
    int cycle_index = 0;
    int phase_index = 0;
};

/// Per-cycle figures. Time averages use the trapezoid rule over step-start samples,
/// with the last sample held to the window end; charges and energies use the applied
/// (piecewise constant) currents.
struct CycleSummary {
    int cycle = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    double discharge_t0 = 0.0;
    double discharge_t1 = 0.0;
    double q_mod_ah = 0.0;             // CC discharge window
    double e_mod_wh = 0.0;
    double e_cells_wh = 0.0;           // sum_k int V_k I_k dt over the same window
    double e_ladder_loss_wh = 0.0;     // interconnection Joule losses over the window
    std::vector<double> q_branch_ah;
    double sigma_i = 0.0;              // A
    double sigma_t = 0.0;              // K
    double dtmax = 0.0;                // K, whole cycle
    std::vector<double> soc_eod;       // at the end of the CC discharge
    std::vector<double> r_sei_end;     // at the end of the cycle
    std::vector<double> temp_avg;      // time-averaged over the cycle
};

struct SimDiagnostics {
    double max_kcl_residual = 0.0;
    double max_ladder_residual = 0.0;
    double max_thermal_residual = 0.0;  // W
    int max_newton_iterations = 0;
    long accepted_steps = 0;
    long clamped_entries = 0;
    long ocp_clamps = 0;
    int halvings = 0;
};

/// Columnar time series (one row per recorded accepted step) plus per-cycle summaries.
struct SimTrace {
    int n_p = 0;
    std::vector<double> t;
    std::vector<int> cycle;
    std::vector<int> phase;
    std::vector<double> v_mod;
    std::vector<double> i_mod;
    std::vector<double> i_branch;  // row-major, n_p per row
    std::vector<double> temp;
    std::vector<double> soc;
    std::vector<double> r_sei;
    std::vector<CycleSummary> cycles;
    std::vector<double> temp_time_avg;  // whole simulation
    std::vector<double> sei_lithium_lost;  // mol per cell
    SimDiagnostics diag;

    std::size_t rows() const { return t.size(); }
    double branch(std::size_t row, int k) const { return i_branch[row * n_p + k]; }
    double temperature(std::size_t row, int k) const { return temp[row * n_p + k]; }
};

struct SimOptions {
    int record_every = 1;   // 0 disables sample recording
    int record_cycles = -1; // record samples for the first N cycles only (-1: all)
};

/// Runs cfg.n_cycles passes of cfg.protocol from 0 % SOC at ambient temperature.
SimTrace run_protocol(const ModuleConfig& cfg, const SimOptions& options = {});

/// Rebuilds the window statistics of `summary` from the recorded samples of its cycle.
/// Identical arithmetic to the online accumulation when every step was recorded.
CycleSummary summarize_samples(const SimTrace& trace, const CycleSummary& summary);

/// Per-cell mean squared error after resampling `b` onto the overlapping part of `a`'s grid.
std::vector<double> mse_current(const SimTrace& a, const SimTrace& b);
std::vector<double> mse_temperature(const SimTrace& a, const SimTrace& b);

}  // namespace parapack
