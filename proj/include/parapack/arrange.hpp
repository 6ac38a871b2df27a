#pragma once

#include <vector>

#include "parapack/module_solver.hpp"
#include "parapack/stats/predictors.hpp"

namespace parapack {

/// order[pos] = original index of the cell placed at position pos (0 nearest the terminals).
using Order = std::vector<int>;

enum class CapacityKey {
    measured,            // discharge capacity of the cell alone under the module protocol
    limiting_electrode,  // min over electrodes of capacity_from_eps
};

struct CapacityOptions {
    CapacityKey key = CapacityKey::measured;
    NumericsSettings numerics;
    ProtocolSpec protocol = standard_cycle();
    double t_amb = 298.15;
};

/// First-cycle CC discharge capacity (Ah) of `cell` cycled on its own.
double measured_capacity(const CellParameters& cell, const CapacityOptions& options = {});
std::vector<double> cell_capacities(const std::vector<CellParameters>& cells, const CapacityOptions& options = {});

/// Stable sorts, ties kept in original order.
Order arrange_descending(const std::vector<double>& capacities);
Order arrange_ascending(const std::vector<double>& capacities);
Order arrange_descending_capacity(const std::vector<CellParameters>& cells, const CapacityOptions& options = {});
Order arrange_ascending_capacity(const std::vector<CellParameters>& cells, const CapacityOptions& options = {});

ModuleConfig reorder(const ModuleConfig& cfg, const Order& order);

/// All n! orders in lexicographic order.
std::vector<Order> all_orders(int n);

struct ArrangementOutcome {
    Order order;
    stats::ResponseSet responses;
    double q_mod_ah = 0.0;  // first-cycle discharge capacity
    double e_mod_wh = 0.0;
};

struct ArrangementComparison {
    Order baseline;
    Order proposed;
    ArrangementOutcome baseline_outcome;
    ArrangementOutcome proposed_outcome;
    // (proposed - baseline) / |baseline|; zero when the baseline value is zero
    double rel_sigma_i = 0.0;
    double rel_dtmax = 0.0;
    double rel_e_lost = 0.0;
    double rel_sigma_r_sei = 0.0;
};

double relative_change(double baseline, double proposed);

/// Simulates cfg under every order (n_cycles each), in parallel with deterministic output order.
std::vector<ArrangementOutcome> evaluate_orders(const ModuleConfig& cfg, const std::vector<Order>& orders,
                                                int n_cycles);

/// Every order compared against orders[0].
std::vector<ArrangementComparison> compare_arrangements(const ModuleConfig& cfg, const std::vector<Order>& orders,
                                                        int n_cycles);

}  // namespace parapack
