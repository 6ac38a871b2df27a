#include "parapack/arrange.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "parapack/error.hpp"

namespace parapack {

Order arrange_descending(const std::vector<double>& capacities) {
    Order order(capacities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return capacities[a] > capacities[b]; });
    return order;
}

Order arrange_ascending(const std::vector<double>& capacities) {
    Order order(capacities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return capacities[a] < capacities[b]; });
    return order;
}

double measured_capacity(const CellParameters& cell, const CapacityOptions& options) {
    // two identical cells without interconnection resistance share the load equally
    ModuleConfig cfg;
    cfg.n_p = 2;
    cfg.nominal = cell;
    cfg.cells = {cell, cell};
    cfg.r_int = 0.0;
    cfg.t_amb = options.t_amb;
    cfg.protocol = options.protocol;
    cfg.numerics = options.numerics;
    cfg.n_cycles = 1;
    return 0.5 * run_protocol(cfg, SimOptions{0, 0}).cycles.front().q_mod_ah;
}

std::vector<double> cell_capacities(const std::vector<CellParameters>& cells, const CapacityOptions& options) {
    if (cells.size() < 2) throw DomainError("arrangement needs at least two cells");
    std::vector<double> q;
    for (const auto& c : cells)
        q.push_back(options.key == CapacityKey::measured ? measured_capacity(c, options) : limiting_capacity(c));
    return q;
}

Order arrange_descending_capacity(const std::vector<CellParameters>& cells, const CapacityOptions& options) {
    return arrange_descending(cell_capacities(cells, options));
}

Order arrange_ascending_capacity(const std::vector<CellParameters>& cells, const CapacityOptions& options) {
    return arrange_ascending(cell_capacities(cells, options));
}

ModuleConfig reorder(const ModuleConfig& cfg, const Order& order) {
    if (order.size() != cfg.cells.size()) throw DomainError("reorder: order length does not match the cell count");
    std::vector<int> seen(order.size(), 0);
    for (int i : order) {
        if (i < 0 || i >= static_cast<int>(order.size()) || seen[i]++) throw DomainError("reorder: not a permutation");
    }
    ModuleConfig out = cfg;
    for (std::size_t pos = 0; pos < order.size(); ++pos) out.cells[pos] = cfg.cells[order[pos]];
    return out;
}

std::vector<Order> all_orders(int n) {
    Order o(n);
    std::iota(o.begin(), o.end(), 0);
    std::vector<Order> out;
    do out.push_back(o);
    while (std::next_permutation(o.begin(), o.end()));
    return out;
}

double relative_change(double baseline, double proposed) {
    if (baseline == 0.0) return 0.0;
    return (proposed - baseline) / std::abs(baseline);
}

std::vector<ArrangementOutcome> evaluate_orders(const ModuleConfig& cfg, const std::vector<Order>& orders,
                                                int n_cycles) {
    std::vector<ArrangementOutcome> out(orders.size());
    std::vector<std::exception_ptr> errors(orders.size());
    const int n = static_cast<int>(orders.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            ModuleConfig c = reorder(cfg, orders[i]);
            c.n_cycles = n_cycles;
            const SimTrace trace = run_protocol(c, SimOptions{0, 0});
            out[i].order = orders[i];
            out[i].responses = stats::compute_responses(trace, nullptr);
            out[i].q_mod_ah = trace.cycles.front().q_mod_ah;
            out[i].e_mod_wh = trace.cycles.front().e_mod_wh;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

std::vector<ArrangementComparison> compare_arrangements(const ModuleConfig& cfg, const std::vector<Order>& orders,
                                                        int n_cycles) {
    if (orders.empty()) return {};
    const auto outcomes = evaluate_orders(cfg, orders, n_cycles);
    std::vector<ArrangementComparison> out;
    for (const auto& o : outcomes) {
        ArrangementComparison c;
        c.baseline = outcomes.front().order;
        c.proposed = o.order;
        c.baseline_outcome = outcomes.front();
        c.proposed_outcome = o;
        const auto& b = outcomes.front().responses;
        const auto& p = o.responses;
        c.rel_sigma_i = relative_change(b.sigma_i, p.sigma_i);
        c.rel_dtmax = relative_change(b.dtmax, p.dtmax);
        c.rel_e_lost = relative_change(b.e_lost, p.e_lost);
        c.rel_sigma_r_sei = relative_change(b.sigma_r_sei, p.sigma_r_sei);
        out.push_back(c);
    }
    return out;
}

}  // namespace parapack
