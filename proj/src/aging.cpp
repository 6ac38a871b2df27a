#include "parapack/aging.hpp"

#include <cmath>

#include "parapack/error.hpp"

namespace parapack {

double sei_resistance(double thickness, const CellParameters& p) {
    const double a_s = 3.0 * p.eps_s_n / p.r_n;
    return thickness / (p.sei.conductivity * a_s * p.l_n * p.area);
}

SeiState initial_sei(const CellParameters& p) {
    SeiState s;
    s.thickness = p.sei.initial_thickness;
    s.r_sei = sei_resistance(s.thickness, p);
    return s;
}

SeiRate sei_rate(const EspmModel& model, const CellState& cell, double i_cell) {
    const CellParameters& p = model.params();
    SeiRate r;
    if (p.sei.i0 <= 0.0) return r;
    const VoltageBreakdown v = model.voltage(cell, i_cell);
    const double t = cell.temperature;
    r.overpotential = v.u_n + v.eta_n + i_cell * cell.r_sei - p.sei.u_ref;
    if (r.overpotential >= 0.0) return r;
    const double i0 = p.sei.i0 * std::exp(-p.sei.activation_energy / kGasConstant * (1.0 / t - 1.0 / p.t_ref));
    r.current_density = i0 * std::exp(-p.sei.alpha * kFaraday * r.overpotential / (kGasConstant * t));
    r.side_current = r.current_density * model.specific_area_n() * p.l_n * p.area;
    return r;
}

SeiState step_sei(const SeiState& state, const SeiRate& rate, double dt, const CellParameters& p) {
    if (!(dt > 0.0)) throw DomainError("step_sei: dt must be > 0");
    SeiState next = state;
    if (rate.current_density <= 0.0) return next;
    next.thickness += rate.current_density * p.sei.molar_mass / (p.sei.density * kFaraday) * dt;
    next.r_sei = sei_resistance(next.thickness, p);
    next.n_li_lost += rate.side_current * dt / kFaraday;
    return next;
}

SeiState step_sei(const SeiState& state, const EspmModel& model, const CellState& cell, double i_cell, double dt) {
    return step_sei(state, sei_rate(model, cell, i_cell), dt, model.params());
}

}  // namespace parapack
