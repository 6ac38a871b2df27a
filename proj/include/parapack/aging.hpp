#pragma once

#include "parapack/espm.hpp"

namespace parapack {

struct SeiState {
    double thickness = 0.0;  // m
    double r_sei = 0.0;      // ohm
    double n_li_lost = 0.0;  // mol of cyclable lithium consumed

    friend bool operator==(const SeiState&, const SeiState&) = default;
};

struct SeiRate {
    double overpotential = 0.0;     // V, negative when the side reaction is favourable
    double current_density = 0.0;   // A/m^2 of particle surface, >= 0
    double side_current = 0.0;      // A for the whole negative electrode
};

SeiState initial_sei(const CellParameters& params);

/// Film resistance of a layer of given thickness over the negative particle surface.
double sei_resistance(double thickness, const CellParameters& params);

/// Tafel side reaction, gated to zero when eta_sei >= 0.
/// eta_sei = U_n(surface) + eta_n + I*R_sei - U_sei with I positive on discharge.
SeiRate sei_rate(const EspmModel& model, const CellState& cell, double i_cell);

SeiState step_sei(const SeiState& state, const SeiRate& rate, double dt, const CellParameters& params);
SeiState step_sei(const SeiState& state, const EspmModel& model, const CellState& cell, double i_cell, double dt);

}  // namespace parapack
