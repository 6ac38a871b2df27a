#pragma once

#include <optional>
#include <string>
#include <vector>

#include "parapack/module_solver.hpp"

namespace parapack::stats {

/// Position weights w_i for P_i = 1..n_p: (n_p/2 + 1) - P_i in the first half, n_p/2 - P_i after.
std::vector<double> loc_weights(int n_p);

enum class Normalization {
    sampling_interval,  // eps mapped through the campaign's eps sampling bounds
    module_minmax,      // min-max across the module's own cells
};

struct PredictorOptions {
    Normalization normalization = Normalization::sampling_interval;
    double capacity_rel_tol = 0.025;  // defines the sampling interval around the nominal cell
};

struct PredictorSet {
    double mu_eps_n = 0.0;
    double mu_eps_p = 0.0;
    double sigma_eps_n = 0.0;
    double sigma_eps_p = 0.0;
    double loc = 0.0;
    double r_int = 0.0;
    double sp = 0.0;
    double mu_comb = 0.0;
    double sigma_comb = 0.0;
    double loc_n = 0.0;
    double loc_p = 0.0;
    double mu_soc = 0.0;
    double sigma_soc = 0.0;
    double dtmax = 0.0;
    bool degenerate_normalization = false;

    friend bool operator==(const PredictorSet&, const PredictorSet&) = default;
};

/// Normalised eps of one electrode for every cell of the module.
std::vector<double> normalized_eps(const ModuleConfig& cfg, Electrode electrode, const PredictorOptions& options,
                                   bool* degenerate = nullptr);

/// Predictors from the module configuration and the first simulated cycle.
PredictorSet compute_predictors(const ModuleConfig& cfg, const SimTrace& trace, const PredictorOptions& options = {});

struct ResponseSet {
    double sigma_i = 0.0;                 // A, first-cycle discharge window
    double sigma_t = 0.0;                 // K, first-cycle discharge window
    std::optional<double> pct_delta_e;    // %, against the reference module
    std::optional<double> pct_delta_q;
    double dtmax = 0.0;                   // K, first cycle
    double e_lost = 0.0;                  // Wh, last cycle minus first cycle
    double e_lost_pct = 0.0;
    double sigma_r_sei = 0.0;             // ohm, end of simulation
};

ResponseSet compute_responses(const SimTrace& trace, const SimTrace* reference);

/// Sample standard deviation (n - 1); zero for fewer than two values.
double sample_sd(const std::vector<double>& x);

/// Response names accepted by the analysis layer.
const std::vector<std::string>& response_names();

/// Predictor columns used for a response, base or extended set.
std::vector<std::string> predictor_columns(const std::string& response, bool extended);

}  // namespace parapack::stats
