#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "parapack/module_solver.hpp"
#include "parapack/stats/predictors.hpp"
#include "parapack/table.hpp"

namespace parapack {

struct CampaignSpec {
    int n_modules = 500;
    int n_cycles = 500;
    int n_p = 4;
    double t_amb = 298.15;
    std::uint64_t master_seed = 1;
    double nominal_capacity_ah = 4.85;
    SamplingRanges ranges;
    NumericsSettings numerics;
    stats::PredictorOptions predictor_options;
    std::filesystem::path output_dir;  // empty: keep everything in memory
    bool keep_traces = false;
    int stop_after = -1;               // simulate at most this many new modules, then return (-1: no limit)

    friend bool operator==(const CampaignSpec&, const CampaignSpec&) = default;
};

/// 50 modules x 50 cycles on the coarse grid.
CampaignSpec fast_campaign();

std::uint64_t splitmix64(std::uint64_t x);

/// splitmix64(splitmix64(master) + index): independent of worker count and completion order.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

CellParameters campaign_nominal(const CampaignSpec& spec);
ModuleConfig campaign_module(const CampaignSpec& spec, int index);
ModuleConfig campaign_reference(const CampaignSpec& spec);

/// One cycle of the unperturbed reference module.
SimTrace simulate_reference(const CampaignSpec& spec);

/// Simulates module `index` and returns its single results row. Failures are reported in
/// the status column, never thrown.
/// With trace_out and record_samples false, only the cycle summaries are kept.
Table run_module(const CampaignSpec& spec, int index, const SimTrace& reference, SimTrace* trace_out = nullptr,
                 bool record_samples = true);

/// Runs every module (skipping those with a completion marker under output_dir/modules),
/// assembles results in index order and, with an output directory, writes results.csv and
/// reference_summary.csv atomically. `workers` <= 0 uses the OpenMP default.
Table run_campaign(const CampaignSpec& spec, int workers = 0);

/// Called once per successfully simulated module with its summaries (no samples),
/// possibly from several threads at once.
using ModuleObserver = std::function<void(int index, const SimTrace& trace)>;
Table run_campaign(const CampaignSpec& spec, int workers, const ModuleObserver& observe);
Table run_campaign_serial(const CampaignSpec& spec);

/// Column order of results.csv for n_p cells.
std::vector<std::string> result_columns(int n_p);

}  // namespace parapack
