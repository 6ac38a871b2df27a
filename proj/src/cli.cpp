#include "parapack/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <json.hpp>
#include <numeric>
#include <omp.h>
#include <set>

#include "parapack/arrange.hpp"
#include "parapack/campaign.hpp"
#include "parapack/config_io.hpp"
#include "parapack/error.hpp"
#include "parapack/stats/analysis.hpp"
#include "parapack/table.hpp"
#include "parapack/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace parapack {

namespace {

/// Input problems the user can fix: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& args) : started_(utc_now()) {
        j_["tool"] = "parapack";
        j_["version"] = PARAPACK_VERSION;
        j_["command"] = std::move(command);
        j_["args"] = args;
        j_["outputs"] = json::array();
    }
    void set(const std::string& key, json value) { j_[key] = std::move(value); }
    void output(const fs::path& dir, const fs::path& file) {
        const std::string bytes = read_file(dir / file);
        j_["outputs"].push_back({{"file", file.generic_string()}, {"bytes", bytes.size()}, {"fnv1a", hex64(fnv1a(bytes))}});
    }
    void write(const fs::path& dir) {
        j_["started"] = started_;
        j_["finished"] = utc_now();
        write_file_atomic(dir / "manifest.json", j_.dump(2) + "\n");
    }

private:
    json j_;
    std::string started_;
};

ModuleConfig read_config(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("config file not found: " + path);
    return load_config(path);
}

void apply_workers(int workers) {
    if (workers < 0) throw UsageError("--workers must be >= 0");
    const int w = workers > 0 ? workers : default_workers();
    if (w > 0) omp_set_num_threads(w);
}

template <class T>
T json_get(const json& j, const char* key, T fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + key, "has the wrong type");
    }
}

CampaignSpec read_campaign_spec(const std::string& path, bool fast) {
    CampaignSpec spec = fast ? fast_campaign() : CampaignSpec{};
    if (path.empty()) return spec;
    if (!fs::exists(path)) throw UsageError("spec file not found: " + path);
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "top level must be an object");
    static const std::set<std::string> allowed{"n_modules", "n_cycles", "n_p", "t_amb", "master_seed",
                                               "nominal_capacity_ah", "ranges", "numerics", "normalization"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(it.key(), "unknown field");
    spec.n_modules = json_get(j, "n_modules", spec.n_modules, "");
    spec.n_cycles = json_get(j, "n_cycles", spec.n_cycles, "");
    spec.n_p = json_get(j, "n_p", spec.n_p, "");
    spec.t_amb = json_get(j, "t_amb", spec.t_amb, "");
    spec.master_seed = json_get(j, "master_seed", spec.master_seed, "");
    spec.nominal_capacity_ah = json_get(j, "nominal_capacity_ah", spec.nominal_capacity_ah, "");
    if (j.contains("ranges")) {
        const json& r = j.at("ranges");
        auto& s = spec.ranges;
        s.capacity_rel_tol = json_get(r, "capacity_rel_tol", s.capacity_rel_tol, "ranges.");
        s.r_int_min = json_get(r, "r_int_min", s.r_int_min, "ranges.");
        s.r_int_max = json_get(r, "r_int_max", s.r_int_max, "ranges.");
        s.sp_min = json_get(r, "sp_min", s.sp_min, "ranges.");
        s.sp_max = json_get(r, "sp_max", s.sp_max, "ranges.");
    }
    if (j.contains("numerics")) {
        const std::string tier = json_get<std::string>(j, "numerics", "", "");
        if (tier == "fast") spec.numerics = fast_numerics();
        else if (tier == "default") spec.numerics = NumericsSettings{};
        else throw ConfigError("numerics", "must be 'fast' or 'default'");
    }
    if (j.contains("normalization")) {
        const std::string n = json_get<std::string>(j, "normalization", "", "");
        if (n == "sampling_interval") spec.predictor_options.normalization = stats::Normalization::sampling_interval;
        else if (n == "module_minmax") spec.predictor_options.normalization = stats::Normalization::module_minmax;
        else throw ConfigError("normalization", "must be 'sampling_interval' or 'module_minmax'");
    }
    return spec;
}

void validate_spec(const CampaignSpec& spec) {
    if (spec.n_modules < 1) throw ConfigError("n_modules", "must be >= 1");
    if (spec.n_cycles < 1) throw ConfigError("n_cycles", "must be >= 1");
    if (spec.n_p < 2) throw ConfigError("n_p", "need at least 2 parallel cells");
    if (!(spec.nominal_capacity_ah > 0.0)) throw ConfigError("nominal_capacity_ah", "must be > 0");
    if (!(spec.t_amb > 0.0)) throw ConfigError("t_amb", "must be > 0");
    validate(spec.ranges);
}

int cmd_simulate(const std::string& config, int cycles, const std::string& out, std::int64_t seed,
                 int record_every, bool binary, const std::vector<std::string>& args, std::ostream& log) {
    ModuleConfig cfg = read_config(config);
    if (cycles != -1) {
        if (cycles < 1) throw ConfigError("cycles", "must be >= 1 (got " + std::to_string(cycles) + ")");
        cfg.n_cycles = cycles;
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (record_every < 1) throw ConfigError("record-every", "must be >= 1");
    const SimTrace trace = run_protocol(cfg, SimOptions{record_every, -1});

    const fs::path dir(out);
    fs::create_directories(dir);
    Manifest m("simulate", args);
    m.set("config_hash", hex64(fnv1a(config_to_json(cfg))));
    m.set("seed", cfg.seed);
    const Table tt = trace_table(trace);
    const Table st = summary_table(trace);
    if (binary) {
        write_binary(tt, dir / "trace.bin");
        m.output(dir, "trace.bin");
    } else {
        write_csv(tt, dir / "trace.csv");
        m.output(dir, "trace.csv");
    }
    write_csv(st, dir / "summary.csv");
    m.output(dir, "summary.csv");
    m.write(dir);
    log << "simulated " << cfg.n_cycles << " cycle(s), " << trace.diag.accepted_steps << " steps; outputs in "
        << dir.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, bool fast, int workers, bool keep_traces,
              std::int64_t seed, int modules, int cycles, const std::vector<std::string>& args, std::ostream& log) {
    CampaignSpec spec = read_campaign_spec(spec_path, fast);
    if (seed >= 0) spec.master_seed = static_cast<std::uint64_t>(seed);
    if (modules != -1) spec.n_modules = modules;
    if (cycles != -1) spec.n_cycles = cycles;
    validate_spec(spec);
    spec.output_dir = out;
    spec.keep_traces = keep_traces;
    apply_workers(workers);
    const Table results = run_campaign(spec, workers);
    const fs::path dir(out);
    Manifest m("sweep", args);
    m.set("master_seed", spec.master_seed);
    m.set("config_hash", hex64(fnv1a(spec_path.empty() ? std::string("default") : read_file(spec_path))));
    m.set("n_modules", spec.n_modules);
    m.set("n_cycles", spec.n_cycles);
    m.output(dir, "results.csv");
    m.output(dir, "reference_summary.csv");
    m.write(dir);
    std::size_t failed = 0;
    for (const auto& s : results.strings("status")) failed += s != "ok";
    log << "swept " << results.rows() << " module(s), " << failed << " failed; results in "
        << (dir / "results.csv").string() << "\n";
    return kExitOk;
}

int cmd_analyze(const std::string& results_path, const std::string& response, bool extended, const std::string& out,
                int workers, const std::vector<std::string>& args, std::ostream& log) {
    if (!fs::exists(results_path)) throw UsageError("results file not found: " + results_path);
    const auto& names = stats::response_names();
    if (std::find(names.begin(), names.end(), response) == names.end())
        throw UsageError("unknown response '" + response + "'");
    apply_workers(workers);
    const Table results = read_csv(results_path);
    stats::AnalysisOptions opt;
    opt.extended = extended;
    const auto a = stats::analyze_results(results, response, opt);

    const fs::path dir(out);
    fs::create_directories(dir);
    Manifest m("analyze", args);
    m.set("config_hash", hex64(fnv1a(read_file(results_path))));
    write_csv(stats::model_table(a), dir / "model.csv");
    write_csv(stats::pareto_table(a.pareto), dir / "pareto.csv");
    write_csv(stats::residual_table(a), dir / "residuals.csv");
    const std::string text = stats::format_model(a) + "\n" + stats::format_pareto(a.pareto);
    write_file_atomic(dir / "report.txt", text);
    for (const char* f : {"model.csv", "pareto.csv", "residuals.csv", "report.txt"}) m.output(dir, f);
    m.write(dir);
    log << text;
    return kExitOk;
}

std::string order_text(const Order& o) {
    std::string s;
    for (std::size_t i = 0; i < o.size(); ++i) s += (i ? "-" : "") + std::to_string(o[i] + 1);
    return s;
}

int cmd_arrange(const std::string& config, int cycles, bool exhaustive, const std::string& key, const std::string& out,
                int workers, const std::vector<std::string>& args, std::ostream& log) {
    ModuleConfig cfg = read_config(config);
    if (cycles < 1) throw ConfigError("cycles", "must be >= 1 (got " + std::to_string(cycles) + ")");
    if (key != "measured" && key != "limiting") throw UsageError("--key must be measured or limiting");
    apply_workers(workers);
    CapacityOptions copt;
    copt.key = key == "measured" ? CapacityKey::measured : CapacityKey::limiting_electrode;
    copt.numerics = cfg.numerics;
    copt.protocol = cfg.protocol;
    copt.t_amb = cfg.t_amb;
    const auto caps = cell_capacities(cfg.cells, copt);
    Order given(cfg.n_p);
    std::iota(given.begin(), given.end(), 0);
    std::vector<Order> orders{given, arrange_descending(caps), arrange_ascending(caps)};
    std::vector<std::string> labels{"given", "descending", "ascending"};
    if (exhaustive) {
        for (const auto& o : all_orders(cfg.n_p)) {
            orders.push_back(o);
            labels.push_back("permutation");
        }
    }
    const auto cmp = compare_arrangements(cfg, orders, cycles);

    Table t;
    std::vector<std::string> lab, ord;
    std::vector<double> si, dt, el, sr, q, rsi, rdt, rel, rsr;
    for (std::size_t i = 0; i < cmp.size(); ++i) {
        const auto& r = cmp[i].proposed_outcome.responses;
        lab.push_back(labels[i]);
        ord.push_back(order_text(cmp[i].proposed));
        si.push_back(r.sigma_i);
        dt.push_back(r.dtmax);
        el.push_back(r.e_lost);
        sr.push_back(r.sigma_r_sei);
        q.push_back(cmp[i].proposed_outcome.q_mod_ah);
        rsi.push_back(cmp[i].rel_sigma_i);
        rdt.push_back(cmp[i].rel_dtmax);
        rel.push_back(cmp[i].rel_e_lost);
        rsr.push_back(cmp[i].rel_sigma_r_sei);
    }
    t.add("label", lab);
    t.add("order", ord);
    t.add("sigma_i", si);
    t.add("dtmax", dt);
    t.add("e_lost", el);
    t.add("sigma_rsei", sr);
    t.add("q_mod_ah", q);
    t.add("rel_sigma_i", rsi);
    t.add("rel_dtmax", rdt);
    t.add("rel_e_lost", rel);
    t.add("rel_sigma_rsei", rsr);

    std::string text;
    char line[200];
    std::snprintf(line, sizeof line, "%-12s %-10s %10s %10s %12s %12s\n", "label", "order", "sigma_i", "dtmax",
                  "e_lost", "sigma_rsei");
    text += line;
    for (std::size_t i = 0; i < 3; ++i) {
        std::snprintf(line, sizeof line, "%-12s %-10s %10.5f %10.5f %12.6f %12.5g\n", lab[i].c_str(), ord[i].c_str(),
                      si[i], dt[i], el[i], sr[i]);
        text += line;
    }
    std::snprintf(line, sizeof line, "descending vs ascending: dtmax %+.2f%%, sigma_i %+.2f%%\n",
                  100.0 * relative_change(dt[2], dt[1]), 100.0 * relative_change(si[2], si[1]));
    text += line;
    if (exhaustive) {
        std::size_t rank = 1;
        for (std::size_t i = 3; i < dt.size(); ++i) rank += dt[i] < dt[1];
        std::snprintf(line, sizeof line, "descending order ranks %zu of %zu permutations by dtmax\n", rank,
                      dt.size() - 3);
        text += line;
    }

    const fs::path dir(out);
    fs::create_directories(dir);
    Manifest m("arrange", args);
    m.set("config_hash", hex64(fnv1a(config_to_json(cfg))));
    m.set("seed", cfg.seed);
    write_csv(t, dir / "arrangement.csv");
    write_file_atomic(dir / "arrangement.txt", text);
    m.output(dir, "arrangement.csv");
    m.output(dir, "arrangement.txt");
    m.write(dir);
    log << text;
    return kExitOk;
}

bool is_binary_path(const std::string& p) { return fs::path(p).extension() == ".bin"; }

int cmd_export(const std::string& in, const std::string& out, const std::string& to, std::ostream& log) {
    if (!fs::exists(in)) throw UsageError("input file not found: " + in);
    std::string target = to;
    if (target.empty()) target = is_binary_path(out) ? "binary" : "csv";
    if (target != "csv" && target != "binary") throw UsageError("--to must be csv or binary");
    Table t;
    try {
        const std::string bytes = read_file(in);
        t = bytes.rfind("PPKTAB01", 0) == 0 ? parse_binary(bytes) : parse_csv(bytes);
    } catch (const std::runtime_error& e) {
        throw UsageError(std::string("cannot read table: ") + e.what());
    }
    if (target == "binary") write_binary(t, out);
    else write_csv(t, out);
    log << "exported " << t.rows() << " rows x " << t.names.size() << " columns to " << out << "\n";
    return kExitOk;
}

}  // namespace

int default_workers() {
    const char* env = std::getenv("PARAPACK_WORKERS");
    if (!env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    return (end && *end == '\0' && v > 0 && v < 4096) ? static_cast<int>(v) : 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Parallel-connected lithium-ion module simulator and heterogeneity analysis", "parapack"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PARAPACK_VERSION);

    std::string config, outdir, spec, results, response, key = "measured", input, to;
    int cycles = -1, workers = 0, modules = -1, record_every = 1;
    std::int64_t seed = -1;
    bool fast = false, keep = false, extended = false, exhaustive = false, binary = false;

    auto common = [&](CLI::App* c, bool out_required) {
        auto* o = c->add_option("--out", outdir, "output directory");
        if (out_required) o->required();
        c->add_option("--seed", seed, "seed override")->check(CLI::NonNegativeNumber);
        c->add_option("--workers", workers, "worker threads (default: PARAPACK_WORKERS or all cores)");
    };

    auto* sim = app.add_subcommand("simulate", "run one module through its protocol");
    sim->add_option("--config", config, "module JSON file")->required();
    sim->add_option("--cycles", cycles, "override the number of cycles");
    sim->add_option("--record-every", record_every, "keep every k-th step in the trace");
    sim->add_flag("--binary", binary, "write the trace in the compact binary format");
    common(sim, true);

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo campaign over sampled modules");
    sweep->add_option("--spec", spec, "campaign JSON file");
    sweep->add_flag("--fast", fast, "50 modules x 50 cycles on the coarse grid");
    sweep->add_flag("--keep-traces", keep, "write per-module traces");
    sweep->add_option("--modules", modules, "override the module count");
    sweep->add_option("--cycles", cycles, "override the cycle count");
    common(sweep, true);

    auto* an = app.add_subcommand("analyze", "stepwise MLR and dominance analysis of one response");
    an->add_option("--results", results, "results.csv from sweep")->required();
    an->add_option("--response", response, "sigma_i|sigma_t|dtmax|dq|de|elost|sigma_rsei")->required();
    an->add_flag("--extended-predictors", extended, "use the response-specific extended predictor set");
    common(an, true);

    auto* ar = app.add_subcommand("arrange", "compare cell orderings of one module");
    ar->add_option("--config", config, "module JSON file")->required();
    ar->add_option("--cycles", cycles, "cycles per ordering")->required();
    ar->add_flag("--exhaustive", exhaustive, "also simulate every permutation");
    ar->add_option("--key", key, "capacity used for sorting: measured|limiting");
    common(ar, true);

    auto* ex = app.add_subcommand("export", "convert tables between CSV and the binary format");
    ex->add_option("--in", input, "input table (CSV or binary)")->required();
    ex->add_option("--to", to, "csv|binary (default: from the --out extension)");
    common(ex, true);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        const CLI::App* where = &app;
        for (const auto* sub : app.get_subcommands()) where = sub;
        err << where->help();
        return kExitUsage;
    }

    try {
        if (*sim) return cmd_simulate(config, cycles, outdir, seed, record_every, binary, args, out);
        if (*sweep) return cmd_sweep(spec, outdir, fast, workers, keep, seed, modules, cycles, args, out);
        if (*an) return cmd_analyze(results, response, extended, outdir, workers, args, out);
        if (*ar) return cmd_arrange(config, cycles, exhaustive, key, outdir, workers, args, out);
        if (*ex) return cmd_export(input, outdir, to, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace parapack
