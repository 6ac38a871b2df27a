#include "parapack/module_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "parapack/error.hpp"

namespace parapack {

namespace {

double sample_std(std::span<const double> x, double centre) {
    double s = 0.0;
    for (double v : x) s += (v - centre) * (v - centre);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double spread_of(std::span<const double> x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return *hi - *lo;
}

struct Evaluation {
    std::vector<double> v;
    std::vector<double> g;
    std::vector<double> r;
    double norm = 0.0;
};

void evaluate(std::span<const FrozenVoltage> cells, std::span<const double> x, double target, Drive drive,
              double r_int, Evaluation& e) {
    const std::size_t n = cells.size();
    e.v.resize(n);
    e.g.resize(n);
    e.r.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        e.v[k] = cells[k].voltage(x[k]);
        e.g[k] = cells[k].slope(x[k]);
    }
    // downstream form: V[k+1] - V[k] - 2R * sum_{z>k} I[z]
    double tail = 0.0;
    for (std::size_t k = n - 1; k-- > 0;) {
        tail += x[k + 1];
        e.r[k] = e.v[k + 1] - e.v[k] - 2.0 * r_int * tail;
    }
    const double total = tail + x[0];
    e.r[n - 1] = drive == Drive::current ? total - target : e.v[0] - 2.0 * r_int * total - target;
    e.norm = 0.0;
    for (double v : e.r) e.norm = std::max(e.norm, std::abs(v));
}

bool newton(std::span<const FrozenVoltage> cells, double target, Drive drive, double r_int, std::vector<double>& x,
            int max_iter, int& iterations, Evaluation& e) {
    const int n = static_cast<int>(cells.size());
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd rhs(n);
    std::vector<double> trial(n);
    Evaluation et;
    evaluate(cells, x, target, drive, r_int, e);
    double damping = 1.0;
    for (iterations = 0; iterations < max_iter; ++iterations) {
        if (e.norm < 1e-12) return true;
        jac.setZero();
        for (int k = 0; k + 1 < n; ++k) {
            jac(k, k) = -e.g[k];
            jac(k, k + 1) = e.g[k + 1] - 2.0 * r_int;
            for (int z = k + 2; z < n; ++z) jac(k, z) = -2.0 * r_int;
        }
        if (drive == Drive::current) {
            jac.row(n - 1).setOnes();
        } else {
            jac.row(n - 1).setConstant(-2.0 * r_int);
            jac(n - 1, 0) += e.g[0];
        }
        for (int k = 0; k < n; ++k) rhs(k) = -e.r[k];
        const Eigen::VectorXd dx = jac.partialPivLu().solve(rhs);
        bool accepted = false;
        for (int tries = 0; tries < 30; ++tries) {
            for (int k = 0; k < n; ++k) trial[k] = x[k] + damping * dx(k);
            evaluate(cells, trial, target, drive, r_int, et);
            if (std::isfinite(et.norm) && et.norm <= e.norm) {
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) return false;
        x = trial;
        std::swap(e, et);
        damping = std::min(1.0, 2.0 * damping);
        if (e.norm < 1e-12) return true;
    }
    return e.norm < 1e-10;
}

}  // namespace

BranchSolution solve_branch_currents(std::span<const FrozenVoltage> cells, double target, Drive drive,
                                     double r_int, std::span<const double> initial_guess) {
    const std::size_t n = cells.size();
    if (n < 2) throw DomainError("solve_branch_currents: need at least two cells");
    std::vector<double> x(n);
    if (initial_guess.size() == n) {
        std::copy(initial_guess.begin(), initial_guess.end(), x.begin());
    } else {
        std::fill(x.begin(), x.end(), drive == Drive::current ? target / static_cast<double>(n) : 0.0);
    }
    Evaluation e;
    int iterations = 0;
    bool ok = newton(cells, target, drive, r_int, x, 25, iterations, e);
    if (!ok) {
        // retry from the equal split with a longer budget
        std::fill(x.begin(), x.end(), drive == Drive::current ? target / static_cast<double>(n) : 0.0);
        int more = 0;
        ok = newton(cells, target, drive, r_int, x, 100, more, e);
        iterations += more;
    }
    if (!ok) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "branch-current Newton stagnated: residual " << e.norm << ", iterate [";
        for (std::size_t k = 0; k < n; ++k) msg << (k ? ", " : "") << x[k];
        msg << "]";
        throw SolverError(msg.str());
    }
    BranchSolution s;
    s.currents = std::move(x);
    s.v_cell = e.v;
    s.iterations = iterations;
    double total = 0.0;
    for (double v : s.currents) total += v;
    s.i_mod = drive == Drive::current ? target : total;
    s.v_mod = s.v_cell[0] - 2.0 * r_int * s.i_mod;
    s.kcl_residual = std::abs(total - s.i_mod);
    double upstream = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        upstream += s.currents[k];
        const double r = s.v_cell[k + 1] - s.v_cell[k] - 2.0 * r_int * (s.i_mod - upstream);
        s.ladder_residual = std::max(s.ladder_residual, std::abs(r));
    }
    return s;
}

BranchSolution solve_branch_currents(std::span<const CellState> states, std::span<const EspmModel> models,
                                     double i_mod, double r_int) {
    std::vector<FrozenVoltage> frozen;
    frozen.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) frozen.push_back(models[k].frozen(states[k]));
    return solve_branch_currents(frozen, i_mod, Drive::current, r_int);
}

namespace {

/// Trapezoid time average over nodes, last node held to the window end.
class WindowAverage {
public:
    void reset() { *this = WindowAverage{}; }
    void add(double t, double value) {
        if (count_ > 0) integral_ += 0.5 * (last_ + value) * (t - last_t_);
        else t0_ = t;
        last_t_ = t;
        last_ = value;
        ++count_;
    }
    double close(double t_end) const {
        if (count_ == 0 || t_end <= t0_) return count_ ? last_ : 0.0;
        return (integral_ + last_ * (t_end - last_t_)) / (t_end - t0_);
    }

private:
    double integral_ = 0.0;
    double last_ = 0.0;
    double last_t_ = 0.0;
    double t0_ = 0.0;
    long count_ = 0;
};

struct CycleAccum {
    CycleSummary summary;
    WindowAverage sigma_i;
    WindowAverage sigma_t;
    std::vector<WindowAverage> temps;
    bool in_window = false;
};

class Simulator {
public:
    Simulator(const ModuleConfig& cfg, const SimOptions& opt) : cfg_(cfg), opt_(opt), net_(make_network(cfg)) {
        validate(cfg);
        n_ = cfg.n_p;
        models_.reserve(n_);
        for (const auto& c : cfg.cells) models_.emplace_back(c, cfg.numerics);
        for (std::size_t i = 0; i < cfg.protocol.phases.size(); ++i) {
            const auto* cc = std::get_if<CcPhase>(&cfg.protocol.phases[i]);
            if (cc && cc->direction == Direction::discharge) {
                discharge_phase_ = static_cast<int>(i);
                break;
            }
        }
        trace_.n_p = n_;
    }

    SimTrace run() {
        OcpTable::reset_clamp_count();
        state_.cells.clear();
        state_.sei.clear();
        for (int k = 0; k < n_; ++k) {
            state_.cells.push_back(models_[k].initial_state(0.0, cfg_.t_amb));
            state_.sei.push_back(initial_sei(cfg_.cells[k]));
            state_.cells.back().r_sei = state_.sei.back().r_sei;
        }
        state_.i_branch.assign(n_, 0.0);
        std::vector<double> temp_integral(n_, 0.0);
        for (int c = 0; c < cfg_.n_cycles; ++c) {
            state_.cycle_index = c;
            begin_cycle(c);
            for (std::size_t p = 0; p < cfg_.protocol.phases.size(); ++p) {
                state_.phase_index = static_cast<int>(p);
                run_phase(static_cast<int>(p));
            }
            end_cycle();
            const auto& s = trace_.cycles.back();
            for (int k = 0; k < n_; ++k) temp_integral[k] += s.temp_avg[k] * (s.t_end - s.t_start);
        }
        trace_.temp_time_avg.resize(n_);
        for (int k = 0; k < n_; ++k) trace_.temp_time_avg[k] = temp_integral[k] / state_.t;
        for (const auto& s : state_.sei) trace_.sei_lithium_lost.push_back(s.n_li_lost);
        trace_.diag.ocp_clamps = OcpTable::clamp_count();
        return std::move(trace_);
    }

private:
    struct Snapshot {
        ModuleState state;
        CycleAccum accum;
        BranchSolution sol;
        std::size_t recorded = 0;
        double dt = 0.0;
    };

    std::vector<double> temps(const ModuleState& s) const {
        std::vector<double> t(n_);
        for (int k = 0; k < n_; ++k) t[k] = s.cells[k].temperature;
        return t;
    }

    BranchSolution solve(const ModuleState& s, Drive drive, double target) {
        std::vector<FrozenVoltage> frozen;
        frozen.reserve(n_);
        for (int k = 0; k < n_; ++k) frozen.push_back(models_[k].frozen(s.cells[k]));
        try {
            return solve_branch_currents(frozen, target, drive, cfg_.r_int, s.i_branch);
        } catch (const SolverError& e) {
            std::ostringstream msg;
            msg << e.what() << " (cycle " << s.cycle_index + 1 << ", phase " << s.phase_index << ", t = " << s.t
                << " s)";
            throw SolverError(msg.str());
        }
    }

    double advance(ModuleState& s, const BranchSolution& sol, double dt) {
        std::vector<SeiRate> rates(n_);
        for (int k = 0; k < n_; ++k) rates[k] = sei_rate(models_[k], s.cells[k], sol.currents[k]);

        std::vector<CellState> next(n_);
        int halvings = 0;
        for (;;) {
            StepDiagnostics d;
            for (int k = 0; k < n_; ++k)
                next[k] = models_[k].step(s.cells[k], sol.currents[k], dt, rates[k].side_current, &d);
            if (d.clamped == 0 || halvings >= cfg_.numerics.max_halvings) {
                trace_.diag.clamped_entries += d.clamped;
                break;
            }
            dt *= 0.5;
            ++halvings;
            ++trace_.diag.halvings;
        }

        std::vector<double> before(n_), heats(n_);
        for (int k = 0; k < n_; ++k) {
            const auto& c = s.cells[k];
            before[k] = c.temperature;
            heats[k] = cell_heat(sol.currents[k], models_[k].bulk_ocv(c), sol.v_cell[k], c.temperature,
                                 models_[k].bulk_entropic(c));
        }
        const std::vector<double> after = step_temperatures(before, heats, net_, dt);
        double scale = 1.0;
        for (double q : heats) scale = std::max(scale, std::abs(q));
        trace_.diag.max_thermal_residual =
            std::max(trace_.diag.max_thermal_residual,
                     std::abs(thermal_energy_residual(before, after, heats, net_, dt)) / scale);

        for (int k = 0; k < n_; ++k) {
            s.sei[k] = step_sei(s.sei[k], rates[k], dt, cfg_.cells[k]);
            next[k].temperature = after[k];
            next[k].r_sei = s.sei[k].r_sei;
        }
        s.cells = std::move(next);
        s.i_branch = sol.currents;
        s.i_mod = sol.i_mod;
        s.v_mod = sol.v_mod;
        s.t += dt;
        ++trace_.diag.accepted_steps;
        return dt;
    }

    void begin_cycle(int c) {
        accum_ = CycleAccum{};
        accum_.summary.cycle = c + 1;
        accum_.summary.t_start = state_.t;
        accum_.summary.q_branch_ah.assign(n_, 0.0);
        accum_.temps.assign(n_, WindowAverage{});
    }

    void end_cycle() {
        auto& s = accum_.summary;
        s.t_end = state_.t;
        s.temp_avg.resize(n_);
        for (int k = 0; k < n_; ++k) s.temp_avg[k] = accum_.temps[k].close(state_.t);
        s.r_sei_end.resize(n_);
        for (int k = 0; k < n_; ++k) s.r_sei_end[k] = state_.sei[k].r_sei;
        trace_.cycles.push_back(s);
    }

    bool recording() const {
        if (opt_.record_every <= 0) return false;
        if (opt_.record_cycles >= 0 && state_.cycle_index >= opt_.record_cycles) return false;
        return step_counter_ % opt_.record_every == 0;
    }

    /// Sample at the start of a step and accumulate its contribution over dt.
    void accumulate(const ModuleState& at, const BranchSolution& sol, double dt) {
        trace_.diag.max_kcl_residual =
            std::max(trace_.diag.max_kcl_residual, sol.kcl_residual / std::max(1.0, std::abs(sol.i_mod)));
        trace_.diag.max_ladder_residual = std::max(trace_.diag.max_ladder_residual, sol.ladder_residual);
        trace_.diag.max_newton_iterations = std::max(trace_.diag.max_newton_iterations, sol.iterations);

        const std::vector<double> t = temps(at);
        auto& s = accum_.summary;
        s.dtmax = std::max(s.dtmax, spread_of(t));
        for (int k = 0; k < n_; ++k) accum_.temps[k].add(at.t, t[k]);
        if (accum_.in_window) {
            accum_.sigma_i.add(at.t, sample_std(sol.currents, sol.i_mod / n_));
            accum_.sigma_t.add(at.t, sample_std(t, mean_of(t)));
            s.q_mod_ah += sol.i_mod * dt / 3600.0;
            s.e_mod_wh += sol.v_mod * sol.i_mod * dt / 3600.0;
            double e_cells = 0.0;
            double loss = cfg_.r_int * 2.0 * sol.i_mod * sol.i_mod;
            double upstream = 0.0;
            for (int k = 0; k < n_; ++k) {
                e_cells += sol.v_cell[k] * sol.currents[k];
                s.q_branch_ah[k] += sol.currents[k] * dt / 3600.0;
                if (k + 1 < n_) {
                    upstream += sol.currents[k];
                    const double seg = sol.i_mod - upstream;
                    loss += 2.0 * cfg_.r_int * seg * seg;
                }
            }
            s.e_cells_wh += e_cells * dt / 3600.0;
            s.e_ladder_loss_wh += loss * dt / 3600.0;
        }

        if (recording()) {
            trace_.t.push_back(at.t);
            trace_.cycle.push_back(at.cycle_index + 1);
            trace_.phase.push_back(at.phase_index);
            trace_.v_mod.push_back(sol.v_mod);
            trace_.i_mod.push_back(sol.i_mod);
            for (int k = 0; k < n_; ++k) {
                trace_.i_branch.push_back(sol.currents[k]);
                trace_.temp.push_back(t[k]);
                trace_.soc.push_back(at.cells[k].soc);
                trace_.r_sei.push_back(at.cells[k].r_sei);
            }
        }
        ++step_counter_;
    }

    void truncate_samples(std::size_t rows) {
        trace_.t.resize(rows);
        trace_.cycle.resize(rows);
        trace_.phase.resize(rows);
        trace_.v_mod.resize(rows);
        trace_.i_mod.resize(rows);
        trace_.i_branch.resize(rows * n_);
        trace_.temp.resize(rows * n_);
        trace_.soc.resize(rows * n_);
        trace_.r_sei.resize(rows * n_);
    }

    void run_phase(int p) {
        const Phase& phase = cfg_.protocol.phases[p];
        const double i_ref = cfg_.protocol.capacity_ah * n_;
        const auto& num = cfg_.numerics;
        Drive drive = Drive::current;
        double target = 0.0;
        double dt_nominal = num.dt_rest;
        double duration = -1.0;
        std::function<bool(const BranchSolution&)> done;

        if (const auto* cc = std::get_if<CcPhase>(&phase)) {
            const bool charge = cc->direction == Direction::charge;
            target = (charge ? -1.0 : 1.0) * cc->c_rate * i_ref;
            dt_nominal = charge ? num.dt_charge : num.dt_discharge;
            const double cutoff = cc->cutoff_voltage;
            if (charge) done = [cutoff](const BranchSolution& s) { return s.v_mod >= cutoff; };
            else done = [cutoff](const BranchSolution& s) { return s.v_mod <= cutoff; };
        } else if (const auto* cv = std::get_if<CvPhase>(&phase)) {
            drive = Drive::voltage;
            target = cv->voltage;
            dt_nominal = num.dt_cv;
            const double limit = cv->cutoff_current_per_cell * n_;
            done = [limit](const BranchSolution& s) { return std::abs(s.i_mod) < limit; };
        } else {
            duration = std::get<RestPhase>(phase).duration;
        }

        const bool window = p == discharge_phase_;
        if (window) {
            accum_.in_window = true;
            accum_.summary.discharge_t0 = state_.t;
        }
        const double t0 = state_.t;
        bool first = true;
        Snapshot prev;
        for (;;) {
            BranchSolution sol = solve(state_, drive, target);
            if (done && done(sol)) {
                if (!first) locate_event(prev, drive, target, done);
                break;
            }
            double dt = dt_nominal;
            if (duration >= 0.0) {
                const double left = t0 + duration - state_.t;
                if (left <= 1e-9) break;
                dt = std::min(dt, left);
            }
            if (state_.t - t0 > num.max_phase_duration) {
                std::ostringstream msg;
                msg << "phase " << p << " of cycle " << state_.cycle_index + 1 << " did not terminate within "
                    << num.max_phase_duration << " s";
                throw SolverError(msg.str());
            }
            if (done) prev = Snapshot{state_, accum_, sol, trace_.t.size(), 0.0};
            ModuleState next = state_;
            const double used = advance(next, sol, dt);
            accumulate(state_, sol, used);
            state_ = std::move(next);
            if (done) prev.dt = used;
            first = false;
        }
        if (window) {
            accum_.in_window = false;
            auto& s = accum_.summary;
            s.discharge_t1 = state_.t;
            s.sigma_i = accum_.sigma_i.close(state_.t);
            s.sigma_t = accum_.sigma_t.close(state_.t);
            s.soc_eod.resize(n_);
            for (int k = 0; k < n_; ++k) s.soc_eod[k] = state_.cells[k].soc;
        }
    }

    void locate_event(const Snapshot& prev, Drive drive, double target,
                      const std::function<bool(const BranchSolution&)>& done) {
        double lo = 0.0;
        double hi = prev.dt;
        while (hi - lo > cfg_.numerics.event_tolerance) {
            const double mid = 0.5 * (lo + hi);
            ModuleState trial = prev.state;
            const double used = advance(trial, prev.sol, mid);
            --trace_.diag.accepted_steps;
            if (used < mid) {  // clamping forced a shorter step; treat as the new upper bound
                hi = used;
                continue;
            }
            if (done(solve(trial, drive, target))) hi = mid;
            else lo = mid;
        }
        state_ = prev.state;
        accum_ = prev.accum;
        truncate_samples(prev.recorded);
        --step_counter_;
        ModuleState next = state_;
        const double used = advance(next, prev.sol, hi);
        --trace_.diag.accepted_steps;
        accumulate(state_, prev.sol, used);
        state_ = std::move(next);
    }

    const ModuleConfig& cfg_;
    SimOptions opt_;
    ThermalNetwork net_;
    int n_ = 0;
    int discharge_phase_ = -1;
    std::vector<EspmModel> models_;
    ModuleState state_;
    CycleAccum accum_;
    SimTrace trace_;
    long step_counter_ = 0;
};

}  // namespace

SimTrace run_protocol(const ModuleConfig& cfg, const SimOptions& options) {
    return Simulator(cfg, options).run();
}

CycleSummary summarize_samples(const SimTrace& trace, const CycleSummary& summary) {
    CycleSummary out = summary;
    const int n = trace.n_p;
    WindowAverage si, st;
    std::vector<WindowAverage> temps(n);
    out.q_mod_ah = 0.0;
    out.e_mod_wh = 0.0;
    out.dtmax = 0.0;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < trace.rows(); ++r)
        if (trace.cycle[r] == summary.cycle) rows.push_back(r);
    std::vector<double> t(n), cur(n);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const std::size_t r = rows[j];
        for (int k = 0; k < n; ++k) {
            t[k] = trace.temperature(r, k);
            cur[k] = trace.branch(r, k);
            temps[k].add(trace.t[r], t[k]);
        }
        out.dtmax = std::max(out.dtmax, spread_of(t));
        const double time = trace.t[r];
        if (time >= summary.discharge_t0 && time < summary.discharge_t1) {
            const double next = (j + 1 < rows.size()) ? std::min(trace.t[rows[j + 1]], summary.discharge_t1)
                                                      : summary.discharge_t1;
            si.add(time, sample_std(cur, trace.i_mod[r] / n));
            st.add(time, sample_std(t, mean_of(t)));
            out.q_mod_ah += trace.i_mod[r] * (next - time) / 3600.0;
            out.e_mod_wh += trace.v_mod[r] * trace.i_mod[r] * (next - time) / 3600.0;
        }
    }
    out.sigma_i = si.close(summary.discharge_t1);
    out.sigma_t = st.close(summary.discharge_t1);
    for (int k = 0; k < n; ++k) out.temp_avg[k] = temps[k].close(summary.t_end);
    return out;
}

namespace {

double interp(const std::vector<double>& t, const SimTrace& tr, int k, bool current, double x) {
    auto it = std::lower_bound(t.begin(), t.end(), x);
    std::size_t i = static_cast<std::size_t>(it - t.begin());
    auto val = [&](std::size_t r) { return current ? tr.branch(r, k) : tr.temperature(r, k); };
    if (i < t.size() && t[i] == x) return val(i);
    if (i == 0) return val(0);
    if (i >= t.size()) return val(t.size() - 1);
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * val(i - 1) + w * val(i);
}

std::vector<double> mse_channel(const SimTrace& a, const SimTrace& b, bool current) {
    if (a.n_p != b.n_p) throw DomainError("mse: traces have different cell counts");
    if (a.rows() == 0 || b.rows() == 0) throw DomainError("mse: empty trace");
    const double lo = std::max(a.t.front(), b.t.front());
    const double hi = std::min(a.t.back(), b.t.back());
    if (lo > hi) throw DomainError("mse: traces do not overlap in time");
    // union of both grids inside the overlap keeps the metric symmetric
    std::vector<double> grid;
    for (double x : a.t)
        if (x >= lo && x <= hi) grid.push_back(x);
    for (double x : b.t)
        if (x >= lo && x <= hi) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> out(a.n_p, 0.0);
    for (int k = 0; k < a.n_p; ++k) {
        double s = 0.0;
        for (double x : grid) {
            const double d = interp(a.t, a, k, current, x) - interp(b.t, b, k, current, x);
            s += d * d;
        }
        out[k] = s / static_cast<double>(grid.size());
    }
    return out;
}

}  // namespace

std::vector<double> mse_current(const SimTrace& a, const SimTrace& b) { return mse_channel(a, b, true); }
std::vector<double> mse_temperature(const SimTrace& a, const SimTrace& b) { return mse_channel(a, b, false); }

}  // namespace parapack
