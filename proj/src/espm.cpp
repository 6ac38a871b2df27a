#include "parapack/espm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parapack/error.hpp"
#include "parapack/tridiag.hpp"

namespace parapack {

VoltageBreakdown FrozenVoltage::breakdown(double current) const {
    VoltageBreakdown b;
    const double th_n = theta_n0 + dtheta_n * current;
    const double th_p = theta_p0 + dtheta_p * current;
    b.u_n = ocp_n->potential(th_n) + dtemp * ocp_n->entropic(th_n);
    b.u_p = ocp_p->potential(th_p) + dtemp * ocp_p->entropic(th_p);
    b.eta_n = vt * std::asinh(current / a_n);
    b.eta_p = -vt * std::asinh(current / a_p);
    b.dphi_e = dphi_conc - current * r_electrolyte;
    b.ohmic = current * r_ohmic;
    b.v_cell = b.u_p + b.eta_p - b.u_n - b.eta_n + b.dphi_e - b.ohmic;
    return b;
}

double FrozenVoltage::slope(double current) const {
    const double th_n = theta_n0 + dtheta_n * current;
    const double th_p = theta_p0 + dtheta_p * current;
    const double du_n = (ocp_n->potential_slope(th_n) + dtemp * ocp_n->entropic_slope(th_n)) * dtheta_n;
    const double du_p = (ocp_p->potential_slope(th_p) + dtemp * ocp_p->entropic_slope(th_p)) * dtheta_p;
    return du_p - du_n - vt / std::sqrt(a_n * a_n + current * current) -
           vt / std::sqrt(a_p * a_p + current * current) - r_electrolyte - r_ohmic;
}

EspmModel::EspmModel(const CellParameters& params, const NumericsSettings& numerics)
    : p_(params), n_r_(numerics.n_r), n_x_n_(numerics.n_x_n), n_x_p_(numerics.n_x_p) {
    const double h = 1.0 / n_r_;
    shell_volume_.resize(n_r_);
    face_area_.resize(n_r_ + 1);
    for (int i = 0; i <= n_r_; ++i) face_area_[i] = (i * h) * (i * h);
    for (int i = 0; i < n_r_; ++i) {
        const double a = i * h;
        const double b = (i + 1) * h;
        shell_volume_[i] = (b * b * b - a * a * a) / 3.0;
    }

    const int n_x = numerics.n_x_n + numerics.n_x_sep + numerics.n_x_p;
    dx_.resize(n_x);
    eps_e_.resize(n_x);
    source_weight_.assign(n_x, 0.0);
    std::vector<double> d_eff(n_x);
    for (int i = 0; i < n_x; ++i) {
        if (i < n_x_n_) {
            dx_[i] = p_.l_n / n_x_n_;
            eps_e_[i] = p_.eps_e_n;
            source_weight_[i] = 1.0 / p_.l_n;
        } else if (i < n_x_n_ + numerics.n_x_sep) {
            dx_[i] = p_.l_sep / numerics.n_x_sep;
            eps_e_[i] = p_.eps_e_sep;
        } else {
            dx_[i] = p_.l_p / n_x_p_;
            eps_e_[i] = p_.eps_e_p;
            source_weight_[i] = -1.0 / p_.l_p;
        }
        d_eff[i] = p_.d_e * std::pow(eps_e_[i], p_.bruggeman);
    }
    face_conductance_.resize(n_x - 1);
    for (int i = 0; i + 1 < n_x; ++i)
        face_conductance_[i] = 1.0 / (0.5 * dx_[i] / d_eff[i] + 0.5 * dx_[i + 1] / d_eff[i + 1]);
}

double EspmModel::arrhenius(double ea, double temperature) const {
    return std::exp(-ea / kGasConstant * (1.0 / temperature - 1.0 / p_.t_ref));
}

CellState EspmModel::initial_state(double soc, double temperature) const {
    CellState s;
    const double theta_n = p_.theta_n_0 + soc * (p_.theta_n_100 - p_.theta_n_0);
    const double theta_p = p_.theta_p_0 + soc * (p_.theta_p_100 - p_.theta_p_0);
    s.c_s_n.assign(n_r_, theta_n * p_.c_max_n);
    s.c_s_p.assign(n_r_, theta_p * p_.c_max_p);
    s.c_e.assign(dx_.size(), p_.c_e0);
    s.temperature = temperature;
    s.r_sei = p_.sei.initial_thickness / (p_.sei.conductivity * specific_area_n() * p_.l_n * p_.area);
    s.soc = this->soc(s);
    return s;
}

void EspmModel::diffuse_particle(std::vector<double>& c, double diffusivity, double radius, double out_flux,
                                 double dt) const {
    const int n = n_r_;
    const double g = dt * diffusivity / (radius * radius) * n;  // D dt / (R^2 dx), dx = 1/n
    double lower[64], diag[64], upper[64], scratch[64];
    std::vector<double> heap;
    double* lo = lower;
    double* di = diag;
    double* up = upper;
    double* sc = scratch;
    if (n > 64) {
        heap.resize(4 * static_cast<std::size_t>(n));
        lo = heap.data();
        di = lo + n;
        up = di + n;
        sc = up + n;
    }
    for (int i = 0; i < n; ++i) {
        const double w_in = face_area_[i];
        const double w_out = (i + 1 < n) ? face_area_[i + 1] : 0.0;
        lo[i] = -g * w_in;
        up[i] = -g * w_out;
        di[i] = shell_volume_[i] + g * (w_in + w_out);
        c[i] *= shell_volume_[i];
    }
    c[n - 1] -= dt * out_flux / radius;
    detail::solve_tridiagonal({lo, static_cast<std::size_t>(n)}, {di, static_cast<std::size_t>(n)},
                              {up, static_cast<std::size_t>(n)}, {c.data(), c.size()},
                              {sc, static_cast<std::size_t>(n)});
}

double EspmModel::surface_from(const std::vector<double>& c, double diffusivity, double radius,
                               double out_flux) const {
    // linear extrapolation from the outer shell centre using the imposed surface flux
    const double half = 0.5 * radius / n_r_;
    return c.back() - out_flux * half / diffusivity;
}

CellState EspmModel::step(const CellState& state, double current, double dt, double side_current,
                          StepDiagnostics* diag) const {
    if (!(dt > 0.0)) throw DomainError("EspmModel::step: dt must be > 0");
    CellState next = state;
    const double t = state.temperature;
    const double flux_n = (current + side_current) / (kFaraday * specific_area_n() * p_.l_n * p_.area);
    const double flux_p = -current / (kFaraday * specific_area_p() * p_.l_p * p_.area);
    diffuse_particle(next.c_s_n, p_.d_s_n * arrhenius(p_.ea_d_s_n, t), p_.r_n, flux_n, dt);
    diffuse_particle(next.c_s_p, p_.d_s_p * arrhenius(p_.ea_d_s_p, t), p_.r_p, flux_p, dt);

    const std::size_t n_x = dx_.size();
    std::vector<double> lo(n_x), di(n_x), up(n_x), sc(n_x);
    const double src = (1.0 - p_.t_plus) * current / (kFaraday * p_.area);
    for (std::size_t i = 0; i < n_x; ++i) {
        const double g_in = i > 0 ? dt * face_conductance_[i - 1] : 0.0;
        const double g_out = i + 1 < n_x ? dt * face_conductance_[i] : 0.0;
        lo[i] = -g_in;
        up[i] = -g_out;
        di[i] = eps_e_[i] * dx_[i] + g_in + g_out;
        next.c_e[i] = eps_e_[i] * dx_[i] * next.c_e[i] + dt * src * source_weight_[i] * dx_[i];
    }
    detail::solve_tridiagonal(lo, di, up, next.c_e, sc);

    int clamped = 0;
    auto clamp_into = [&clamped](std::vector<double>& c, double hi) {
        for (double& v : c) {
            if (v < 0.0) {
                v = 0.0;
                ++clamped;
            } else if (v > hi) {
                v = hi;
                ++clamped;
            }
        }
    };
    clamp_into(next.c_s_n, p_.c_max_n);
    clamp_into(next.c_s_p, p_.c_max_p);
    for (double& v : next.c_e) {
        if (v <= 0.0) {
            v = 1e-6 * p_.c_e0;
            ++clamped;
        }
    }
    if (diag) diag->clamped += clamped;
    next.soc = soc(next);
    return next;
}

double EspmModel::surface_stoichiometry_n(const CellState& s, double current, double side_current) const {
    const double d = p_.d_s_n * arrhenius(p_.ea_d_s_n, s.temperature);
    const double flux = (current + side_current) / (kFaraday * specific_area_n() * p_.l_n * p_.area);
    return surface_from(s.c_s_n, d, p_.r_n, flux) / p_.c_max_n;
}

double EspmModel::surface_stoichiometry_p(const CellState& s, double current) const {
    const double d = p_.d_s_p * arrhenius(p_.ea_d_s_p, s.temperature);
    const double flux = -current / (kFaraday * specific_area_p() * p_.l_p * p_.area);
    return surface_from(s.c_s_p, d, p_.r_p, flux) / p_.c_max_p;
}

FrozenVoltage EspmModel::frozen(const CellState& s, double side_current) const {
    FrozenVoltage f;
    const double t = s.temperature;
    f.ocp_n = &p_.ocp_n;
    f.ocp_p = &p_.ocp_p;
    f.dtemp = t - p_.t_ref;

    // theta_surf = c_outer/c_max -/+ flux * (dr/2) / (D c_max), flux linear in the current
    const double half_n = 0.5 * p_.r_n / n_r_;
    const double half_p = 0.5 * p_.r_p / n_r_;
    const double d_n = p_.d_s_n * arrhenius(p_.ea_d_s_n, t);
    const double d_p = p_.d_s_p * arrhenius(p_.ea_d_s_p, t);
    const double per_amp_n = 1.0 / (kFaraday * specific_area_n() * p_.l_n * p_.area);
    const double per_amp_p = 1.0 / (kFaraday * specific_area_p() * p_.l_p * p_.area);
    f.dtheta_n = -per_amp_n * half_n / (d_n * p_.c_max_n);
    f.theta_n0 = s.c_s_n.back() / p_.c_max_n + f.dtheta_n * side_current;
    f.dtheta_p = per_amp_p * half_p / (d_p * p_.c_max_p);
    f.theta_p0 = s.c_s_p.back() / p_.c_max_p;

    double ce_n = 0.0;
    double ce_p = 0.0;
    double len_n = 0.0;
    double len_p = 0.0;
    const std::size_t n_x = dx_.size();
    for (std::size_t i = 0; i < static_cast<std::size_t>(n_x_n_); ++i) {
        ce_n += s.c_e[i] * dx_[i];
        len_n += dx_[i];
    }
    for (std::size_t i = n_x - n_x_p_; i < n_x; ++i) {
        ce_p += s.c_e[i] * dx_[i];
        len_p += dx_[i];
    }
    ce_n /= len_n;
    ce_p /= len_p;

    // exchange currents at the outer-shell concentration
    const double cs_n = std::clamp(s.c_s_n.back(), 1e-6 * p_.c_max_n, (1.0 - 1e-6) * p_.c_max_n);
    const double cs_p = std::clamp(s.c_s_p.back(), 1e-6 * p_.c_max_p, (1.0 - 1e-6) * p_.c_max_p);
    f.vt = 2.0 * kGasConstant * t / kFaraday;
    const double i0_n = p_.k_n * arrhenius(p_.ea_k_n, t) * kFaraday * std::sqrt(ce_n * cs_n * (p_.c_max_n - cs_n));
    const double i0_p = p_.k_p * arrhenius(p_.ea_k_p, t) * kFaraday * std::sqrt(ce_p * cs_p * (p_.c_max_p - cs_p));
    f.a_n = 2.0 * specific_area_n() * p_.l_n * p_.area * i0_n;
    f.a_p = 2.0 * specific_area_p() * p_.l_p * p_.area * i0_p;

    f.dphi_conc = f.vt * (1.0 - p_.t_plus) * std::log(s.c_e.back() / s.c_e.front());
    const double kn = p_.kappa_e * std::pow(p_.eps_e_n, p_.bruggeman);
    const double ks = p_.kappa_e * std::pow(p_.eps_e_sep, p_.bruggeman);
    const double kp = p_.kappa_e * std::pow(p_.eps_e_p, p_.bruggeman);
    f.r_electrolyte = (0.5 * p_.l_n / kn + p_.l_sep / ks + 0.5 * p_.l_p / kp) / p_.area;
    f.r_ohmic = p_.r_cell + s.r_sei;
    return f;
}

double EspmModel::mean_stoichiometry_n(const CellState& s) const {
    return 3.0 * std::inner_product(shell_volume_.begin(), shell_volume_.end(), s.c_s_n.begin(), 0.0) / p_.c_max_n;
}

double EspmModel::mean_stoichiometry_p(const CellState& s) const {
    return 3.0 * std::inner_product(shell_volume_.begin(), shell_volume_.end(), s.c_s_p.begin(), 0.0) / p_.c_max_p;
}

double EspmModel::soc(const CellState& s) const {
    return (mean_stoichiometry_n(s) - p_.theta_n_0) / (p_.theta_n_100 - p_.theta_n_0);
}

double EspmModel::bulk_ocv(const CellState& s) const {
    const double th_n = mean_stoichiometry_n(s);
    const double th_p = mean_stoichiometry_p(s);
    const double dt_ref = s.temperature - p_.t_ref;
    return p_.ocp_p.potential(th_p) + dt_ref * p_.ocp_p.entropic(th_p) - p_.ocp_n.potential(th_n) -
           dt_ref * p_.ocp_n.entropic(th_n);
}

double EspmModel::bulk_entropic(const CellState& s) const {
    return p_.ocp_p.entropic(mean_stoichiometry_p(s)) - p_.ocp_n.entropic(mean_stoichiometry_n(s));
}

double EspmModel::lithium_n(const CellState& s) const {
    return mean_stoichiometry_n(s) * p_.c_max_n * p_.eps_s_n * p_.l_n * p_.area;
}

double EspmModel::lithium_p(const CellState& s) const {
    return mean_stoichiometry_p(s) * p_.c_max_p * p_.eps_s_p * p_.l_p * p_.area;
}

double EspmModel::lithium_electrolyte(const CellState& s) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < dx_.size(); ++i) sum += eps_e_[i] * dx_[i] * s.c_e[i];
    return sum * p_.area;
}

namespace {
NumericsSettings grid_of(const CellState& s, NumericsSettings n) {
    n.n_r = static_cast<int>(s.c_s_n.size());
    if (static_cast<int>(s.c_e.size()) != n.n_x_n + n.n_x_sep + n.n_x_p)
        throw DomainError("cell state electrolyte grid does not match the numerics settings");
    return n;
}
}  // namespace

CellState step_cell(const CellState& state, double i_cell, double dt, const CellParameters& params,
                    const NumericsSettings& numerics) {
    return EspmModel(params, grid_of(state, numerics)).step(state, i_cell, dt);
}

VoltageBreakdown cell_voltage(const CellState& state, double i_cell, const CellParameters& params,
                              const NumericsSettings& numerics) {
    return EspmModel(params, grid_of(state, numerics)).voltage(state, i_cell);
}

double soc_of(const CellState& state, const CellParameters& params, const NumericsSettings& numerics) {
    return EspmModel(params, grid_of(state, numerics)).soc(state);
}

}  // namespace parapack
