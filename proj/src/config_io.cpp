#include "parapack/config_io.hpp"

#include <json.hpp>
#include <set>

#include "parapack/error.hpp"
#include "parapack/table.hpp"

namespace parapack {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "parapack-module/1";

struct Field {
    const char* name;
    double CellParameters::*member;
};

constexpr Field kCellFields[] = {
    {"eps_s_n", &CellParameters::eps_s_n},       {"eps_s_p", &CellParameters::eps_s_p},
    {"eps_e_n", &CellParameters::eps_e_n},       {"eps_e_sep", &CellParameters::eps_e_sep},
    {"eps_e_p", &CellParameters::eps_e_p},       {"bruggeman", &CellParameters::bruggeman},
    {"l_n", &CellParameters::l_n},               {"l_sep", &CellParameters::l_sep},
    {"l_p", &CellParameters::l_p},               {"r_n", &CellParameters::r_n},
    {"r_p", &CellParameters::r_p},               {"area", &CellParameters::area},
    {"d_s_n", &CellParameters::d_s_n},           {"d_s_p", &CellParameters::d_s_p},
    {"d_e", &CellParameters::d_e},               {"kappa_e", &CellParameters::kappa_e},
    {"t_plus", &CellParameters::t_plus},         {"c_e0", &CellParameters::c_e0},
    {"c_max_n", &CellParameters::c_max_n},       {"c_max_p", &CellParameters::c_max_p},
    {"k_n", &CellParameters::k_n},               {"k_p", &CellParameters::k_p},
    {"r_cell", &CellParameters::r_cell},         {"t_ref", &CellParameters::t_ref},
    {"ea_d_s_n", &CellParameters::ea_d_s_n},     {"ea_d_s_p", &CellParameters::ea_d_s_p},
    {"ea_k_n", &CellParameters::ea_k_n},         {"ea_k_p", &CellParameters::ea_k_p},
    {"theta_n_0", &CellParameters::theta_n_0},   {"theta_n_100", &CellParameters::theta_n_100},
    {"theta_p_0", &CellParameters::theta_p_0},   {"theta_p_100", &CellParameters::theta_p_100},
    {"heat_capacity", &CellParameters::heat_capacity}, {"r_u", &CellParameters::r_u},
    {"diameter", &CellParameters::diameter},     {"height", &CellParameters::height},
    {"tab_area", &CellParameters::tab_area},
};

struct SeiField {
    const char* name;
    double SeiParameters::*member;
};

constexpr SeiField kSeiFields[] = {
    {"i0", &SeiParameters::i0},
    {"alpha", &SeiParameters::alpha},
    {"u_ref", &SeiParameters::u_ref},
    {"molar_mass", &SeiParameters::molar_mass},
    {"density", &SeiParameters::density},
    {"conductivity", &SeiParameters::conductivity},
    {"activation_energy", &SeiParameters::activation_energy},
    {"initial_thickness", &SeiParameters::initial_thickness},
};

const OcpTable& builtin_graphite() {
    static const OcpTable t = lg_m50_graphite_ocp();
    return t;
}
const OcpTable& builtin_nmc() {
    static const OcpTable t = lg_m50_nmc811_ocp();
    return t;
}

json ocp_to_json(const OcpTable& t) {
    if (t == builtin_graphite()) return "lg_m50_graphite";
    if (t == builtin_nmc()) return "lg_m50_nmc811";
    return json{{"stoichiometry", t.stoichiometry()},
                {"potential", t.potentials()},
                {"entropic", t.entropic_coefficients()}};
}

json cell_json(const CellParameters& c) {
    json j = json::object();
    for (const auto& f : kCellFields) j[f.name] = c.*f.member;
    j["ocp_n"] = ocp_to_json(c.ocp_n);
    j["ocp_p"] = ocp_to_json(c.ocp_p);
    json s = json::object();
    for (const auto& f : kSeiFields) s[f.name] = c.sei.*f.member;
    j["sei"] = s;
    return j;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(join(path, it.key()), "unknown field");
}

const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(join(path, key), "missing field");
    return j.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "must be a number");
    return j.get<double>();
}

long long integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path, "must be an integer");
    return j.get<long long>();
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

OcpTable ocp_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "lg_m50_graphite") return builtin_graphite();
        if (name == "lg_m50_nmc811") return builtin_nmc();
        throw ConfigError(path, "unknown built-in table '" + name + "'");
    }
    if (!j.is_object()) throw ConfigError(path, "must be a built-in table name or an object");
    reject_unknown(j, path, {"stoichiometry", "potential", "entropic"});
    try {
        return OcpTable(number_array(member(j, path, "stoichiometry"), path + ".stoichiometry"),
                        number_array(member(j, path, "potential"), path + ".potential"),
                        number_array(member(j, path, "entropic"), path + ".entropic"));
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

/// Fields absent from `j` are taken from `base` when given, otherwise they are errors.
CellParameters cell_from_json(const json& j, const std::string& path, const CellParameters* base) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    std::set<std::string> allowed{"ocp_n", "ocp_p", "sei"};
    for (const auto& f : kCellFields) allowed.insert(f.name);
    reject_unknown(j, path, allowed);
    CellParameters c = base ? *base : CellParameters{};
    for (const auto& f : kCellFields) {
        if (j.contains(f.name)) c.*f.member = number(j.at(f.name), join(path, f.name));
        else if (!base) throw ConfigError(join(path, f.name), "missing field");
    }
    for (const char* key : {"ocp_n", "ocp_p"}) {
        OcpTable& t = std::string(key) == "ocp_n" ? c.ocp_n : c.ocp_p;
        if (j.contains(key)) t = ocp_from_json(j.at(key), join(path, key));
        else if (!base) throw ConfigError(join(path, key), "missing field");
    }
    const std::string sp = join(path, "sei");
    if (j.contains("sei")) {
        const json& s = j.at("sei");
        if (!s.is_object()) throw ConfigError(sp, "must be an object");
        std::set<std::string> sa;
        for (const auto& f : kSeiFields) sa.insert(f.name);
        reject_unknown(s, sp, sa);
        for (const auto& f : kSeiFields) {
            if (s.contains(f.name)) c.sei.*f.member = number(s.at(f.name), join(sp, f.name));
            else if (!base) throw ConfigError(join(sp, f.name), "missing field");
        }
    } else if (!base) {
        throw ConfigError(sp, "missing field");
    }
    return c;
}

json phase_to_json(const Phase& p) {
    if (const auto* cc = std::get_if<CcPhase>(&p))
        return {{"type", "cc"},
                {"direction", cc->direction == Direction::charge ? "charge" : "discharge"},
                {"c_rate", cc->c_rate},
                {"cutoff_voltage", cc->cutoff_voltage}};
    if (const auto* cv = std::get_if<CvPhase>(&p))
        return {{"type", "cv"}, {"voltage", cv->voltage}, {"cutoff_current_per_cell", cv->cutoff_current_per_cell}};
    return {{"type", "rest"}, {"duration", std::get<RestPhase>(p).duration}};
}

Phase phase_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    const json& type = member(j, path, "type");
    const std::string t = type.is_string() ? type.get<std::string>() : "";
    if (t == "cc") {
        reject_unknown(j, path, {"type", "direction", "c_rate", "cutoff_voltage"});
        CcPhase p;
        const json& d = member(j, path, "direction");
        const std::string dir = d.is_string() ? d.get<std::string>() : "";
        if (dir != "charge" && dir != "discharge") throw ConfigError(path + ".direction", "must be charge or discharge");
        p.direction = dir == "charge" ? Direction::charge : Direction::discharge;
        p.c_rate = number(member(j, path, "c_rate"), path + ".c_rate");
        p.cutoff_voltage = number(member(j, path, "cutoff_voltage"), path + ".cutoff_voltage");
        return p;
    }
    if (t == "cv") {
        reject_unknown(j, path, {"type", "voltage", "cutoff_current_per_cell"});
        CvPhase p;
        p.voltage = number(member(j, path, "voltage"), path + ".voltage");
        p.cutoff_current_per_cell =
            number(member(j, path, "cutoff_current_per_cell"), path + ".cutoff_current_per_cell");
        return p;
    }
    if (t == "rest") {
        reject_unknown(j, path, {"type", "duration"});
        return RestPhase{number(member(j, path, "duration"), path + ".duration")};
    }
    throw ConfigError(path + ".type", "must be cc, cv or rest");
}

json numerics_to_json(const NumericsSettings& n) {
    return {{"n_r", n.n_r},
            {"n_x_n", n.n_x_n},
            {"n_x_sep", n.n_x_sep},
            {"n_x_p", n.n_x_p},
            {"dt_charge", n.dt_charge},
            {"dt_cv", n.dt_cv},
            {"dt_discharge", n.dt_discharge},
            {"dt_rest", n.dt_rest},
            {"event_tolerance", n.event_tolerance},
            {"max_halvings", n.max_halvings},
            {"max_phase_duration", n.max_phase_duration}};
}

NumericsSettings numerics_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "must be an object");
    NumericsSettings n;
    reject_unknown(j, path,
                   {"n_r", "n_x_n", "n_x_sep", "n_x_p", "dt_charge", "dt_cv", "dt_discharge", "dt_rest",
                    "event_tolerance", "max_halvings", "max_phase_duration"});
    auto ints = {std::pair{"n_r", &n.n_r}, {"n_x_n", &n.n_x_n}, {"n_x_sep", &n.n_x_sep}, {"n_x_p", &n.n_x_p},
                 {"max_halvings", &n.max_halvings}};
    for (auto [k, m] : ints)
        if (j.contains(k)) *m = static_cast<int>(integer(j.at(k), join(path, k)));
    auto dbls = {std::pair{"dt_charge", &n.dt_charge}, {"dt_cv", &n.dt_cv}, {"dt_discharge", &n.dt_discharge},
                 {"dt_rest", &n.dt_rest}, {"event_tolerance", &n.event_tolerance},
                 {"max_phase_duration", &n.max_phase_duration}};
    for (auto [k, m] : dbls)
        if (j.contains(k)) *m = number(j.at(k), join(path, k));
    return n;
}

}  // namespace

std::string cell_to_json(const CellParameters& cell) { return cell_json(cell).dump(2); }

std::string config_to_json(const ModuleConfig& cfg) {
    json j;
    j["format"] = kFormat;
    j["n_p"] = cfg.n_p;
    j["r_int"] = cfg.r_int;
    j["spacing"] = cfg.spacing;
    j["t_amb"] = cfg.t_amb;
    j["n_cycles"] = cfg.n_cycles;
    j["seed"] = cfg.seed;
    j["coupling"] = {{"k_air", cfg.coupling.k_air}, {"k_tabs", cfg.coupling.k_tabs}};
    j["numerics"] = numerics_to_json(cfg.numerics);
    json phases = json::array();
    for (const auto& p : cfg.protocol.phases) phases.push_back(phase_to_json(p));
    j["protocol"] = {{"capacity_ah", cfg.protocol.capacity_ah}, {"phases", phases}};
    const json nominal = cell_json(cfg.nominal);
    j["nominal"] = nominal;
    json cells = json::array();
    for (const auto& c : cfg.cells) {
        // only what differs from the nominal cell
        const json full = cell_json(c);
        json diff = json::object();
        for (auto it = full.begin(); it != full.end(); ++it) {
            if (it.key() == "sei") {
                json sd = json::object();
                for (auto s = it->begin(); s != it->end(); ++s)
                    if (*s != nominal["sei"][s.key()]) sd[s.key()] = *s;
                if (!sd.empty()) diff["sei"] = sd;
            } else if (*it != nominal[it.key()]) {
                diff[it.key()] = *it;
            }
        }
        cells.push_back(diff);
    }
    j["cells"] = cells;
    return j.dump(2) + "\n";
}

ModuleConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("", "top level must be an object");
    reject_unknown(j, "", {"format", "n_p", "r_int", "spacing", "t_amb", "n_cycles", "seed", "coupling", "numerics",
                           "protocol", "nominal", "cells"});
    if (j.contains("format") && j.at("format") != kFormat)
        throw ConfigError("format", std::string("expected '") + kFormat + "'");
    ModuleConfig cfg;
    cfg.n_p = static_cast<int>(integer(member(j, "", "n_p"), "n_p"));
    cfg.r_int = number(member(j, "", "r_int"), "r_int");
    cfg.spacing = number(member(j, "", "spacing"), "spacing");
    cfg.t_amb = number(member(j, "", "t_amb"), "t_amb");
    cfg.n_cycles = static_cast<int>(integer(member(j, "", "n_cycles"), "n_cycles"));
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("seed", "must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (j.contains("coupling")) {
        const json& c = j.at("coupling");
        if (!c.is_object()) throw ConfigError("coupling", "must be an object");
        reject_unknown(c, "coupling", {"k_air", "k_tabs"});
        if (c.contains("k_air")) cfg.coupling.k_air = number(c.at("k_air"), "coupling.k_air");
        if (c.contains("k_tabs")) cfg.coupling.k_tabs = number(c.at("k_tabs"), "coupling.k_tabs");
    }
    if (j.contains("numerics")) cfg.numerics = numerics_from_json(j.at("numerics"), "numerics");
    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        if (!p.is_object()) throw ConfigError("protocol", "must be an object");
        reject_unknown(p, "protocol", {"capacity_ah", "phases"});
        if (p.contains("capacity_ah")) cfg.protocol.capacity_ah = number(p.at("capacity_ah"), "protocol.capacity_ah");
        if (p.contains("phases")) {
            const json& ph = p.at("phases");
            if (!ph.is_array()) throw ConfigError("protocol.phases", "must be an array");
            cfg.protocol.phases.clear();
            for (std::size_t i = 0; i < ph.size(); ++i)
                cfg.protocol.phases.push_back(phase_from_json(ph[i], "protocol.phases[" + std::to_string(i) + "]"));
        }
    }

    const json& nominal = member(j, "", "nominal");
    if (nominal.is_object() && nominal.contains("preset")) {
        const json& pr = nominal.at("preset");
        if (pr != "lg_m50_like") throw ConfigError("nominal.preset", "only 'lg_m50_like' is available");
        json rest = nominal;
        rest.erase("preset");
        double q = 4.85;
        if (rest.contains("preset_capacity_ah")) {
            q = number(rest.at("preset_capacity_ah"), "nominal.preset_capacity_ah");
            if (!(q > 0.0)) throw ConfigError("nominal.preset_capacity_ah", "must be > 0");
            rest.erase("preset_capacity_ah");
        }
        const CellParameters base = lg_m50_like(q);
        cfg.nominal = cell_from_json(rest, "nominal", &base);
    } else {
        cfg.nominal = cell_from_json(nominal, "nominal", nullptr);
    }
    const json& cells = member(j, "", "cells");
    if (!cells.is_array()) throw ConfigError("cells", "must be an array");
    for (std::size_t i = 0; i < cells.size(); ++i)
        cfg.cells.push_back(cell_from_json(cells[i], "cells[" + std::to_string(i) + "]", &cfg.nominal));
    validate(cfg);
    return cfg;
}

ModuleConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError("", e.what());
    }
    return config_from_json(text);
}

void save_config(const ModuleConfig& cfg, const std::filesystem::path& path) {
    write_file_atomic(path, config_to_json(cfg));
}

}  // namespace parapack
