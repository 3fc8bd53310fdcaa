#include "driven/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace driven {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as a number");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int x = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "' as an integer");
    }
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected on/off, got '" + value + "'");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

enum class KeyKind { real, integer, flag, text };

struct KeyEntry {
    KeyKind kind;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<std::pair<std::string, KeyEntry>>& key_table() {
    static const std::vector<std::pair<std::string, KeyEntry>> table = [] {
        std::vector<std::pair<std::string, KeyEntry>> t;
        auto real = [&t](const std::string& name, double RunConfig::* field) {
            t.push_back({name, {KeyKind::real,
                                [field](RunConfig& c, const std::string& k, const std::string& v) {
                                    c.*field = parse_double(k, v);
                                },
                                [field](const RunConfig& c) { return format_double(c.*field); }}});
        };
        auto integer = [&t](const std::string& name, int RunConfig::* field) {
            t.push_back({name, {KeyKind::integer,
                                [field](RunConfig& c, const std::string& k, const std::string& v) {
                                    c.*field = parse_int(k, v);
                                },
                                [field](const RunConfig& c) { return std::to_string(c.*field); }}});
        };
        auto flag = [&t](const std::string& name, bool RunConfig::* field) {
            t.push_back({name, {KeyKind::flag,
                                [field](RunConfig& c, const std::string& k, const std::string& v) {
                                    c.*field = parse_flag(k, v);
                                },
                                [field](const RunConfig& c) { return (c.*field) ? "on" : "off"; }}});
        };
        auto text = [&t](const std::string& name, std::string RunConfig::* field) {
            t.push_back({name, {KeyKind::text,
                                [field](RunConfig& c, const std::string&, const std::string& v) {
                                    c.*field = v;
                                },
                                [field](const RunConfig& c) { return c.*field; }}});
        };
        real("lambda_Omega", &RunConfig::lambda_Omega);
        real("lambda_omega", &RunConfig::lambda_omega);
        real("a", &RunConfig::a);
        real("wc_over_omega0", &RunConfig::wc_over_omega0);
        real("TB_over_omega0", &RunConfig::TB_over_omega0);
        text("initial_state", &RunConfig::initial_state);
        real("TS_over_omega0", &RunConfig::TS_over_omega0);
        real("bloch_x", &RunConfig::bloch_x);
        real("bloch_y", &RunConfig::bloch_y);
        real("bloch_z", &RunConfig::bloch_z);
        text("engine", &RunConfig::engine);
        flag("lamb_shift", &RunConfig::lamb_shift);
        text("picture", &RunConfig::picture);
        real("t_end_over_ts", &RunConfig::t_end_over_ts);
        real("dt_over_ts", &RunConfig::dt_over_ts);
        integer("store_stride", &RunConfig::store_stride);
        real("pv_epsilon", &RunConfig::pv_epsilon);
        real("quad_rel_tol", &RunConfig::quad_rel_tol);
        integer("quad_max_panels", &RunConfig::quad_max_panels);
        real("tail_cutoff_factor", &RunConfig::tail_cutoff_factor);
        integer("tn_modes", &RunConfig::tn_modes);
        real("tn_wmax_over_omega0", &RunConfig::tn_wmax_over_omega0);
        real("tn_dt_over_ts", &RunConfig::tn_dt_over_ts);
        real("tn_svd_cutoff", &RunConfig::tn_svd_cutoff);
        integer("tn_chi_max", &RunConfig::tn_chi_max);
        real("tn_occupancy_cutoff", &RunConfig::tn_occupancy_cutoff);
        real("tn_gibbs_weight_tol", &RunConfig::tn_gibbs_weight_tol);
        integer("workers", &RunConfig::workers);
        return t;
    }();
    return table;
}

const KeyEntry* find_key(const std::string& key) {
    for (const auto& [name, entry] : key_table())
        if (name == key) return &entry;
    return nullptr;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const KeyEntry* entry = find_key(key);
    if (entry == nullptr) throw ConfigError("unknown config key '" + key + "'");
    entry->set(*this, key, value);
    explicitly_set.insert(key);
}

RunConfig RunConfig::from_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return from_text(text.str());
}

std::vector<std::string> RunConfig::resolved_lines() const {
    std::vector<std::string> lines;
    lines.reserve(key_table().size());
    for (const auto& [name, entry] : key_table()) lines.push_back(name + " = " + entry.get(*this));
    return lines;
}

bool RunConfig::bath_keys_touched() const {
    for (const char* key : {"a", "wc_over_omega0", "TB_over_omega0"})
        if (explicitly_set.count(key) != 0) return true;
    return false;
}

bool RunConfig::is_numeric_key(const std::string& key) {
    const KeyEntry* entry = find_key(key);
    return entry != nullptr && (entry->kind == KeyKind::real || entry->kind == KeyKind::integer);
}

DriveParams RunConfig::drive_params() const {
    return DriveParams{1.0, lambda_Omega, lambda_omega};
}

BathSpec RunConfig::bath_spec() const { return BathSpec{a, wc_over_omega0, TB_over_omega0}; }

QuadratureConfig RunConfig::quadrature() const {
    return QuadratureConfig{pv_epsilon, quad_rel_tol, quad_max_panels, tail_cutoff_factor};
}

EvolutionConfig RunConfig::evolution_config() const {
    EvolutionConfig cfg;
    if (engine == "tdme")
        cfg.solver = Solver::tdme;
    else if (engine == "adme")
        cfg.solver = Solver::adme;
    else if (engine == "unitary")
        cfg.solver = Solver::unitary;
    cfg.lamb_shift = lamb_shift;
    cfg.picture = picture == "interaction" ? Picture::interaction : Picture::schroedinger;
    cfg.dt = dt_over_ts;
    cfg.t_end = t_end_over_ts;
    cfg.store_stride = store_stride;
    return cfg;
}

TnConfig RunConfig::tn_config() const {
    TnConfig cfg;
    cfg.dt = tn_dt_over_ts;
    cfg.t_end = t_end_over_ts;
    cfg.store_stride = store_stride;
    cfg.svd_cutoff = tn_svd_cutoff;
    cfg.chi_max = tn_chi_max;
    cfg.occupancy_cutoff = tn_occupancy_cutoff;
    cfg.gibbs_weight_tol = tn_gibbs_weight_tol;
    return cfg;
}

DensityMatrix RunConfig::initial_density() const {
    if (initial_state == "thermal") return DensityMatrix::thermal(TS_over_omega0, drive_params());
    if (initial_state == "superposition") return DensityMatrix::coherent_superposition();
    if (initial_state == "maximally_mixed") return DensityMatrix::maximally_mixed();
    if (initial_state == "bloch") return DensityMatrix::from_bloch(bloch_x, bloch_y, bloch_z);
    throw ConfigError("initial_state must be thermal, superposition, maximally_mixed or bloch");
}

void RunConfig::validate() const {
    static const std::set<std::string> engines{"tdme", "adme", "unitary", "tn", "analytic"};
    if (engines.count(engine) == 0)
        throw ConfigError("engine must be one of tdme, adme, unitary, tn, analytic");
    if (picture != "schroedinger" && picture != "interaction")
        throw ConfigError("picture must be schroedinger or interaction");
    if (engine == "analytic" && picture != "interaction")
        throw ConfigError("engine analytic requires picture = interaction");
    try {
        drive_params().validate();
        if (engine != "unitary") bath_spec().validate();
        quadrature().validate();
        if (engine == "tn")
            tn_config().validate();
        else
            evolution_config().validate();
        initial_density();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace driven
