#include "fnls/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fnls {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(line, "trailing characters after number '" + v + "'");
    return x;
}

long long parse_int(const std::string& v, int line) {
    std::size_t pos = 0;
    long long x;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    }
    if (pos != v.size()) throw ConfigError(line, "trailing characters after integer '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(line, "expected true/false, got '" + v + "'");
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (val.empty()) throw ConfigError(lineno, "empty value for '" + key + "'");
        if (cfg.given.count(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
        cfg.given[key] = val;

        if (key == "dim") {
            cfg.params.d = static_cast<int>(parse_int(val, lineno));
        } else if (key == "p") {
            cfg.params.p = parse_double(val, lineno);
        } else if (key == "mass" || key == "lambda") {
            cfg.params.lambda = parse_double(val, lineno);
        } else if (key == "grid_n") {
            const auto n = parse_int(val, lineno);
            if (n != 0) cfg.solver.grid_n = static_cast<int>(n);
        } else if (key == "box_l") {
            const auto b = parse_double(val, lineno);
            if (b != 0.0) cfg.solver.box = b;
        } else if (key == "el_tol") {
            cfg.solver.el_tol = parse_double(val, lineno);
        } else if (key == "eig_tol") {
            cfg.solver.eig_tol = parse_double(val, lineno);
        } else if (key == "energy_tol") {
            cfg.solver.energy_tol = parse_double(val, lineno);
        } else if (key == "max_iter") {
            cfg.solver.max_iter = static_cast<int>(parse_int(val, lineno));
        } else if (key == "mixing") {
            cfg.solver.mixing = parse_double(val, lineno);
        } else if (key == "n_restarts") {
            cfg.solver.n_restarts = static_cast<int>(parse_int(val, lineno));
        } else if (key == "seed") {
            cfg.solver.seed = static_cast<std::uint64_t>(parse_int(val, lineno));
        } else if (key == "engine") {
            cfg.solver.engine = val;
        } else if (key == "threads") {
            cfg.solver.threads = static_cast<int>(parse_int(val, lineno));
        } else if (key == "box_lmin") {
            cfg.solver.box_policy.l_min = parse_double(val, lineno);
        } else if (key == "box_cbox") {
            cfg.solver.box_policy.c_box = parse_double(val, lineno);
        } else if (key == "box_margin") {
            cfg.solver.box_policy.margin = parse_double(val, lineno);
        } else if (key == "box_htarget") {
            cfg.solver.box_policy.h_target = parse_double(val, lineno);
        } else if (key == "box_nmax") {
            cfg.solver.box_policy.n_max = static_cast<int>(parse_int(val, lineno));
        } else if (key == "keep_orbitals") {
            cfg.solver.keep_orbitals = parse_bool(val, lineno);
        } else if (key == "dump_orbitals") {
            cfg.dump_orbitals = parse_bool(val, lineno);
        } else if (key == "c_lt") {
            cfg.solver.c_lt = parse_double(val, lineno);
        } else {
            throw ConfigError(lineno, "unknown key '" + key + "'");
        }
    }

    // range validation, reported against line 0 (whole-file semantics)
    try {
        cfg.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    if (cfg.solver.grid_n) {
        const int n = *cfg.solver.grid_n;
        if (n < 8 || n % 2 != 0) throw ConfigError(0, "grid_n must be even and >= 8");
    }
    if (cfg.solver.box && *cfg.solver.box <= 0.0) throw ConfigError(0, "box_l must be positive");
    if (cfg.solver.mixing <= 0.0 || cfg.solver.mixing > 1.0) {
        throw ConfigError(0, "mixing must lie in (0, 1]");
    }
    if (cfg.solver.engine != "flow" && cfg.solver.engine != "scf" &&
        cfg.solver.engine != "hybrid") {
        throw ConfigError(0, "engine must be flow, scf or hybrid");
    }
    if (cfg.solver.n_restarts < 1) throw ConfigError(0, "n_restarts must be >= 1");
    if (cfg.solver.max_iter < 1) throw ConfigError(0, "max_iter must be >= 1");
    if (cfg.solver.threads < 1) throw ConfigError(0, "threads must be >= 1");
    return cfg;
}

ParsedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string effective_config_string(const ParsedConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "dim = " << cfg.params.d << "\n";
    out << "p = " << cfg.params.p << "\n";
    out << "mass = " << cfg.params.lambda << "\n";
    out << "grid_n = " << (cfg.solver.grid_n ? *cfg.solver.grid_n : 0) << "\n";
    out << "box_l = " << (cfg.solver.box ? *cfg.solver.box : 0.0) << "\n";
    out << "el_tol = " << cfg.solver.el_tol << "\n";
    out << "eig_tol = " << cfg.solver.eig_tol << "\n";
    out << "energy_tol = " << cfg.solver.energy_tol << "\n";
    out << "max_iter = " << cfg.solver.max_iter << "\n";
    out << "mixing = " << cfg.solver.mixing << "\n";
    out << "n_restarts = " << cfg.solver.n_restarts << "\n";
    out << "seed = " << cfg.solver.seed << "\n";
    out << "engine = " << cfg.solver.engine << "\n";
    out << "threads = " << cfg.solver.threads << "\n";
    out << "box_lmin = " << cfg.solver.box_policy.l_min << "\n";
    out << "box_cbox = " << cfg.solver.box_policy.c_box << "\n";
    out << "box_margin = " << cfg.solver.box_policy.margin << "\n";
    out << "box_htarget = " << cfg.solver.box_policy.h_target << "\n";
    out << "box_nmax = " << cfg.solver.box_policy.n_max << "\n";
    out << "keep_orbitals = " << (cfg.solver.keep_orbitals ? "true" : "false") << "\n";
    out << "dump_orbitals = " << (cfg.dump_orbitals ? "true" : "false") << "\n";
    out << "c_lt = " << cfg.solver.c_lt << "\n";
    return out.str();
}

}  // namespace fnls
