#include "lpstoch/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpstoch {

void RunConfig::validate() const {
    if (system.empty()) throw std::invalid_argument("config: system name required");
    if (!(T > 0.0)) throw std::invalid_argument("config: T must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("config: h must be positive");
    if (h > T) throw std::invalid_argument("config: h must not exceed T");
    if (trials < 2) throw std::invalid_argument("config: trials must be >= 2");
    if (levels < 1) throw std::invalid_argument("config: levels must be >= 1");
    if (paths < 1) throw std::invalid_argument("config: paths must be >= 1");
    if (scheme != "euler_heun" && scheme != "midpoint")
        throw std::invalid_argument("config: scheme must be euler_heun or midpoint");
    if (form != "reduced" && form != "unreduced")
        throw std::invalid_argument("config: form must be reduced or unreduced");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": " + v);
    }
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

void apply_run_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "T")
        cfg.T = parse_number(value, key);
    else if (key == "h")
        cfg.h = parse_number(value, key);
    else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_number(value, key));
    else if (key == "trials")
        cfg.trials = static_cast<long>(parse_number(value, key));
    else if (key == "levels")
        cfg.levels = static_cast<int>(parse_number(value, key));
    else if (key == "paths")
        cfg.paths = static_cast<int>(parse_number(value, key));
    else if (key == "slices")
        cfg.slices = static_cast<int>(parse_number(value, key));
    else if (key == "scheme")
        cfg.scheme = unquote(value);
    else if (key == "out")
        cfg.out = unquote(value);
    else if (key == "form")
        cfg.form = unquote(value);
    else if (key == "system")
        cfg.system = unquote(value);
    else
        throw std::invalid_argument("config: unknown [run] key: " + key);
}

void apply_system_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "name")
        cfg.system = unquote(value);
    else
        cfg.system_overrides[key] = parse_number(value, key);
}

}  // namespace

void apply_dotted(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos)
        throw std::invalid_argument("config: expected table.key, got " + key);
    const std::string table = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (table == "run")
        apply_run_key(cfg, name, value);
    else if (table == "system")
        apply_system_key(cfg, name, value);
    else
        throw std::invalid_argument("config: unknown table: " + table);
}

void parse_config_text(const std::string& text, RunConfig& cfg) {
    std::istringstream in(text);
    std::string line, table;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: bad table header at line " +
                                            std::to_string(lineno));
            table = trim(line.substr(1, line.size() - 2));
            if (table != "run" && table != "system")
                throw std::invalid_argument("config: unknown table [" + table + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (table.empty())
            throw std::invalid_argument("config: key outside [run]/[system] at line " +
                                        std::to_string(lineno));
        if (table == "run")
            apply_run_key(cfg, key, value);
        else
            apply_system_key(cfg, key, value);
    }
}

RunConfig parse_config_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::invalid_argument("config: cannot open " + filename);
    std::ostringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    parse_config_text(ss.str(), cfg);
    return cfg;
}

}  // namespace lpstoch
