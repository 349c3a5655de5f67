#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace lpstoch {

/// Run parameters shared by every CLI command; populated from a config file,
/// dotted-name flags and standard flags in that order.
struct RunConfig {
    std::string system;
    double T = 1.0;
    double h = 1e-3;
    std::uint64_t seed = 0;
    long trials = 10000;
    std::string scheme = "euler_heun";
    std::string out;
    std::string form = "reduced";  // simulate: reduced | unreduced
    int levels = 4;
    int paths = 50;
    int slices = 10;
    std::map<std::string, double> system_overrides;

    void validate() const;  // throws std::invalid_argument
};

/// TOML-subset config: [run] and [system] tables, `key = value` lines with
/// numeric or quoted-string values, # comments.
RunConfig parse_config_file(const std::string& filename);
void parse_config_text(const std::string& text, RunConfig& cfg);

/// Applies "run.T=1.0" / "system.I1=3" style overrides.
void apply_dotted(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace lpstoch
