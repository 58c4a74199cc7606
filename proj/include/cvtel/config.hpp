#ifndef CVTEL_CONFIG_HPP
#define CVTEL_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cvtel/grid.hpp"
#include "cvtel/resources.hpp"

namespace cvtel {

/// Flat dotted-key run configuration shared by all CLI commands. Unknown keys
/// are rejected at parse time; value errors surface in validate().
struct RunConfig {
    int n_points = 256;
    double extent = 16.0;

    std::string resource_mode = "ideal";  // ideal | finite
    double resource_r = 1.0;

    std::string input_profile = "gaussian-packet";  // gaussian-packet | random-smooth
    double input_center = 0.0;
    double input_width = 1.0;
    std::uint64_t input_seed = 7;
    double input_q = 0.0;

    std::uint64_t seed_base = 1;
    int runs = 10;

    std::string sweep_parameter = "r";
    std::vector<double> sweep_values{0.5, 1.0, 2.0, 3.0};

    std::string format = "json";  // json | csv
    std::string out_path;

    std::string basis = "pi123";  // pi123 | triple (teleport-entangled)

    // Raw key/value view for echoing into reports.
    std::map<std::string, std::string> raw;
};

/// Parse "key=value" lines; '#' starts a comment. Throws on unknown keys or
/// malformed lines.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);
/// Apply one --set key=value override.
void apply_override(RunConfig& cfg, const std::string& key_value);

/// Cross-field validation against module preconditions. Throws on violation.
void validate(const RunConfig& cfg);

Grid config_grid(const RunConfig& cfg);
ResourceQuality config_quality(const RunConfig& cfg);
InputSpec config_input(const RunConfig& cfg);

} // namespace cvtel

#endif
