#include "cvtel/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cvtel {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer value for " + key + ": '" + v + "'");
    }
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    cfg.raw[key] = value;
    if (key == "grid.n_points") cfg.n_points = static_cast<int>(parse_int(key, value));
    else if (key == "grid.extent") cfg.extent = parse_double(key, value);
    else if (key == "resource.mode") cfg.resource_mode = value;
    else if (key == "resource.r") cfg.resource_r = parse_double(key, value);
    else if (key == "input.profile") cfg.input_profile = value;
    else if (key == "input.center") cfg.input_center = parse_double(key, value);
    else if (key == "input.width") cfg.input_width = parse_double(key, value);
    else if (key == "input.seed") cfg.input_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "input.q") cfg.input_q = parse_double(key, value);
    else if (key == "seeds.base") cfg.seed_base = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "seeds.count") cfg.runs = static_cast<int>(parse_int(key, value));
    else if (key == "sweep.parameter") cfg.sweep_parameter = value;
    else if (key == "sweep.values") {
        cfg.sweep_values.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) cfg.sweep_values.push_back(parse_double(key, item));
        }
        if (cfg.sweep_values.empty())
            throw std::invalid_argument("config: sweep.values must list at least one value");
    } else if (key == "output.format") cfg.format = value;
    else if (key == "output.path") cfg.out_path = value;
    else if (key == "basis") cfg.basis = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got '" + key_value + "'");
    set_key(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

void validate(const RunConfig& cfg) {
    if (cfg.n_points < 8 || (cfg.n_points & (cfg.n_points - 1)) != 0)
        throw std::invalid_argument("grid.n_points must be a power of two >= 8");
    if (!(cfg.extent > 0.0)) throw std::invalid_argument("grid.extent must be positive");
    if (cfg.resource_mode != "ideal" && cfg.resource_mode != "finite")
        throw std::invalid_argument("resource.mode must be ideal or finite");
    if (cfg.resource_mode == "finite" && !(cfg.resource_r >= 0.0))
        throw std::invalid_argument("resource.r must be nonnegative");
    if (cfg.input_profile != "gaussian-packet" && cfg.input_profile != "random-smooth")
        throw std::invalid_argument("input.profile must be gaussian-packet or random-smooth");
    // width-vs-spacing is enforced by the profile constructors, so commands
    // that never build an input state still run on coarse grids
    if (std::abs(cfg.input_q) >= cfg.extent / 2.0)
        throw std::invalid_argument("input.q must satisfy |q| < extent/2");
    if (cfg.runs < 1) throw std::invalid_argument("seeds.count must be positive");
    if (cfg.sweep_parameter != "r" && cfg.sweep_parameter != "n_points")
        throw std::invalid_argument("sweep.parameter must be r or n_points");
    if (cfg.format != "json" && cfg.format != "csv")
        throw std::invalid_argument("output.format must be json or csv");
    if (cfg.basis != "pi123" && cfg.basis != "triple")
        throw std::invalid_argument("basis must be pi123 or triple");
}

Grid config_grid(const RunConfig& cfg) { return make_grid(cfg.n_points, cfg.extent); }

ResourceQuality config_quality(const RunConfig& cfg) {
    return cfg.resource_mode == "ideal" ? ResourceQuality::ideal()
                                        : ResourceQuality::finite(cfg.resource_r);
}

InputSpec config_input(const RunConfig& cfg) {
    InputSpec spec;
    if (cfg.input_profile == "gaussian-packet")
        spec.profile = GaussianPacket{cfg.input_center, cfg.input_width};
    else
        spec.profile = RandomSmooth{cfg.input_seed};
    spec.q = cfg.input_q;
    return spec;
}

} // namespace cvtel
