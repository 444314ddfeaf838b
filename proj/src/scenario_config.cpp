#include "d2drelay/scenario_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "d2drelay/errors.hpp"

namespace d2drelay {

namespace {

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

template <typename Int>
Int to_integer(std::string_view text) {
    text = trim(text);
    Int value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

bool to_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(text) + "'");
}

// Shortest text that parses back to the same double.
std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::optional<double> to_optional(std::string_view text) {
    if (trim(text) == "auto") return std::nullopt;
    return to_double(text);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt(*v) : "auto"; }

struct KeySpec {
    std::string section;
    std::string key;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define D2D_NUM(sec, name, member)                                                       \
    KeySpec {                                                                            \
        sec, name, [](ScenarioConfig& c, std::string_view v) { c.member = to_double(v); }, \
            [](const ScenarioConfig& c) { return fmt(c.member); }                          \
    }
#define D2D_INT(sec, name, member, type)                                                      \
    KeySpec {                                                                                 \
        sec, name, [](ScenarioConfig& c, std::string_view v) { c.member = to_integer<type>(v); }, \
            [](const ScenarioConfig& c) { return std::to_string(c.member); }                    \
    }
#define D2D_STR(sec, name, member)                                                              \
    KeySpec {                                                                                   \
        sec, name, [](ScenarioConfig& c, std::string_view v) { c.member = std::string(trim(v)); }, \
            [](const ScenarioConfig& c) { return c.member; }                                      \
    }

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        D2D_NUM("street", "gamma", street.gamma),
        D2D_NUM("street", "width_km", street.width_km),
        D2D_NUM("street", "height_km", street.height_km),
        KeySpec{"street", "margin_km",
                [](ScenarioConfig& c, std::string_view v) { c.street.margin_km = to_optional(v); },
                [](const ScenarioConfig& c) { return fmt_optional(c.street.margin_km); }},

        D2D_NUM("network", "lambda", network.lambda_per_km),
        D2D_NUM("network", "range_km", network.range_km),

        D2D_NUM("crossroad", "street_width_m", crossroad.street_width_m),
        KeySpec{"crossroad", "surface",
                [](ScenarioConfig& c, std::string_view v) {
                    c.crossroad.surface = parse_surface_kind(trim(v));
                },
                [](const ScenarioConfig& c) { return std::string(to_string(c.crossroad.surface)); }},
        D2D_STR("crossroad", "lambda_grid", crossroad.lambda_grid),
        D2D_STR("crossroad", "p_grid", crossroad.p_grid),

        D2D_INT("percolation", "replicates", percolation.replicates, std::size_t),
        D2D_INT("percolation", "seed", percolation.seed, std::uint64_t),
        KeySpec{"percolation", "direction",
                [](ScenarioConfig& c, std::string_view v) {
                    c.percolation.direction = parse_crossing_direction(trim(v));
                },
                [](const ScenarioConfig& c) {
                    return std::string(to_string(c.percolation.direction));
                }},
        KeySpec{"percolation", "contact_band_km",
                [](ScenarioConfig& c, std::string_view v) {
                    c.percolation.contact_band_km = to_optional(v);
                },
                [](const ScenarioConfig& c) { return fmt_optional(c.percolation.contact_band_km); }},
        D2D_STR("percolation", "lambda_grid", percolation.lambda_grid),
        D2D_INT("percolation", "bootstrap", percolation.bootstrap, std::size_t),
        D2D_INT("percolation", "threads", percolation.threads, unsigned),
        D2D_NUM("percolation", "min_vertices", percolation.min_vertices),

        D2D_NUM("economics", "c_capex", economics.c_capex),
        D2D_NUM("economics", "eta", economics.eta),
        D2D_NUM("economics", "g_revenue", economics.g_revenue),
        D2D_INT("economics", "t_dep", economics.t_dep, int),
        D2D_INT("economics", "t_launch", economics.t_launch, int),
        D2D_INT("economics", "t_critical", economics.t_critical, int),
        D2D_NUM("economics", "p_min", economics.p_min),
        D2D_NUM("economics", "p_max", economics.p_max),
        D2D_NUM("economics", "gamma", economics.gamma),
        D2D_NUM("economics", "area_km2", economics.area_km2),
        D2D_INT("economics", "horizon", economics.horizon, int),
        D2D_STR("economics", "adoption", economics.adoption.id),
        D2D_NUM("economics", "adoption_scale", economics.adoption.scale),
        D2D_NUM("economics", "adoption_logistic_amplitude", economics.adoption.logistic_amplitude),
        D2D_NUM("economics", "adoption_logistic_coefficient", economics.adoption.logistic_coefficient),
        D2D_NUM("economics", "adoption_logistic_rate", economics.adoption.logistic_rate),
        D2D_NUM("economics", "adoption_onset", economics.adoption.onset),
        D2D_NUM("economics", "adoption_saturation_amplitude", economics.adoption.saturation_amplitude),
        D2D_NUM("economics", "adoption_saturation_time", economics.adoption.saturation_time),
        KeySpec{"economics", "remainder",
                [](ScenarioConfig& c, std::string_view v) {
                    c.economics.remainder = parse_remainder_rule(trim(v));
                },
                [](const ScenarioConfig& c) { return std::string(to_string(c.economics.remainder)); }},
        KeySpec{"economics", "opex_stock",
                [](ScenarioConfig& c, std::string_view v) {
                    c.economics.opex_stock = parse_opex_stock(trim(v));
                },
                [](const ScenarioConfig& c) { return std::string(to_string(c.economics.opex_stock)); }},
        KeySpec{"economics", "tuning_check",
                [](ScenarioConfig& c, std::string_view v) { c.economics_tuning_check = to_bool(v); },
                [](const ScenarioConfig& c) {
                    return std::string(c.economics_tuning_check ? "true" : "false");
                }},
    };
    return specs;
}

#undef D2D_NUM
#undef D2D_INT
#undef D2D_STR

const std::vector<std::string> section_order = {"street", "network", "crossroad", "percolation",
                                                "economics"};

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      line_(line) {}

std::vector<double> parse_grid(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw std::invalid_argument("empty grid");
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        for (;;) {
            auto colon = text.find(':', start);
            parts.push_back(to_double(text.substr(start, colon - start)));
            if (colon == std::string_view::npos) break;
            start = colon + 1;
        }
        if (parts.size() != 3) throw std::invalid_argument("range grid must be start:stop:step");
        double lo = parts[0];
        double hi = parts[1];
        double step = parts[2];
        if (!(step > 0) || !(hi >= lo)) {
            throw std::invalid_argument("range grid needs step > 0 and stop >= start");
        }
        auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        if (count > 1000000) throw std::invalid_argument("grid has too many points");
        for (long k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
        return out;
    }
    std::size_t start = 0;
    for (;;) {
        auto comma = text.find(',', start);
        out.push_back(to_double(text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view to_string(CrossingDirection direction) noexcept {
    switch (direction) {
        case CrossingDirection::left_right: return "left_right";
        case CrossingDirection::top_bottom: return "top_bottom";
        case CrossingDirection::both: return "both";
    }
    return "left_right";
}

CrossingDirection parse_crossing_direction(std::string_view name) {
    if (name == "left_right") return CrossingDirection::left_right;
    if (name == "top_bottom") return CrossingDirection::top_bottom;
    if (name == "both") return CrossingDirection::both;
    throw DomainError("unknown crossing direction '" + std::string(name) +
                      "' (expected left_right, top_bottom or both)");
}

Window ScenarioConfig::window() const {
    double margin = street.margin_km ? *street.margin_km
                                     : network.range_km + mean_edge_length_for(street.gamma);
    return Window{0.0, 0.0, street.width_km, street.height_km, margin};
}

PercolationSetup ScenarioConfig::percolation_setup() const {
    PercolationSetup setup;
    setup.gamma = street.gamma;
    setup.lambda_per_km = network.lambda_per_km;
    setup.range_km = network.range_km;
    setup.window = window();
    CrossingSpec spec = default_crossing_spec(network.range_km, street.gamma);
    spec.direction = percolation.direction;
    if (percolation.contact_band_km) spec.contact_band_km = *percolation.contact_band_km;
    setup.crossing = spec;
    setup.threads = percolation.threads;
    return setup;
}

EstimateOptions ScenarioConfig::estimate_options() const {
    return EstimateOptions{percolation.bootstrap, percolation.min_vertices};
}

std::vector<std::string> ScenarioConfig::violations() const {
    std::vector<std::string> v;
    auto check = [&v](bool ok, const char* what) {
        if (!ok) v.emplace_back(what);
    };
    check(street.gamma > 0, "street.gamma > 0");
    check(street.width_km > 0 && street.height_km > 0, "street window sides > 0");
    if (street.margin_km) check(*street.margin_km >= 0, "street.margin_km >= 0");
    {
        Window w = window();
        check(w.margin >= 0 && 2 * w.margin < std::min(w.width(), w.height()),
              "2 * margin < min(width_km, height_km)");
    }
    check(network.lambda_per_km >= 0 && std::isfinite(network.lambda_per_km), "network.lambda >= 0");
    check(network.range_km >= 0 && std::isfinite(network.range_km), "network.range_km >= 0");
    check(crossroad.street_width_m > 0, "crossroad.street_width_m > 0");
    check(percolation.replicates >= 1, "percolation.replicates >= 1");
    if (percolation.contact_band_km) check(*percolation.contact_band_km > 0, "contact_band_km > 0");
    {
        CrossingSpec spec = percolation_setup().crossing_spec();
        Window w = window();
        check(spec.contact_band_km > 0 && spec.contact_band_km < std::min(w.width(), w.height()) / 4,
              "0 < contact band < window side / 4");
    }
    auto grid_ok = [&](const std::string& text, double lo, double hi, const char* what) {
        try {
            for (double x : parse_grid(text)) {
                if (!(x >= lo && x <= hi)) {
                    v.emplace_back(what);
                    return;
                }
            }
        } catch (const std::invalid_argument&) {
            v.emplace_back(what);
        }
    };
    constexpr double big = std::numeric_limits<double>::max();
    grid_ok(crossroad.lambda_grid, 0.0, big, "crossroad.lambda_grid values >= 0");
    grid_ok(crossroad.p_grid, 0.0, 1.0, "crossroad.p_grid values in [0, 1]");
    grid_ok(percolation.lambda_grid, 0.0, big, "percolation.lambda_grid values >= 0");
    for (auto& e : economics.violations()) v.push_back("economics." + e);
    return v;
}

void ScenarioConfig::validate() const {
    auto v = violations();
    if (!v.empty()) throw ValidationError(std::move(v));
}

std::string ScenarioConfig::to_ini() const {
    std::ostringstream out;
    for (const auto& section : section_order) {
        out << '[' << section << "]\n";
        for (const auto& spec : key_specs()) {
            if (spec.section == section) out << spec.key << " = " << spec.get(*this) << '\n';
        }
        out << '\n';
    }
    return out.str();
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
    std::map<std::string, std::map<std::string, const KeySpec*>> table;
    for (const auto& spec : key_specs()) table[spec.section][spec.key] = &spec;

    ScenarioConfig config;
    std::string section;
    std::set<std::pair<std::string, std::string>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        if (auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(source, line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!table.contains(section)) {
                throw ConfigError(source, line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source, line_no, "expected key = value");
        }
        if (section.empty()) throw ConfigError(source, line_no, "key outside any section");
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        auto it = table[section].find(key);
        if (it == table[section].end()) {
            throw ConfigError(source, line_no, "unknown key '" + key + "' in [" + section + "]");
        }
        if (!seen.emplace(section, key).second) {
            throw ConfigError(source, line_no, "duplicate key '" + key + "' in [" + section + "]");
        }
        try {
            it->second->set(config, value);
        } catch (const std::exception& e) {
            throw ConfigError(source, line_no, key + ": " + e.what());
        }
    }
    return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

}  // namespace d2drelay
