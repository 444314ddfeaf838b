#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "d2drelay/crossroad_model.hpp"
#include "d2drelay/econo_model.hpp"
#include "d2drelay/percolation_engine.hpp"

namespace d2drelay {

/// Malformed configuration text. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& message);
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// "start:stop:step" (inclusive of stop within 1e-9 step) or "v1,v2,...".
std::vector<double> parse_grid(std::string_view text);

struct StreetConfig {
    double gamma = 20.0;
    double width_km = 5.0;
    double height_km = 5.0;
    std::optional<double> margin_km;  // default: range + mean street length
};

struct NetworkConfig {
    double lambda_per_km = 45.0;
    double range_km = 0.2;
};

struct CrossroadConfig {
    double street_width_m = 20.0;
    SurfaceKind surface = SurfaceKind::circumcircle;
    std::string lambda_grid = "0:100:5";
    std::string p_grid = "0:1:0.05";
};

struct PercolationConfig {
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    CrossingDirection direction = CrossingDirection::left_right;
    std::optional<double> contact_band_km;  // default: the range
    std::string lambda_grid = "0:100:10";
    std::size_t bootstrap = 200;
    unsigned threads = 0;
    double min_vertices = 500.0;
};

struct ScenarioConfig {
    StreetConfig street;
    NetworkConfig network;
    CrossroadConfig crossroad;
    PercolationConfig percolation;
    CostScenario economics;
    bool economics_tuning_check = false;

    Window window() const;
    CrossroadGeometry geometry() const { return {crossroad.street_width_m, crossroad.surface}; }
    PercolationSetup percolation_setup() const;
    EstimateOptions estimate_options() const;

    std::vector<std::string> violations() const;
    /// Throws ValidationError listing every violated constraint.
    void validate() const;

    /// Every key with its resolved value, in the file format; parsing the
    /// result yields an identical configuration.
    std::string to_ini() const;
};

std::string_view to_string(CrossingDirection direction) noexcept;
CrossingDirection parse_crossing_direction(std::string_view name);

/// Sections [street], [network], [crossroad], [percolation], [economics]
/// holding key = value lines; '#' or ';' start comments. Missing keys take
/// their defaults. Unknown sections or keys and duplicates are errors.
ScenarioConfig parse_config(std::string_view text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace d2drelay
