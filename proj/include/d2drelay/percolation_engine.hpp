#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "d2drelay/network_realization.hpp"
#include "d2drelay/street_geometry.hpp"

namespace d2drelay {

/// Union-find with union by size and path halving.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t count = 0);

    std::size_t find(std::size_t x) noexcept;
    /// Returns the root of the merged set.
    std::size_t unite(std::size_t a, std::size_t b) noexcept;
    std::size_t set_size(std::size_t x) noexcept { return size_[find(x)]; }
    std::size_t element_count() const noexcept { return parent_.size(); }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

struct Component {
    std::size_t size = 0;
    std::vector<std::int64_t> members;  // ascending node ids
};

/// Largest connected component; ties go to the component holding the
/// smallest node id.
Component largest_component(const ConnectivityGraph& g);

enum class CrossingDirection { left_right, top_bottom, both };

struct CrossingSpec {
    CrossingDirection direction = CrossingDirection::left_right;
    double contact_band_km = 0.2;

    void validate(const Window& window) const;
};

/// Default proxy: left-right crossing with a contact band equal to the range
/// (one mean street length when the range is zero).
CrossingSpec default_crossing_spec(double range_km, double gamma);

/// True iff one connected component touches both opposite contact bands
/// (for `both`, left-right and top-bottom crossings must both exist).
bool crossing_indicator(const ConnectivityGraph& g, const Window& window, const CrossingSpec& spec);

/// Lowest occupation level at which a replicate crosses: the replicate
/// crosses at level p iff the returned value is < p. -infinity means users
/// alone cross; +infinity means no crossing even with every crossroad occupied.
double critical_occupation_level(const StreetSystem& s, std::span<const User> users,
                                 const OccupationDraw& occupation, double range_km,
                                 const CrossingSpec& spec);

struct PercolationSetup {
    double gamma = 20.0;
    double lambda_per_km = 0.0;
    double range_km = 0.2;
    Window window = Window::square(5.0);
    std::optional<CrossingSpec> crossing;  // default_crossing_spec when empty
    unsigned threads = 0;                  // 0: hardware concurrency

    void validate() const;
    CrossingSpec crossing_spec() const;
};

/// Critical levels of `replicates` independent replicates. Replicate i draws
/// its streets, users and occupation from sub-seeds of (master_seed, i).
std::vector<double> replicate_levels(const PercolationSetup& setup, std::size_t replicates,
                                     std::uint64_t master_seed);

struct CrossingEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::size_t replicates = 0;
};

CrossingEstimate crossing_probability(const PercolationSetup& setup, double p,
                                      std::size_t replicates, std::uint64_t master_seed);

struct CurvePoint {
    double p = 0.0;
    double crossing_prob = 0.0;
    double std_error = 0.0;
    std::size_t replicates = 0;
};

struct PercolationEstimate {
    double p_star_hat = 1.0;
    double std_error = 0.0;
    std::vector<CurvePoint> crossing_curve;
    Window window;
    double lambda_per_km = 0.0;
    double range_km = 0.0;
    double gamma = 0.0;
    bool never_percolates = false;
    bool always_percolates = false;
    std::vector<double> replicate_levels;
};

struct EstimateOptions {
    std::size_t bootstrap_resamples = 200;
    double min_expected_vertices = 500.0;
};

/// Pool-adjacent-violators fit: the weighted least-squares nondecreasing
/// sequence closest to `values`.
std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights);

/// Level where a nondecreasing fitted curve first reaches 0.5, linearly
/// interpolated. Empty when it never does.
std::optional<double> half_crossing(std::span<const double> ps, std::span<const double> fitted);

/// Threshold p* where the crossing probability reaches 1/2. Sweeps 11
/// equally spaced levels, adds 7 inside the bracketing interval, fits an
/// isotonic curve and interpolates. Throws FiniteSizeError when the window
/// is expected to hold fewer than `min_expected_vertices` crossroads.
PercolationEstimate estimate_p_star(const PercolationSetup& setup, std::size_t replicates_per_point,
                                    std::uint64_t master_seed, const EstimateOptions& options = {});

}  // namespace d2drelay
