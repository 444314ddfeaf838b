#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "d2drelay/crossroad_model.hpp"
#include "d2drelay/percolation_engine.hpp"

namespace d2drelay {

struct RelayPlan {
    double lambda_per_km = 0.0;
    double range_km = 0.0;
    double street_width_m = 0.0;
    SurfaceKind surface_kind = SurfaceKind::circumcircle;
    double p_star = 1.0;
    double p_star_std_error = 0.0;
    double vacancy = 1.0;               // mean_vacancy at lambda
    double unclamped_solution = 1.0;    // may be negative or -infinity
    double p_c_hat = 1.0;               // clamped to [0, 1]
    bool never_percolates = false;
};

/// Minimal physical relay proportion for a known occupied-crossroad
/// threshold p_star.
RelayPlan minimal_relay_proportion(double lambda_per_km, double range_km,
                                   const CrossroadGeometry& geometry, double p_star,
                                   double p_star_std_error = 0.0);

/// Same, from a percolation estimate (which carries lambda and r). A
/// never-percolating estimate yields p_c = 1 with the flag set.
RelayPlan minimal_relay_proportion(const PercolationEstimate& estimate,
                                   const CrossroadGeometry& geometry);

/// Memoised p* estimates keyed by every input that affects them. Street
/// width and surface kind are not part of the key. Thread-safe.
class PStarCache {
public:
    const PercolationEstimate& get(const PercolationSetup& setup, std::size_t replicates,
                                   std::uint64_t seed, const EstimateOptions& options = {});
    std::size_t size() const;

private:
    using Key = std::tuple<double, double, double, double, double, double, double, double,
                           int, double, std::size_t, std::uint64_t, std::size_t>;
    mutable std::mutex mutex_;
    std::map<Key, PercolationEstimate> entries_;
};

struct RelayCurveRow {
    double lambda_per_km = 0.0;
    double p_star = 1.0;
    double p_star_std_error = 0.0;
    double p_c_triangle = 1.0;
    double p_c_circle = 1.0;
    bool never_percolates = false;
};

struct RelayCurveSetup {
    PercolationSetup percolation;  // lambda_per_km is overwritten per grid point
    double street_width_m = 20.0;
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    EstimateOptions estimate;
};

/// p* and both relay proportions along a lambda grid, one p* estimate per
/// lambda shared by the two surface kinds. Grid points with the same seed are
/// coupled (nested user samples).
std::vector<RelayCurveRow> relay_curve(std::span<const double> lambda_grid,
                                       const RelayCurveSetup& setup, PStarCache* cache = nullptr);

}  // namespace d2drelay
