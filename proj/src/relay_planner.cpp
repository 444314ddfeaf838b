#include "d2drelay/relay_planner.hpp"

#include <algorithm>
#include <cmath>

#include "d2drelay/errors.hpp"

namespace d2drelay {

RelayPlan minimal_relay_proportion(double lambda_per_km, double range_km,
                                   const CrossroadGeometry& geometry, double p_star,
                                   double p_star_std_error) {
    if (!(p_star >= 0 && p_star <= 1)) throw DomainError("p_star must lie in [0, 1]");
    RelayPlan plan;
    plan.lambda_per_km = lambda_per_km;
    plan.range_km = range_km;
    plan.street_width_m = geometry.street_width_m;
    plan.surface_kind = geometry.surface_kind;
    plan.p_star = p_star;
    plan.p_star_std_error = p_star_std_error;
    plan.vacancy = mean_vacancy(lambda_per_km, geometry);
    plan.unclamped_solution = invert_from_vacancy(p_star, plan.vacancy);
    plan.p_c_hat = std::min(1.0, std::max(0.0, plan.unclamped_solution));
    return plan;
}

RelayPlan minimal_relay_proportion(const PercolationEstimate& estimate,
                                   const CrossroadGeometry& geometry) {
    RelayPlan plan = minimal_relay_proportion(estimate.lambda_per_km, estimate.range_km, geometry,
                                              estimate.p_star_hat, estimate.std_error);
    if (estimate.never_percolates) {
        plan.never_percolates = true;
        plan.p_c_hat = 1.0;
    }
    return plan;
}

const PercolationEstimate& PStarCache::get(const PercolationSetup& setup, std::size_t replicates,
                                           std::uint64_t seed, const EstimateOptions& options) {
    const CrossingSpec spec = setup.crossing_spec();
    const Window& w = setup.window;
    Key key{setup.gamma,      setup.lambda_per_km, setup.range_km,
            w.x_min,          w.y_min,             w.x_max,
            w.y_max,          w.margin,            static_cast<int>(spec.direction),
            spec.contact_band_km, replicates,      seed,
            options.bootstrap_resamples};
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    PercolationEstimate est = estimate_p_star(setup, replicates, seed, options);
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, std::move(est)).first->second;
}

std::size_t PStarCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::vector<RelayCurveRow> relay_curve(std::span<const double> lambda_grid,
                                       const RelayCurveSetup& setup, PStarCache* cache) {
    PStarCache local;
    PStarCache& store = cache != nullptr ? *cache : local;
    std::vector<RelayCurveRow> rows(lambda_grid.size());
    // Replicates inside each estimate already use the thread budget.
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        PercolationSetup point = setup.percolation;
        point.lambda_per_km = lambda_grid[i];
        const PercolationEstimate& est = store.get(point, setup.replicates, setup.seed, setup.estimate);
        RelayPlan tri = minimal_relay_proportion(
            est, CrossroadGeometry{setup.street_width_m, SurfaceKind::triangle});
        RelayPlan circ = minimal_relay_proportion(
            est, CrossroadGeometry{setup.street_width_m, SurfaceKind::circumcircle});
        rows[i] = RelayCurveRow{lambda_grid[i],  est.p_star_hat, est.std_error,
                                tri.p_c_hat,     circ.p_c_hat,   est.never_percolates};
    }
    return rows;
}

}  // namespace d2drelay
