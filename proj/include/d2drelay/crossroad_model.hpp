#pragma once

#include <numbers>
#include <string_view>

namespace d2drelay {

/// Two consecutive angles (radians) between the streets of a degree-3
/// crossroad; the third is delta = 2 pi - alpha - beta.
/// Domain: 0 < alpha < pi, pi - alpha < beta < pi (hence 0 < delta < pi).
struct CrossroadAngles {
    double alpha = 2.0 * std::numbers::pi / 3.0;
    double beta = 2.0 * std::numbers::pi / 3.0;

    double delta() const noexcept { return 2.0 * std::numbers::pi - alpha - beta; }
    bool in_domain() const noexcept;
};

enum class SurfaceKind { triangle, circumcircle };

std::string_view to_string(SurfaceKind kind) noexcept;
/// Accepts "triangle" or "circumcircle" (also "circle"); throws DomainError otherwise.
SurfaceKind parse_surface_kind(std::string_view name);

/// Street width and the crossroad figure credited for user presence.
struct CrossroadGeometry {
    double street_width_m = 20.0;
    SurfaceKind surface_kind = SurfaceKind::circumcircle;

    void validate() const;
};

struct SideLengths {
    double ab = 0.0;
    double bc = 0.0;
    double ca = 0.0;
};

/// Tolerance used both for the domain clamp and for collinearity tests.
inline constexpr double angle_tolerance = 1e-9;

/// Angles pulled inward by 1e-9 rad when they sit within that distance of the
/// domain boundary. Throws DomainError when further outside.
CrossroadAngles clamp_to_domain(CrossroadAngles angles);

/// Area (m^2) of the triangle bounded by the street borders.
double triangle_surface(const CrossroadGeometry& geometry, CrossroadAngles angles);
SideLengths side_lengths(const CrossroadGeometry& geometry, CrossroadAngles angles);
/// Area (m^2) of the circumcircle of the border triangle.
double circumcircle_surface(const CrossroadGeometry& geometry, CrossroadAngles angles);
/// Crossroad surface selected by geometry.surface_kind.
double crossroad_surface(const CrossroadGeometry& geometry, CrossroadAngles angles);

/// Joint density of the angle pair at the typical Poisson-Voronoi vertex.
/// Zero outside the open domain.
double angle_density(CrossroadAngles angles) noexcept;

/// Options for the tensor Gauss-Legendre rule over the angle domain.
struct QuadratureOptions {
    int initial_nodes = 128;
    int max_nodes = 2048;
    double tolerance = 1e-8;
};

/// Integral of g(alpha, beta) * f(alpha, beta) over the angle domain, where f
/// is angle_density. Node count doubles until successive estimates agree.
template <typename G>
double integrate_over_angles(G&& g, const QuadratureOptions& options = {});

/// Integral of the angle density itself (should be 1).
double density_normalization(const QuadratureOptions& options = {});

/// Probability that the typical crossroad holds no user:
/// E[exp(-(lambda / l) * A(l, alpha, beta))] with lambda in users per km.
double mean_vacancy(double lambda_per_km, const CrossroadGeometry& geometry,
                    const QuadratureOptions& options = {});

struct OccupationInputs {
    double lambda_per_km = 0.0;
    double relay_fraction = 0.0;
    CrossroadGeometry geometry;

    void validate() const;
};

/// Probability that the typical crossroad is occupied by a relay or a user:
/// F = 1 - (1 - p) * E.
double occupation_probability(const OccupationInputs& inputs);
/// Same, from a precomputed vacancy E.
double occupation_from_vacancy(double relay_fraction, double vacancy) noexcept;

/// Relay fraction p solving F(lambda, p, l) = p_star, unclamped. Returns
/// -infinity when E underflows to zero (no relays needed).
double invert_for_relay_fraction(double p_star, double lambda_per_km,
                                 const CrossroadGeometry& geometry);
double invert_from_vacancy(double p_star, double vacancy);

}  // namespace d2drelay

#include "d2drelay/detail/angle_quadrature.hpp"
