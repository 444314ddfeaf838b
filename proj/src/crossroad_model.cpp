#include "d2drelay/crossroad_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "d2drelay/errors.hpp"

namespace d2drelay {

namespace {

constexpr double pi = std::numbers::pi;

double cot(double x) { return std::cos(x) / std::sin(x); }

// Both surfaces in units of l^2, on angles already inside the domain.
double unit_triangle(double alpha, double beta) {
    return 0.25 * (cot(alpha / 2) + cot(beta / 2) - cot((alpha + beta) / 2));
}

double unit_side_squared(double first, double second) {
    double d = cot(first / 2) - cot(second / 2);
    return 0.25 * (d * d + 4.0);
}

double unit_circumcircle(double alpha, double beta) {
    double delta = 2 * pi - alpha - beta;
    double ab2 = unit_side_squared(alpha, beta);
    double bc2 = unit_side_squared(beta, delta);
    double ca2 = unit_side_squared(delta, alpha);
    double s = unit_triangle(alpha, beta);
    return pi * ab2 * bc2 * ca2 / (16.0 * s * s);
}

double unit_surface(SurfaceKind kind, double alpha, double beta) {
    return kind == SurfaceKind::triangle ? unit_triangle(alpha, beta)
                                         : unit_circumcircle(alpha, beta);
}

}  // namespace

bool CrossroadAngles::in_domain() const noexcept {
    return alpha > 0 && alpha < pi && beta > pi - alpha && beta < pi;
}

std::string_view to_string(SurfaceKind kind) noexcept {
    return kind == SurfaceKind::triangle ? "triangle" : "circumcircle";
}

SurfaceKind parse_surface_kind(std::string_view name) {
    if (name == "triangle") return SurfaceKind::triangle;
    if (name == "circumcircle" || name == "circle") return SurfaceKind::circumcircle;
    throw DomainError("unknown surface kind '" + std::string(name) +
                      "' (expected triangle or circumcircle)");
}

void CrossroadGeometry::validate() const {
    if (!(street_width_m > 0) || !std::isfinite(street_width_m)) {
        throw DomainError("street width must be positive");
    }
}

CrossroadAngles clamp_to_domain(CrossroadAngles a) {
    constexpr double tol = angle_tolerance;
    if (!std::isfinite(a.alpha) || !std::isfinite(a.beta) || a.alpha < -tol ||
        a.alpha > pi + tol || a.beta > pi + tol || a.beta < pi - a.alpha - tol) {
        throw DomainError("crossroad angles outside 0<alpha<pi, pi-alpha<beta<pi");
    }
    if (a.in_domain() && a.alpha >= tol && a.alpha <= pi - tol && a.beta <= pi - tol &&
        a.beta >= pi - a.alpha + tol) {
        return a;
    }
    a.alpha = std::clamp(a.alpha, tol, pi - 2 * tol);
    a.beta = std::clamp(a.beta, pi - a.alpha + tol, pi - tol);
    return a;
}

double triangle_surface(const CrossroadGeometry& geometry, CrossroadAngles angles) {
    geometry.validate();
    angles = clamp_to_domain(angles);
    double l = geometry.street_width_m;
    return l * l * unit_triangle(angles.alpha, angles.beta);
}

SideLengths side_lengths(const CrossroadGeometry& geometry, CrossroadAngles angles) {
    geometry.validate();
    angles = clamp_to_domain(angles);
    double l = geometry.street_width_m;
    double delta = angles.delta();
    return SideLengths{
        l * std::sqrt(unit_side_squared(angles.alpha, angles.beta)),
        l * std::sqrt(unit_side_squared(angles.beta, delta)),
        l * std::sqrt(unit_side_squared(delta, angles.alpha)),
    };
}

double circumcircle_surface(const CrossroadGeometry& geometry, CrossroadAngles angles) {
    geometry.validate();
    angles = clamp_to_domain(angles);
    double l = geometry.street_width_m;
    return l * l * unit_circumcircle(angles.alpha, angles.beta);
}

double crossroad_surface(const CrossroadGeometry& geometry, CrossroadAngles angles) {
    return geometry.surface_kind == SurfaceKind::triangle ? triangle_surface(geometry, angles)
                                                          : circumcircle_surface(geometry, angles);
}

double angle_density(CrossroadAngles angles) noexcept {
    if (!angles.in_domain()) return 0.0;
    return -(8.0 / (3.0 * pi)) * std::sin(angles.alpha) * std::sin(angles.beta) *
           std::sin(angles.alpha + angles.beta);
}

namespace detail {

const GaussLegendreRule& gauss_legendre_unit(int order) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(order); it != cache.end()) return it->second;

    if (order < 1) throw DomainError("quadrature order must be positive");
    GaussLegendreRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double derivative = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            derivative = order * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / derivative;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        // Map from (-1, 1) to (0, 1).
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[order - 1 - i] = 0.5 * w;
    }
    return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace detail

double density_normalization(const QuadratureOptions& options) {
    return integrate_over_angles([](double, double) { return 1.0; }, options);
}

double mean_vacancy(double lambda_per_km, const CrossroadGeometry& geometry,
                    const QuadratureOptions& options) {
    if (!(lambda_per_km >= 0) || !std::isfinite(lambda_per_km)) {
        throw DomainError("user intensity lambda must be a finite non-negative number");
    }
    geometry.validate();
    if (lambda_per_km == 0.0) return 1.0;

    double l = geometry.street_width_m;
    // (lambda / l) * A with lambda in m^-1 and A = l^2 * unit surface.
    double rate = (lambda_per_km / 1000.0) * l;
    SurfaceKind kind = geometry.surface_kind;
    auto vacancy = [rate, kind](double alpha, double beta) {
        auto a = clamp_to_domain({alpha, beta});
        double exponent = -rate * unit_surface(kind, a.alpha, a.beta);
        return exponent < -700.0 ? 0.0 : std::exp(exponent);
    };
    return integrate_over_angles(vacancy, options);
}

void OccupationInputs::validate() const {
    if (!(lambda_per_km >= 0) || !std::isfinite(lambda_per_km)) {
        throw DomainError("user intensity lambda must be a finite non-negative number");
    }
    if (!(relay_fraction >= 0 && relay_fraction <= 1)) {
        throw DomainError("relay fraction must lie in [0, 1]");
    }
    geometry.validate();
}

double occupation_from_vacancy(double relay_fraction, double vacancy) noexcept {
    return 1.0 - (1.0 - relay_fraction) * vacancy;
}

double occupation_probability(const OccupationInputs& inputs) {
    inputs.validate();
    return occupation_from_vacancy(inputs.relay_fraction,
                                   mean_vacancy(inputs.lambda_per_km, inputs.geometry));
}

double invert_from_vacancy(double p_star, double vacancy) {
    if (!(p_star >= 0 && p_star <= 1)) throw DomainError("p_star must lie in [0, 1]");
    if (vacancy <= std::numeric_limits<double>::min()) {
        return -std::numeric_limits<double>::infinity();
    }
    return 1.0 - (1.0 - p_star) / vacancy;
}

double invert_for_relay_fraction(double p_star, double lambda_per_km,
                                 const CrossroadGeometry& geometry) {
    return invert_from_vacancy(p_star, mean_vacancy(lambda_per_km, geometry));
}

}  // namespace d2drelay
