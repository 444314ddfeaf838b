#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "d2drelay/crossroad_model.hpp"

namespace d2drelay {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b) noexcept;

/// Rectangular observation window in kilometers. `margin` is the band along
/// the border that statistics ignore to avoid edge effects.
struct Window {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 5.0;
    double y_max = 5.0;
    double margin = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    double interior_area() const noexcept {
        return (width() - 2 * margin) * (height() - 2 * margin);
    }

    bool contains(Point p) const noexcept;
    bool in_interior(Point p) const noexcept;

    /// Throws DomainError unless the window is non-empty and the margin fits.
    void validate() const;

    static Window square(double side_km, double margin_km = 0.0) {
        return Window{0.0, 0.0, side_km, side_km, margin_km};
    }
};

struct Vertex {
    std::int64_t id = 0;
    Point position;
    // Created where a street was cut by the window border.
    bool boundary = false;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    std::int64_t id = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;
    double length = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Planar street graph: Voronoi edges clipped to a window. Vertex and edge ids
/// equal their index in the respective vector. Immutable after construction.
class StreetSystem {
public:
    StreetSystem(std::vector<Vertex> vertices, std::vector<Edge> edges, Window window,
                 double gamma_target, double germ_intensity);

    std::span<const Vertex> vertices() const noexcept { return vertices_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Vertex& vertex(std::int64_t id) const { return vertices_.at(static_cast<std::size_t>(id)); }
    const Edge& edge(std::int64_t id) const { return edges_.at(static_cast<std::size_t>(id)); }

    /// Ids of the edges incident to `vertex_id`.
    std::span<const std::int64_t> incident_edges(std::int64_t vertex_id) const;
    std::size_t degree(std::int64_t vertex_id) const { return incident_edges(vertex_id).size(); }

    /// Non-boundary vertex of degree 3: a crossroad that may carry a relay.
    bool is_crossroad(std::int64_t vertex_id) const;
    /// Crossroad lying inside the margin-clipped interior of the window.
    bool is_interior_crossroad(std::int64_t vertex_id) const;

    const Window& window() const noexcept { return window_; }
    double gamma_target() const noexcept { return gamma_target_; }
    double germ_intensity() const noexcept { return germ_intensity_; }
    double total_length() const noexcept;

    friend bool operator==(const StreetSystem& a, const StreetSystem& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    Window window_;
    double gamma_target_;
    double germ_intensity_;
    std::vector<std::size_t> incidence_offsets_;
    std::vector<std::int64_t> incidence_;
};

struct StreetStats {
    double length_intensity_hat = 0.0;  // km / km^2
    double vertex_intensity_hat = 0.0;  // km^-2
    double edge_intensity_hat = 0.0;    // km^-2
    double mean_edge_length = 0.0;      // km
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
};

/// Germ intensity reproducing a street length intensity gamma: gamma^2 / 4.
constexpr double germ_intensity_for(double gamma) noexcept { return gamma * gamma / 4.0; }
/// Mean PVT edge length for street length intensity gamma: 4 / (3 gamma).
constexpr double mean_edge_length_for(double gamma) noexcept { return 4.0 / (3.0 * gamma); }

/// Poisson-Voronoi street system with street length intensity `gamma` (km/km^2),
/// clipped to `window`. Deterministic in `seed`.
StreetSystem generate_pvt(double gamma, const Window& window, std::uint64_t seed);

/// Empirical intensities over the margin-clipped interior. Throws
/// DegenerateInputError when the interior holds no crossroad.
StreetStats street_stats(const StreetSystem& s);

struct VertexAngleSample {
    std::vector<CrossroadAngles> angles;
    std::vector<std::int64_t> vertex_ids;
    std::size_t excluded_collinear = 0;
};

/// Angle pair of every interior crossroad, expressed in the (alpha, beta)
/// domain of the typical-crossroad angle density.
VertexAngleSample sample_vertex_angles(const StreetSystem& s);

/// Angle pair for a crossroad whose three incident streets leave at the given
/// directions (radians). `rotation_key` picks which of the three cyclic
/// rotations is reported; all three lie in the density's domain.
/// Returns false when two directions are collinear within 1e-9 rad.
bool angles_from_directions(double theta0, double theta1, double theta2,
                            std::uint64_t rotation_key, CrossroadAngles& out);

}  // namespace d2drelay
