#include "d2drelay/street_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>

#include <boost/polygon/voronoi.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "d2drelay/errors.hpp"
#include "d2drelay/seeding.hpp"

namespace d2drelay {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Rect {
    double x_min, y_min, x_max, y_max;
};

Rect interior_rect(const Window& w) {
    return {w.x_min + w.margin, w.y_min + w.margin, w.x_max - w.margin, w.y_max - w.margin};
}

// Liang-Barsky. Returns the parameter range [t0, t1] of p + t (q - p) inside r.
std::optional<std::pair<double, double>> clip_segment(Point p, Point q, const Rect& r) {
    double dx = q.x - p.x;
    double dy = q.y - p.y;
    double t0 = 0.0;
    double t1 = 1.0;
    const std::array<double, 4> den = {-dx, dx, -dy, dy};
    const std::array<double, 4> num = {p.x - r.x_min, r.x_max - p.x, p.y - r.y_min, r.y_max - p.y};
    for (int i = 0; i < 4; ++i) {
        if (den[i] == 0.0) {
            if (num[i] < 0.0) return std::nullopt;
            continue;
        }
        double t = num[i] / den[i];
        if (den[i] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return std::nullopt;
    }
    return std::make_pair(t0, t1);
}

Point lerp(Point p, Point q, double t) { return {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)}; }

}  // namespace

double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

bool Window::contains(Point p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
}

bool Window::in_interior(Point p) const noexcept {
    return p.x > x_min + margin && p.x < x_max - margin && p.y > y_min + margin &&
           p.y < y_max - margin;
}

void Window::validate() const {
    if (!(x_max > x_min) || !(y_max > y_min) || !std::isfinite(area())) {
        throw DomainError("window must satisfy x_max > x_min and y_max > y_min");
    }
    if (!(margin >= 0) || !(2 * margin < std::min(width(), height()))) {
        throw DomainError("window margin must satisfy 0 <= 2*margin < min(width, height)");
    }
}

StreetSystem::StreetSystem(std::vector<Vertex> vertices, std::vector<Edge> edges, Window window,
                           double gamma_target, double germ_intensity)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      window_(window),
      gamma_target_(gamma_target),
      germ_intensity_(germ_intensity) {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (vertices_[i].id != static_cast<std::int64_t>(i)) {
            throw DomainError("vertex ids must equal their index");
        }
    }
    incidence_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.id != static_cast<std::int64_t>(i) || e.a < 0 || e.b < 0 ||
            static_cast<std::size_t>(e.a) >= n || static_cast<std::size_t>(e.b) >= n ||
            e.a == e.b || !(e.length > 0)) {
            throw DomainError("edge " + std::to_string(i) + " is malformed");
        }
        ++incidence_offsets_[static_cast<std::size_t>(e.a) + 1];
        ++incidence_offsets_[static_cast<std::size_t>(e.b) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) incidence_offsets_[i + 1] += incidence_offsets_[i];
    incidence_.resize(incidence_offsets_[n]);
    std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    for (const Edge& e : edges_) {
        incidence_[fill[static_cast<std::size_t>(e.a)]++] = e.id;
        incidence_[fill[static_cast<std::size_t>(e.b)]++] = e.id;
    }
}

std::span<const std::int64_t> StreetSystem::incident_edges(std::int64_t vertex_id) const {
    auto i = static_cast<std::size_t>(vertex_id);
    if (vertex_id < 0 || i >= vertices_.size()) throw DomainError("vertex id out of range");
    return std::span<const std::int64_t>(incidence_).subspan(
        incidence_offsets_[i], incidence_offsets_[i + 1] - incidence_offsets_[i]);
}

bool StreetSystem::is_crossroad(std::int64_t vertex_id) const {
    return !vertex(vertex_id).boundary && degree(vertex_id) == 3;
}

bool StreetSystem::is_interior_crossroad(std::int64_t vertex_id) const {
    return is_crossroad(vertex_id) && window_.in_interior(vertex(vertex_id).position);
}

double StreetSystem::total_length() const noexcept {
    double total = 0.0;
    for (const Edge& e : edges_) total += e.length;
    return total;
}

StreetSystem generate_pvt(double gamma, const Window& window, std::uint64_t seed) {
    if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
    window.validate();
    const double intensity = germ_intensity_for(gamma);
    if (intensity * window.area() < 1.0) {
        throw DegenerateInputError("window too small: expected germ count below 1");
    }

    // Germs are drawn in a dilated window so clipped cells near the border
    // are the same as in the unbounded tessellation.
    const double pad = 3.0 / std::sqrt(intensity);
    const Rect germ_box{window.x_min - pad, window.y_min - pad, window.x_max + pad,
                        window.y_max + pad};
    const double box_w = germ_box.x_max - germ_box.x_min;
    const double box_h = germ_box.y_max - germ_box.y_min;

    boost::random::mt19937_64 rng(derive_seed(seed, SeedStream::street));
    boost::random::poisson_distribution<long, double> count_dist(intensity * box_w * box_h);
    boost::random::uniform_01<double> unit;
    const long germ_count = count_dist(rng);

    // Boost.Polygon needs integer sites; quantise at 0.1 mm or finer than the
    // int32 range allows, whichever is coarser.
    const double cx = 0.5 * (germ_box.x_min + germ_box.x_max);
    const double cy = 0.5 * (germ_box.y_min + germ_box.y_max);
    const double scale = std::min(1e7, 2.0e9 / std::max(box_w, box_h));
    using IPoint = boost::polygon::point_data<std::int32_t>;
    std::vector<IPoint> sites;
    sites.reserve(static_cast<std::size_t>(germ_count));
    for (long i = 0; i < germ_count; ++i) {
        double x = germ_box.x_min + box_w * unit(rng);
        double y = germ_box.y_min + box_h * unit(rng);
        sites.emplace_back(static_cast<std::int32_t>(std::lround((x - cx) * scale)),
                           static_cast<std::int32_t>(std::lround((y - cy) * scale)));
    }
    std::sort(sites.begin(), sites.end(), [](const IPoint& a, const IPoint& b) {
        return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
    });
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    if (sites.size() < 3) throw DegenerateInputError("fewer than three germs sampled");

    boost::polygon::voronoi_diagram<double> vd;
    boost::polygon::construct_voronoi(sites.begin(), sites.end(), &vd);

    auto to_km = [&](double ix, double iy) { return Point{ix / scale + cx, iy / scale + cy}; };
    const Rect clip{window.x_min, window.y_min, window.x_max, window.y_max};
    const double far = 4.0 * (box_w + box_h);

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<std::int64_t> mapped(vd.vertices().size(), -1);
    const auto* vertex_base = vd.vertices().data();

    auto add_vertex = [&](Point p, bool boundary) {
        auto id = static_cast<std::int64_t>(vertices.size());
        vertices.push_back(Vertex{id, p, boundary});
        return id;
    };
    auto voronoi_vertex = [&](const boost::polygon::voronoi_vertex<double>* v) {
        auto idx = static_cast<std::size_t>(v - vertex_base);
        if (mapped[idx] < 0) mapped[idx] = add_vertex(to_km(v->x(), v->y()), false);
        return mapped[idx];
    };

    for (const auto& e : vd.edges()) {
        if (&e > e.twin()) continue;
        const auto* v0 = e.vertex0();
        const auto* v1 = e.vertex1();
        if (v0 == nullptr && v1 == nullptr) continue;

        Point p;
        Point q;
        if (v0 != nullptr && v1 != nullptr) {
            p = to_km(v0->x(), v0->y());
            q = to_km(v1->x(), v1->y());
        } else {
            const IPoint& s1 = sites[e.cell()->source_index()];
            const IPoint& s2 = sites[e.twin()->cell()->source_index()];
            double dx = static_cast<double>(s1.y()) - s2.y();
            double dy = static_cast<double>(s2.x()) - s1.x();
            double norm = std::hypot(dx, dy);
            dx /= norm;
            dy /= norm;
            if (v0 != nullptr) {
                p = to_km(v0->x(), v0->y());
                q = {p.x + far * dx, p.y + far * dy};
            } else {
                q = to_km(v1->x(), v1->y());
                p = {q.x - far * dx, q.y - far * dy};
            }
        }

        auto range = clip_segment(p, q, clip);
        if (!range) continue;
        auto [t0, t1] = *range;
        auto snap = [&clip](Point x) {
            return Point{std::clamp(x.x, clip.x_min, clip.x_max), std::clamp(x.y, clip.y_min, clip.y_max)};
        };
        Point a = snap(lerp(p, q, t0));
        Point b = snap(lerp(p, q, t1));
        double length = distance(a, b);
        if (!(length > 1e-12)) continue;

        std::int64_t ia = (t0 == 0.0 && v0 != nullptr) ? voronoi_vertex(v0) : add_vertex(a, true);
        std::int64_t ib = (t1 == 1.0 && v1 != nullptr) ? voronoi_vertex(v1) : add_vertex(b, true);
        if (ia == ib) continue;
        length = distance(vertices[static_cast<std::size_t>(ia)].position,
                          vertices[static_cast<std::size_t>(ib)].position);
        edges.push_back(Edge{static_cast<std::int64_t>(edges.size()), ia, ib, length});
    }

    return StreetSystem(std::move(vertices), std::move(edges), window, gamma, intensity);
}

StreetStats street_stats(const StreetSystem& s) {
    const Window& w = s.window();
    const Rect inner = interior_rect(w);
    const double area = w.interior_area();

    StreetStats stats;
    for (const Vertex& v : s.vertices()) {
        if (s.is_interior_crossroad(v.id)) ++stats.vertex_count;
    }
    if (stats.vertex_count == 0) {
        throw DegenerateInputError("street system has no crossroad in the window interior");
    }

    double clipped_length = 0.0;
    double full_edge_length = 0.0;
    std::size_t full_edges = 0;
    for (const Edge& e : s.edges()) {
        const Vertex& a = s.vertex(e.a);
        const Vertex& b = s.vertex(e.b);
        if (auto range = clip_segment(a.position, b.position, inner)) {
            clipped_length += (range->second - range->first) * e.length;
        }
        Point mid{0.5 * (a.position.x + b.position.x), 0.5 * (a.position.y + b.position.y)};
        if (w.in_interior(mid)) {
            ++stats.edge_count;
            if (!a.boundary && !b.boundary) {
                ++full_edges;
                full_edge_length += e.length;
            }
        }
    }

    stats.length_intensity_hat = clipped_length / area;
    stats.vertex_intensity_hat = static_cast<double>(stats.vertex_count) / area;
    stats.edge_intensity_hat = static_cast<double>(stats.edge_count) / area;
    stats.mean_edge_length = full_edges > 0 ? full_edge_length / static_cast<double>(full_edges) : 0.0;
    return stats;
}

bool angles_from_directions(double theta0, double theta1, double theta2,
                            std::uint64_t rotation_key, CrossroadAngles& out) {
    std::array<double, 3> t = {theta0, theta1, theta2};
    for (double& x : t) {
        x = std::fmod(x, two_pi);
        if (x < 0) x += two_pi;
    }
    std::sort(t.begin(), t.end());
    const std::array<double, 3> gaps = {t[1] - t[0], t[2] - t[1], two_pi - t[2] + t[0]};
    for (double g : gaps) {
        if (g < angle_tolerance || std::abs(g - std::numbers::pi) < angle_tolerance) return false;
    }

    std::array<CrossroadAngles, 3> candidates;
    int valid = 0;
    for (int k = 0; k < 3; ++k) {
        CrossroadAngles c{gaps[k], gaps[(k + 1) % 3]};
        if (c.in_domain()) candidates[valid++] = c;
    }
    if (valid == 0) return false;
    out = candidates[splitmix64(rotation_key) % static_cast<std::uint64_t>(valid)];
    return true;
}

VertexAngleSample sample_vertex_angles(const StreetSystem& s) {
    VertexAngleSample sample;
    for (const Vertex& v : s.vertices()) {
        if (!s.is_interior_crossroad(v.id)) continue;
        std::array<double, 3> theta{};
        auto incident = s.incident_edges(v.id);
        for (std::size_t k = 0; k < 3; ++k) {
            const Edge& e = s.edge(incident[k]);
            const Point other = s.vertex(e.a == v.id ? e.b : e.a).position;
            theta[k] = std::atan2(other.y - v.position.y, other.x - v.position.x);
        }
        CrossroadAngles angles;
        if (angles_from_directions(theta[0], theta[1], theta[2],
                                   static_cast<std::uint64_t>(v.id), angles)) {
            sample.angles.push_back(angles);
            sample.vertex_ids.push_back(v.id);
        } else {
            ++sample.excluded_collinear;
        }
    }
    if (sample.angles.empty() && sample.excluded_collinear == 0) {
        throw DegenerateInputError("street system has no crossroad in the window interior");
    }
    return sample;
}

}  // namespace d2drelay
