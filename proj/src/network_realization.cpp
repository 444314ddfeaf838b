#include "d2drelay/network_realization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_01.hpp>

#include "d2drelay/errors.hpp"
#include "d2drelay/seeding.hpp"

namespace d2drelay {

void NetworkParams::validate() const {
    if (!(lambda_per_km >= 0) || !std::isfinite(lambda_per_km)) {
        throw DomainError("lambda must be a finite non-negative number");
    }
    if (!(occupation_p >= 0 && occupation_p <= 1)) {
        throw DomainError("occupation probability must lie in [0, 1]");
    }
    if (!(range_km >= 0) || !std::isfinite(range_km)) {
        throw DomainError("range must be a finite non-negative number");
    }
}

UserList sample_users(const StreetSystem& s, double lambda_per_km, std::uint64_t seed) {
    if (!(lambda_per_km >= 0) || !std::isfinite(lambda_per_km)) {
        throw DomainError("lambda must be a finite non-negative number");
    }
    UserList users;
    if (lambda_per_km == 0.0) return users;

    boost::random::uniform_01<double> unit;
    for (const Edge& e : s.edges()) {
        // Each edge has its own stream so that its users do not depend on how
        // many variates other edges consumed.
        boost::random::mt19937_64 rng(derive_seed(seed, SeedStream::user_edge,
                                                  static_cast<std::uint64_t>(e.id)));
        // Arrivals of a rate-`length` Poisson process along the intensity
        // axis; those below lambda form a Poisson(lambda * length) sample.
        boost::random::exponential_distribution<double> gap(e.length);
        const Point a = s.vertex(e.a).position;
        const Point b = s.vertex(e.b).position;
        const std::size_t first = users.size();
        for (double level = gap(rng); level <= lambda_per_km; level += gap(rng)) {
            double t = unit(rng);
            users.push_back(User{e.id, t * e.length,
                                 Point{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, level});
        }
        std::sort(users.begin() + static_cast<std::ptrdiff_t>(first), users.end(),
                  [](const User& u, const User& v) { return u.offset_km < v.offset_km; });
    }
    return users;
}

UserList thin_users(const UserList& users, double lambda_per_km) {
    UserList kept;
    std::copy_if(users.begin(), users.end(), std::back_inserter(kept),
                 [lambda_per_km](const User& u) { return u.intensity_mark <= lambda_per_km; });
    return kept;
}

std::vector<std::int64_t> OccupationDraw::occupied_at(double p) const {
    std::vector<std::int64_t> ids;
    for (std::size_t v = 0; v < uniforms.size(); ++v) {
        if (uniforms[v] < p) ids.push_back(static_cast<std::int64_t>(v));
    }
    return ids;
}

OccupationDraw draw_occupation(const StreetSystem& s, std::uint64_t seed) {
    boost::random::mt19937_64 rng(derive_seed(seed, SeedStream::occupation));
    boost::random::uniform_01<double> unit;
    OccupationDraw draw;
    draw.uniforms.reserve(s.vertices().size());
    for (const Vertex& v : s.vertices()) {
        // Every vertex consumes one variate so ids map to fixed draws.
        double u = unit(rng);
        draw.uniforms.push_back(s.is_crossroad(v.id) ? u : std::numeric_limits<double>::infinity());
    }
    return draw;
}

std::vector<std::int64_t> sample_occupation(const StreetSystem& s, double p, std::uint64_t seed) {
    if (!(p >= 0 && p <= 1)) throw DomainError("occupation probability must lie in [0, 1]");
    return draw_occupation(s, seed).occupied_at(p);
}

NetworkRealization realize_network(const StreetSystem& s, const NetworkParams& params,
                                   std::uint64_t seed) {
    params.validate();
    NetworkRealization r;
    r.streets = &s;
    r.params = params;
    r.users = sample_users(s, params.lambda_per_km, derive_seed(seed, SeedStream::users));
    r.occupied_vertices = sample_occupation(s, params.occupation_p, seed);
    return r;
}

std::size_t ConnectivityGraph::link_count() const noexcept {
    std::size_t twice = 0;
    for (const auto& list : adjacency) twice += list.size();
    return twice / 2;
}

ConnectivityGraph build_graph(const StreetSystem& s, std::span<const User> users,
                              std::span<const std::int64_t> occupied, double range_km) {
    if (!(range_km >= 0)) throw DomainError("range must be non-negative");
    ConnectivityGraph g;
    const std::size_t user_count = users.size();
    g.nodes.reserve(user_count + occupied.size());
    for (std::size_t i = 0; i < user_count; ++i) {
        g.nodes.push_back(GraphNode{NodeKind::user, static_cast<std::int64_t>(i), users[i].position});
    }

    std::vector<std::int64_t> vertex_node(s.vertices().size(), -1);
    for (std::int64_t v : occupied) {
        if (s.vertex(v).boundary) throw DomainError("boundary vertices cannot be occupied");
        vertex_node[static_cast<std::size_t>(v)] = static_cast<std::int64_t>(g.nodes.size());
        g.nodes.push_back(GraphNode{NodeKind::relay_vertex, v, s.vertex(v).position});
    }
    g.adjacency.resize(g.nodes.size());
    auto link = [&g](std::int64_t a, std::int64_t b) {
        g.adjacency[static_cast<std::size_t>(a)].push_back(b);
        g.adjacency[static_cast<std::size_t>(b)].push_back(a);
    };

    // Group users by edge; the input need not be sorted.
    std::vector<std::vector<std::int64_t>> on_edge(s.edges().size());
    for (std::size_t i = 0; i < user_count; ++i) {
        on_edge[static_cast<std::size_t>(users[i].edge_id)].push_back(static_cast<std::int64_t>(i));
    }

    for (const Edge& e : s.edges()) {
        auto& members = on_edge[static_cast<std::size_t>(e.id)];
        std::sort(members.begin(), members.end(), [&](std::int64_t a, std::int64_t b) {
            return users[static_cast<std::size_t>(a)].offset_km <
                   users[static_cast<std::size_t>(b)].offset_km;
        });
        for (std::size_t i = 0; i < members.size(); ++i) {
            const double oi = users[static_cast<std::size_t>(members[i])].offset_km;
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                if (users[static_cast<std::size_t>(members[j])].offset_km - oi > range_km) break;
                link(members[i], members[j]);
            }
        }

        const std::int64_t na = vertex_node[static_cast<std::size_t>(e.a)];
        const std::int64_t nb = vertex_node[static_cast<std::size_t>(e.b)];
        for (std::int64_t m : members) {
            const double offset = users[static_cast<std::size_t>(m)].offset_km;
            if (na >= 0 && offset <= range_km) link(m, na);
            if (nb >= 0 && e.length - offset <= range_km) link(m, nb);
        }
        if (na >= 0 && nb >= 0 && e.length <= range_km) link(na, nb);
    }
    return g;
}

ConnectivityGraph build_graph(const NetworkRealization& realization) {
    if (realization.streets == nullptr) throw DomainError("realization has no street system");
    return build_graph(*realization.streets, realization.users, realization.occupied_vertices,
                       realization.params.range_km);
}

}  // namespace d2drelay
