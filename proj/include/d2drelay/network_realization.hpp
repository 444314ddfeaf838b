#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "d2drelay/street_geometry.hpp"

namespace d2drelay {

struct NetworkParams {
    double lambda_per_km = 0.0;  // users per km of street
    double occupation_p = 0.0;   // Bernoulli mark per crossroad
    double range_km = 0.0;       // line-of-sight communication range

    void validate() const;
};

struct User {
    std::int64_t edge_id = 0;
    double offset_km = 0.0;  // arc length from the edge's `a` endpoint
    Point position;
    // Intensity level at which the user appears. Users of the sample at
    // intensity lambda are exactly those with mark <= lambda.
    double intensity_mark = 0.0;

    friend bool operator==(const User&, const User&) = default;
};

/// Users ordered by (edge_id, offset_km).
using UserList = std::vector<User>;

/// Cox users on the street system: Poisson(lambda * length) users per edge,
/// uniform along it. Samples for different lambda under one seed are nested.
UserList sample_users(const StreetSystem& s, double lambda_per_km, std::uint64_t seed);

/// Users of `users` present at the lower intensity `lambda_per_km`.
UserList thin_users(const UserList& users, double lambda_per_km);

/// One uniform per vertex; crossroad v is occupied at level p iff u_v < p.
/// Non-crossroad vertices carry +infinity and are never occupied.
struct OccupationDraw {
    std::vector<double> uniforms;

    bool occupied(std::int64_t vertex_id, double p) const {
        return uniforms[static_cast<std::size_t>(vertex_id)] < p;
    }
    std::vector<std::int64_t> occupied_at(double p) const;
};

OccupationDraw draw_occupation(const StreetSystem& s, std::uint64_t seed);

/// Ids of crossroads occupied independently with probability p (sorted).
std::vector<std::int64_t> sample_occupation(const StreetSystem& s, double p, std::uint64_t seed);

/// Sampled users and occupied crossroads on a street system. Holds a
/// non-owning pointer to the street system, which must outlive it.
struct NetworkRealization {
    const StreetSystem* streets = nullptr;
    NetworkParams params;
    UserList users;
    std::vector<std::int64_t> occupied_vertices;
};

/// Sub-seeds for the users and occupation streams derived from `seed`.
NetworkRealization realize_network(const StreetSystem& s, const NetworkParams& params,
                                   std::uint64_t seed);

enum class NodeKind : std::uint8_t { user, relay_vertex };

struct GraphNode {
    NodeKind kind = NodeKind::user;
    std::int64_t source = 0;  // index into the user list, or vertex id
    Point position;
};

/// Undirected line-of-sight graph. Users come first (in user-list order),
/// then occupied vertices in ascending id order.
struct ConnectivityGraph {
    std::vector<GraphNode> nodes;
    std::vector<std::vector<std::int64_t>> adjacency;

    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t link_count() const noexcept;
};

/// Links exactly the pairs that share a street and lie within `range_km`
/// of each other along it. An occupied vertex lies on all its streets.
ConnectivityGraph build_graph(const StreetSystem& s, std::span<const User> users,
                              std::span<const std::int64_t> occupied, double range_km);

ConnectivityGraph build_graph(const NetworkRealization& realization);

}  // namespace d2drelay
