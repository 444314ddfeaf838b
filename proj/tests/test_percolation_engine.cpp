#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "d2drelay/errors.hpp"
#include "d2drelay/percolation_engine.hpp"
#include "d2drelay/seeding.hpp"

using namespace d2drelay;

namespace {

ConnectivityGraph random_graph(std::size_t n, double link_prob, std::mt19937_64& rng,
                               const Window& w = Window::square(1.0)) {
    ConnectivityGraph g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.push_back({NodeKind::user, static_cast<std::int64_t>(i),
                           {w.x_min + u(rng) * w.width(), w.y_min + u(rng) * w.height()}});
    }
    g.adjacency.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (u(rng) < link_prob) {
                g.adjacency[i].push_back(static_cast<std::int64_t>(j));
                g.adjacency[j].push_back(static_cast<std::int64_t>(i));
            }
        }
    }
    return g;
}

std::vector<std::vector<std::size_t>> bfs_components(const ConnectivityGraph& g) {
    std::vector<int> seen(g.node_count(), 0);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> comp;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            std::size_t x = q.front();
            q.pop();
            comp.push_back(x);
            for (std::int64_t y : g.adjacency[x]) {
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    q.push(static_cast<std::size_t>(y));
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(comp);
    }
    return out;
}

bool oracle_crossing(const ConnectivityGraph& g, const Window& w, double band, bool horizontal) {
    for (const auto& comp : bfs_components(g)) {
        bool lo = false, hi = false;
        for (std::size_t i : comp) {
            Point p = g.nodes[i].position;
            double c = horizontal ? p.x : p.y;
            double cmin = horizontal ? w.x_min : w.y_min, cmax = horizontal ? w.x_max : w.y_max;
            lo = lo || c <= cmin + band;
            hi = hi || c >= cmax - band;
        }
        if (lo && hi) return true;
    }
    return false;
}

PercolationSetup base_setup(double lambda, double r, double side = 5.0) {
    PercolationSetup s;
    s.gamma = 20.0;
    s.lambda_per_km = lambda;
    s.range_km = r;
    s.window = Window::square(side, r + mean_edge_length_for(20.0));
    return s;
}

}  // namespace

TEST_CASE("disjoint set") {
    DisjointSet d(6);
    d.unite(0, 1);
    d.unite(2, 3);
    d.unite(1, 3);
    CHECK(d.find(0) == d.find(2));
    CHECK(d.set_size(3) == 4);
    CHECK(d.find(4) != d.find(5));
    CHECK(d.element_count() == 6);
}

TEST_CASE("largest component") {
    CHECK(largest_component(ConnectivityGraph{}).size == 0);

    ConnectivityGraph two;
    for (int i = 0; i < 6; ++i) two.nodes.push_back({NodeKind::user, i, {0.0, 0.0}});
    two.adjacency = {{1, 2}, {0, 2}, {0, 1}, {4, 5}, {3, 5}, {3, 4}};
    Component c = largest_component(two);
    CHECK(c.size == 3);
    CHECK(c.members == std::vector<std::int64_t>{0, 1, 2});

    std::mt19937_64 rng(1);
    for (int inst = 0; inst < 50; ++inst) {
        std::size_t n = 1 + rng() % 1000;
        ConnectivityGraph g = random_graph(n, 1.2 / static_cast<double>(n), rng);
        auto comps = bfs_components(g);
        std::size_t best = 0;
        for (std::size_t i = 1; i < comps.size(); ++i) {
            if (comps[i].size() > comps[best].size() ||
                (comps[i].size() == comps[best].size() && comps[i][0] < comps[best][0])) {
                best = i;
            }
        }
        Component lc = largest_component(g);
        REQUIRE(lc.size == comps[best].size());
        std::vector<std::int64_t> expect(comps[best].begin(), comps[best].end());
        CHECK(lc.members == expect);
    }
}

TEST_CASE("crossing indicator") {
    Window w = Window::square(2.0);
    CrossingSpec lr{CrossingDirection::left_right, 0.2};
    CHECK_FALSE(crossing_indicator(ConnectivityGraph{}, w, lr));

    // A chain of users along y = 1 spanning the window.
    ConnectivityGraph chain;
    for (int i = 0; i <= 20; ++i) chain.nodes.push_back({NodeKind::user, i, {0.1 * i, 1.0}});
    chain.adjacency.assign(chain.nodes.size(), {});
    for (int i = 0; i < 20; ++i) {
        chain.adjacency[i].push_back(i + 1);
        chain.adjacency[i + 1].push_back(i);
    }
    CHECK(crossing_indicator(chain, w, lr));
    CHECK_FALSE(crossing_indicator(chain, w, {CrossingDirection::top_bottom, 0.2}));
    CHECK_FALSE(crossing_indicator(chain, w, {CrossingDirection::both, 0.2}));
    CHECK_THROWS_AS(lr.validate(Window::square(0.5)), DomainError);

    std::mt19937_64 rng(2);
    int positives = 0;
    for (int inst = 0; inst < 100; ++inst) {
        std::size_t n = 20 + rng() % 200;
        ConnectivityGraph g = random_graph(n, 1.5 / static_cast<double>(n), rng, w);
        bool h = oracle_crossing(g, w, 0.2, true), v = oracle_crossing(g, w, 0.2, false);
        CHECK(crossing_indicator(g, w, {CrossingDirection::left_right, 0.2}) == h);
        CHECK(crossing_indicator(g, w, {CrossingDirection::top_bottom, 0.2}) == v);
        CHECK(crossing_indicator(g, w, {CrossingDirection::both, 0.2}) == (h && v));
        positives += h ? 1 : 0;
    }
    CHECK(positives > 5);
    CHECK(positives < 95);
}

TEST_CASE("critical level agrees with explicit graphs") {
    for (int rep = 0; rep < 8; ++rep) {
        const double r = rep % 2 ? 0.2 : 0.08;
        const double lambda = 15.0 * rep;
        Window w = Window::square(2.5, r + mean_edge_length_for(20.0));
        StreetSystem s = generate_pvt(20.0, w, 40 + rep);
        UserList users = sample_users(s, lambda, 41 + rep);
        OccupationDraw draw = draw_occupation(s, 42 + rep);
        CrossingSpec spec = default_crossing_spec(r, 20.0);
        double level = critical_occupation_level(s, users, draw, r, spec);
        for (double p = 0.0; p <= 1.0001; p += 0.05) {
            ConnectivityGraph g = build_graph(s, users, draw.occupied_at(p), r);
            CHECK(crossing_indicator(g, w, spec) == (level < p));
        }
        if (std::isfinite(level)) {
            // Straddle the exact level.
            auto at = [&](double p) { return crossing_indicator(build_graph(s, users, draw.occupied_at(p), r), w, spec); };
            CHECK_FALSE(at(level));
            CHECK(at(std::nextafter(level, 2.0)));
        }
    }
}

TEST_CASE("crossing probability extremes") {
    PercolationSetup empty = base_setup(0.0, 0.2);
    CHECK(crossing_probability(empty, 0.0, 10, 1).probability == 0.0);
    PercolationSetup dense = base_setup(200.0, 0.2);
    CrossingEstimate full = crossing_probability(dense, 1.0, 20, 1);
    CHECK(full.probability >= 0.95);
    CHECK(full.replicates == 20);
}

TEST_CASE("coupled monotonicity in p, lambda and r") {
    const std::size_t n = 12;
    auto base = replicate_levels(base_setup(10.0, 0.1, 3.0), n, 77);
    // More users: same streets and occupation, superset of users.
    auto more_users = replicate_levels(base_setup(40.0, 0.1, 3.0), n, 77);
    PercolationSetup wider = base_setup(10.0, 0.15, 3.0);
    wider.window = base_setup(10.0, 0.1, 3.0).window;
    wider.crossing = default_crossing_spec(0.1, 20.0);
    PercolationSetup narrow = base_setup(10.0, 0.1, 3.0);
    narrow.crossing = default_crossing_spec(0.1, 20.0);
    auto narrow_levels = replicate_levels(narrow, n, 77);
    auto wider_levels = replicate_levels(wider, n, 77);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(more_users[i] <= base[i]);
        CHECK(wider_levels[i] <= narrow_levels[i]);
    }
    // Monotone in p: crossing fraction is a CDF of the levels.
    PercolationSetup setup = base_setup(30.0, 0.2, 3.0);
    double prev = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.1) {
        double c = crossing_probability(setup, p, 10, 5).probability;
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("isotonic fit and half crossing") {
    std::vector<double> y{1, 3, 2, 4}, w{1, 1, 1, 1};
    auto f = isotonic_fit(y, w);
    CHECK(f == std::vector<double>{1, 2.5, 2.5, 4});
    std::vector<double> y2{0.0, 0.6, 0.2, 1.0}, w2{1, 1, 3, 1};
    auto f2 = isotonic_fit(y2, w2);
    CHECK(f2[1] == doctest::Approx(0.3));
    CHECK(f2[2] == doctest::Approx(0.3));

    std::vector<double> ps{0.0, 0.5, 1.0}, fit{0.0, 0.25, 0.75};
    auto h = half_crossing(ps, fit);
    REQUIRE(h);
    CHECK(*h == doctest::Approx(0.75));
    std::vector<double> low{0.0, 0.1, 0.2};
    CHECK_FALSE(half_crossing(ps, low));
}

TEST_CASE("estimator flags and refusals") {
    PercolationEstimate none = estimate_p_star(base_setup(45.0, 0.0), 5, 1);
    CHECK(none.never_percolates);
    CHECK(none.p_star_hat == 1.0);

    CHECK_THROWS_AS(estimate_p_star(base_setup(45.0, 0.2, 1.5), 5, 1), FiniteSizeError);
    CHECK_THROWS_AS(estimate_p_star(base_setup(-1.0, 0.2), 5, 1), DomainError);
}

TEST_CASE("estimate is deterministic and thread independent") {
    PercolationSetup one = base_setup(45.0, 0.2, 3.5);
    one.threads = 1;
    PercolationSetup many = one;
    many.threads = 4;
    PercolationEstimate a = estimate_p_star(one, 20, 9);
    PercolationEstimate b = estimate_p_star(many, 20, 9);
    CHECK(a.p_star_hat == b.p_star_hat);
    CHECK(a.std_error == b.std_error);
    CHECK(a.replicate_levels == b.replicate_levels);
    REQUIRE(a.crossing_curve.size() == b.crossing_curve.size());
    for (std::size_t i = 0; i < a.crossing_curve.size(); ++i) {
        CHECK(a.crossing_curve[i].crossing_prob == b.crossing_curve[i].crossing_prob);
    }
    CHECK(a.crossing_curve.size() == 18);
    for (const auto& c : a.crossing_curve) {
        CHECK(c.crossing_prob >= 0.0);
        CHECK(c.crossing_prob <= 1.0);
    }
}

TEST_CASE("users lower the threshold") {
    PercolationEstimate sparse = estimate_p_star(base_setup(20.0, 0.05), 30, 4);
    PercolationEstimate dense = estimate_p_star(base_setup(100.0, 0.05), 30, 4);
    CHECK(dense.p_star_hat < sparse.p_star_hat);
}

TEST_CASE("threshold is stable across window sizes") {
    PercolationEstimate a = estimate_p_star(base_setup(45.0, 0.2, 5.0), 50, 21);
    PercolationEstimate b = estimate_p_star(base_setup(45.0, 0.2, 7.0), 50, 22);
    INFO("5 km: " << a.p_star_hat << " +- " << a.std_error << ", 7 km: " << b.p_star_hat << " +- " << b.std_error);
    CHECK(std::abs(a.p_star_hat - b.p_star_hat) < 2 * (a.std_error + b.std_error) + 0.02);
}
