#include "d2drelay/percolation_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "d2drelay/errors.hpp"
#include "d2drelay/parallel.hpp"
#include "d2drelay/seeding.hpp"

namespace d2drelay {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

enum Side : std::uint8_t { left = 1, right = 2, bottom = 4, top = 8 };

std::uint8_t band_flags(Point p, const Window& w, double band) {
    std::uint8_t f = 0;
    if (p.x <= w.x_min + band) f |= left;
    if (p.x >= w.x_max - band) f |= right;
    if (p.y <= w.y_min + band) f |= bottom;
    if (p.y >= w.y_max - band) f |= top;
    return f;
}

bool crosses_lr(std::uint8_t f) { return (f & left) && (f & right); }
bool crosses_tb(std::uint8_t f) { return (f & bottom) && (f & top); }

}  // namespace

DisjointSet::DisjointSet(std::size_t count) : parent_(count), size_(count, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::find(std::size_t x) noexcept {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

std::size_t DisjointSet::unite(std::size_t a, std::size_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
}

Component largest_component(const ConnectivityGraph& g) {
    const std::size_t n = g.node_count();
    if (n == 0) return {};
    DisjointSet dsu(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::int64_t j : g.adjacency[i]) dsu.unite(i, static_cast<std::size_t>(j));
    }
    // Scanning ids upward and keeping strict improvements picks, among equal
    // sizes, the component whose smallest member comes first.
    std::size_t best_root = dsu.find(0);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t root = dsu.find(i);
        if (dsu.set_size(root) > dsu.set_size(best_root)) best_root = root;
    }
    Component c;
    c.size = dsu.set_size(best_root);
    c.members.reserve(c.size);
    for (std::size_t i = 0; i < n; ++i) {
        if (dsu.find(i) == best_root) c.members.push_back(static_cast<std::int64_t>(i));
    }
    return c;
}

void CrossingSpec::validate(const Window& window) const {
    if (!(contact_band_km > 0) ||
        !(contact_band_km < std::min(window.width(), window.height()) / 4.0)) {
        throw DomainError("contact band must satisfy 0 < band < window side / 4");
    }
}

CrossingSpec default_crossing_spec(double range_km, double gamma) {
    return CrossingSpec{CrossingDirection::left_right,
                        range_km > 0 ? range_km : mean_edge_length_for(gamma)};
}

bool crossing_indicator(const ConnectivityGraph& g, const Window& window, const CrossingSpec& spec) {
    spec.validate(window);
    const std::size_t n = g.node_count();
    DisjointSet dsu(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::int64_t j : g.adjacency[i]) dsu.unite(i, static_cast<std::size_t>(j));
    }
    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        flags[dsu.find(i)] |= band_flags(g.nodes[i].position, window, spec.contact_band_km);
    }
    bool lr = false;
    bool tb = false;
    for (std::size_t i = 0; i < n; ++i) {
        lr = lr || crosses_lr(flags[i]);
        tb = tb || crosses_tb(flags[i]);
    }
    switch (spec.direction) {
        case CrossingDirection::left_right: return lr;
        case CrossingDirection::top_bottom: return tb;
        case CrossingDirection::both: return lr && tb;
    }
    return false;
}

double critical_occupation_level(const StreetSystem& s, std::span<const User> users,
                                 const OccupationDraw& occupation, double range_km,
                                 const CrossingSpec& spec) {
    const Window& w = s.window();
    spec.validate(w);
    const std::size_t user_count = users.size();
    const std::size_t vertex_count = s.vertices().size();
    // Nodes: users first, then every vertex (activated when occupied).
    DisjointSet dsu(user_count + vertex_count);
    std::vector<std::uint8_t> flags(user_count + vertex_count, 0);
    for (std::size_t i = 0; i < user_count; ++i) {
        flags[i] = band_flags(users[i].position, w, spec.contact_band_km);
    }

    for (std::size_t i = 1; i < user_count; ++i) {
        if (users[i].edge_id < users[i - 1].edge_id ||
            (users[i].edge_id == users[i - 1].edge_id && users[i].offset_km < users[i - 1].offset_km)) {
            throw DomainError("users must be sorted by (edge, offset)");
        }
    }
    // Slice of users on each edge.
    std::vector<std::size_t> first(s.edges().size() + 1, user_count);
    for (std::size_t i = user_count; i-- > 0;) {
        first[static_cast<std::size_t>(users[i].edge_id)] = i;
    }
    for (std::size_t e = s.edges().size(); e-- > 0;) {
        first[e] = std::min(first[e], first[e + 1]);
    }

    auto merge = [&](std::size_t a, std::size_t b) {
        std::size_t ra = dsu.find(a);
        std::size_t rb = dsu.find(b);
        if (ra == rb) return ra;
        std::uint8_t f = flags[ra] | flags[rb];
        std::size_t root = dsu.unite(ra, rb);
        flags[root] = f;
        return root;
    };

    bool lr = false;
    bool tb = false;
    auto satisfied = [&] {
        switch (spec.direction) {
            case CrossingDirection::left_right: return lr;
            case CrossingDirection::top_bottom: return tb;
            case CrossingDirection::both: return lr && tb;
        }
        return false;
    };
    auto note = [&](std::size_t root) {
        lr = lr || crosses_lr(flags[root]);
        tb = tb || crosses_tb(flags[root]);
    };

    // Consecutive users on a street within range; connectivity equals that of
    // the all-pairs rule because offsets are sorted.
    for (std::size_t i = 0; i + 1 < user_count; ++i) {
        if (users[i].edge_id == users[i + 1].edge_id &&
            users[i + 1].offset_km - users[i].offset_km <= range_km) {
            note(merge(i, i + 1));
        }
    }
    for (std::size_t i = 0; i < user_count; ++i) note(dsu.find(i));
    if (satisfied()) return -inf;

    std::vector<std::int64_t> order;
    for (const Vertex& v : s.vertices()) {
        if (std::isfinite(occupation.uniforms[static_cast<std::size_t>(v.id)])) order.push_back(v.id);
    }
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        double ua = occupation.uniforms[static_cast<std::size_t>(a)];
        double ub = occupation.uniforms[static_cast<std::size_t>(b)];
        return ua != ub ? ua < ub : a < b;
    });

    std::vector<char> active(vertex_count, 0);
    for (std::int64_t v : order) {
        const auto vi = static_cast<std::size_t>(v);
        const std::size_t node = user_count + vi;
        active[vi] = 1;
        flags[node] = band_flags(s.vertex(v).position, w, spec.contact_band_km);
        std::size_t root = dsu.find(node);
        for (std::int64_t eid : s.incident_edges(v)) {
            const Edge& e = s.edge(eid);
            const auto ei = static_cast<std::size_t>(eid);
            const std::size_t lo = first[ei];
            const std::size_t hi = first[ei + 1];
            // Users within range of v are mutually within range, so linking
            // the nearest one is enough.
            if (lo < hi) {
                if (e.a == v && users[lo].offset_km <= range_km) root = merge(node, lo);
                if (e.b == v && e.length - users[hi - 1].offset_km <= range_km) {
                    root = merge(node, hi - 1);
                }
            }
            const std::int64_t other = e.a == v ? e.b : e.a;
            if (active[static_cast<std::size_t>(other)] && e.length <= range_km) {
                root = merge(node, user_count + static_cast<std::size_t>(other));
            }
        }
        note(root);
        if (satisfied()) return occupation.uniforms[vi];
    }
    return inf;
}

void PercolationSetup::validate() const {
    if (!(gamma > 0)) throw DomainError("gamma must be positive");
    NetworkParams{lambda_per_km, 0.0, range_km}.validate();
    window.validate();
    crossing_spec().validate(window);
}

CrossingSpec PercolationSetup::crossing_spec() const {
    return crossing ? *crossing : default_crossing_spec(range_km, gamma);
}

std::vector<double> replicate_levels(const PercolationSetup& setup, std::size_t replicates,
                                     std::uint64_t master_seed) {
    setup.validate();
    const CrossingSpec spec = setup.crossing_spec();
    std::vector<double> levels(replicates, inf);
    parallel_for(replicates, setup.threads, [&](std::size_t i) {
        StreetSystem streets =
            generate_pvt(setup.gamma, setup.window, derive_seed(master_seed, SeedStream::street, i));
        UserList users = sample_users(streets, setup.lambda_per_km,
                                      derive_seed(master_seed, SeedStream::users, i));
        OccupationDraw occupation =
            draw_occupation(streets, derive_seed(master_seed, SeedStream::occupation, i));
        levels[i] = critical_occupation_level(streets, users, occupation, setup.range_km, spec);
    });
    return levels;
}

namespace {

double binomial_se(double q, std::size_t n) {
    return n > 0 ? std::sqrt(q * (1.0 - q) / static_cast<double>(n)) : 0.0;
}

double fraction_below(std::span<const double> levels, double p) {
    if (levels.empty()) return 0.0;
    std::size_t hits = 0;
    for (double l : levels) hits += l < p ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(levels.size());
}

}  // namespace

CrossingEstimate crossing_probability(const PercolationSetup& setup, double p,
                                      std::size_t replicates, std::uint64_t master_seed) {
    if (!(p >= 0 && p <= 1)) throw DomainError("occupation probability must lie in [0, 1]");
    if (replicates < 1) throw DomainError("at least one replicate is required");
    auto levels = replicate_levels(setup, replicates, master_seed);
    double q = fraction_below(levels, p);
    return {q, binomial_se(q, replicates), replicates};
}

std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) throw DomainError("values and weights differ in size");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            double w = a.weight + b.weight;
            a.mean = w > 0 ? (a.mean * a.weight + b.mean * b.weight) / w : 0.5 * (a.mean + b.mean);
            a.weight = w;
            a.count += b.count;
        }
    }
    std::vector<double> fitted;
    fitted.reserve(values.size());
    for (const Block& b : blocks) fitted.insert(fitted.end(), b.count, b.mean);
    return fitted;
}

std::optional<double> half_crossing(std::span<const double> ps, std::span<const double> fitted) {
    for (std::size_t k = 0; k < fitted.size(); ++k) {
        if (fitted[k] >= 0.5) {
            if (k == 0) return ps[0];
            double f0 = fitted[k - 1];
            double f1 = fitted[k];
            return ps[k - 1] + (0.5 - f0) / (f1 - f0) * (ps[k] - ps[k - 1]);
        }
    }
    return std::nullopt;
}

namespace {

struct SweepFit {
    std::vector<double> crossing;
    std::vector<double> fitted;
};

SweepFit fit_sweep(std::span<const double> ps, std::span<const double> levels) {
    SweepFit s;
    for (double p : ps) s.crossing.push_back(fraction_below(levels, p));
    std::vector<double> weights(ps.size(), static_cast<double>(levels.size()));
    s.fitted = isotonic_fit(s.crossing, weights);
    return s;
}

double threshold_from_fit(std::span<const double> ps, const SweepFit& fit) {
    if (fit.fitted.front() > 0.5) return 0.0;
    return half_crossing(ps, fit.fitted).value_or(1.0);
}

}  // namespace

PercolationEstimate estimate_p_star(const PercolationSetup& setup, std::size_t replicates_per_point,
                                    std::uint64_t master_seed, const EstimateOptions& options) {
    setup.validate();
    if (replicates_per_point < 1) throw DomainError("at least one replicate is required");
    const double expected_vertices =
        setup.gamma * setup.gamma / 2.0 * setup.window.interior_area();
    if (expected_vertices < options.min_expected_vertices) {
        throw FiniteSizeError("window too small for a percolation estimate: about " +
                              std::to_string(static_cast<long>(expected_vertices)) +
                              " crossroads expected, need " +
                              std::to_string(static_cast<long>(options.min_expected_vertices)));
    }

    PercolationEstimate est;
    est.window = setup.window;
    est.lambda_per_km = setup.lambda_per_km;
    est.range_km = setup.range_km;
    est.gamma = setup.gamma;
    est.replicate_levels = replicate_levels(setup, replicates_per_point, master_seed);
    const auto& levels = est.replicate_levels;

    std::vector<double> ps;
    for (int k = 0; k <= 10; ++k) ps.push_back(k / 10.0);
    SweepFit coarse = fit_sweep(ps, levels);
    est.always_percolates = coarse.fitted.front() > 0.5;
    est.never_percolates = coarse.fitted.back() < 0.5;

    if (!est.always_percolates && !est.never_percolates) {
        auto k = static_cast<std::size_t>(
            std::find_if(coarse.fitted.begin(), coarse.fitted.end(), [](double f) { return f >= 0.5; }) -
            coarse.fitted.begin());
        if (k > 0) {
            double lo = ps[k - 1];
            double step = (ps[k] - lo) / 8.0;
            for (int j = 1; j <= 7; ++j) ps.push_back(lo + j * step);
            std::sort(ps.begin(), ps.end());
        }
    }

    SweepFit fine = fit_sweep(ps, levels);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        est.crossing_curve.push_back({ps[i], fine.crossing[i],
                                      binomial_se(fine.crossing[i], levels.size()), levels.size()});
    }

    if (est.always_percolates) {
        est.p_star_hat = 0.0;
    } else if (est.never_percolates) {
        est.p_star_hat = 1.0;
    } else {
        est.p_star_hat = threshold_from_fit(ps, fine);
    }

    if (options.bootstrap_resamples > 1 && !est.always_percolates && !est.never_percolates) {
        boost::random::mt19937_64 rng(derive_seed(master_seed, SeedStream::bootstrap));
        boost::random::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
        std::vector<double> resample(levels.size());
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t b = 0; b < options.bootstrap_resamples; ++b) {
            for (double& l : resample) l = levels[pick(rng)];
            double t = threshold_from_fit(ps, fit_sweep(ps, resample));
            sum += t;
            sum_sq += t * t;
        }
        double n = static_cast<double>(options.bootstrap_resamples);
        double mean = sum / n;
        est.std_error = std::sqrt(std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)));
    }
    return est;
}

}  // namespace d2drelay
