// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Optional argument: path of the d2drelay executable for the command
// determinism part of criterion 7.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "d2drelay/econo_model.hpp"
#include "d2drelay/relay_planner.hpp"
#include "d2drelay/street_geometry.hpp"
#include "oracles.hpp"

using namespace d2drelay;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t acceptance_seed = 20240601;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + ("FAILED " + what);
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PercolationSetup reference_setting(double lambda, double r, double side = 5.0) {
    PercolationSetup s;
    s.gamma = 20.0;
    s.lambda_per_km = lambda;
    s.range_km = r;
    s.window = Window::square(side, r + mean_edge_length_for(20.0));
    return s;
}

Outcome geometry_oracle() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(acceptance_seed);
    double worst = 0.0;
    const CrossroadGeometry tri{20.0, SurfaceKind::triangle};
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    for (int i = 0; i < 1000; ++i) {
        auto [a, b] = oracle::uniform_domain(rng);
        oracle::Crossroad k = oracle::build_crossroad(a, b, 20.0);
        CrossroadAngles ang{a, b};
        SideLengths s = side_lengths(tri, ang);
        worst = std::max({worst, rel(triangle_surface(tri, ang), k.area),
                          rel(circumcircle_surface(tri, ang), k.circle_area), rel(s.ab, k.ab),
                          rel(s.bc, k.bc), rel(s.ca, k.ca)});
    }
    CrossroadAngles eq;
    double s_eq = triangle_surface(tri, eq), c_eq = circumcircle_surface(tri, eq);
    double secs = seconds_since(t0);
    o.require(worst <= 1e-9, "oracle agreement");
    o.require(std::abs(s_eq - 100 * std::sqrt(3.0)) <= 1e-9 * s_eq, "equilateral triangle");
    o.require(std::abs(c_eq - 400 * oracle::pi / 3) <= 1e-9 * c_eq, "equilateral circle");
    o.require(secs < 1.0, "runtime");
    o.note("max rel err " + num(worst, 3) + ", S=" + num(s_eq, 10) + ", S'=" + num(c_eq, 10) + ", " +
           num(secs, 3) + " s");
    return o;
}

Outcome density_and_vacancy() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    double norm = density_normalization();
    o.require(std::abs(norm - 1.0) <= 1e-6, "normalization");
    o.note("integral f = " + num(norm, 12));

    // One set of 10^6 angle pairs drawn from the density, reused for each lambda.
    const std::size_t n = 1000000;
    std::mt19937_64 rng(acceptance_seed + 1);
    std::vector<double> tri_area(n), circ_area(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = oracle::sample_angles(rng);
        oracle::Crossroad k = oracle::build_crossroad(a, b, 20.0);
        tri_area[i] = k.area;
        circ_area[i] = k.circle_area;
    }
    for (double lam : {10.0, 30.0, 60.0}) {
        for (bool circle : {false, true}) {
            const auto& area = circle ? circ_area : tri_area;
            double per_m2 = lam / 1000.0 / 20.0, sum = 0, sum2 = 0;
            for (double s : area) {
                double v = std::exp(-per_m2 * s);
                sum += v;
                sum2 += v * v;
            }
            double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
            double q = mean_vacancy(lam, {20.0, circle ? SurfaceKind::circumcircle : SurfaceKind::triangle});
            double z = (q - mean) / se;
            o.require(std::abs(z) <= 3.0, "MC lambda=" + num(lam) + (circle ? " circle" : " triangle"));
            o.note("E(" + num(lam) + (circle ? ",circ)=" : ",tri)=") + num(q, 6) + " z=" + num(z, 2));
        }
    }
    double secs = seconds_since(t0);
    o.require(secs < 30.0, "runtime");
    o.note(num(secs, 3) + " s");
    return o;
}

Outcome street_statistics() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    double v = 0, l = 0;
    const int seeds = 20;
    for (int i = 0; i < seeds; ++i) {
        StreetStats st = street_stats(generate_pvt(20.0, Window::square(10.0, 0.3), acceptance_seed + 100 + i));
        v += st.vertex_intensity_hat;
        l += st.length_intensity_hat;
    }
    v /= seeds;
    l /= seeds;
    double secs = seconds_since(t0);
    o.require(std::abs(v / 200.0 - 1.0) <= 0.02, "vertex intensity");
    o.require(std::abs(l / 20.0 - 1.0) <= 0.02, "length intensity");
    o.require(secs < 60.0, "runtime");
    o.note("vertices/km2=" + num(v, 5) + ", km/km2=" + num(l, 5) + ", " + num(secs, 3) + " s");
    return o;
}

struct Shared {
    PercolationEstimate main;  // lambda = 45, r = 200 m
    std::vector<RelayCurveRow> r200;
    std::vector<RelayCurveRow> r50;
};

Outcome percolation_threshold(Shared& shared) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    shared.main = estimate_p_star(reference_setting(45.0, 0.2), 50, acceptance_seed);
    double secs = seconds_since(t0);
    const auto& e = shared.main;
    o.require(!e.never_percolates && !e.always_percolates, "flags");
    o.require(std::abs(e.p_star_hat - 0.713) <= 0.03, "p* band");
    o.require(secs < 900.0, "runtime");
    o.note("p*=" + num(e.p_star_hat, 4) + " se=" + num(e.std_error, 2) + ", " + num(secs, 3) + " s");
    return o;
}

Outcome relay_proportion(Shared& shared) {
    Outcome o;
    RelayPlan at45 = minimal_relay_proportion(shared.main, {20.0, SurfaceKind::circumcircle});
    o.require(std::abs(at45.p_c_hat - 0.20) <= 0.03, "p_c(45, 200 m, circle)");
    o.note("p_c(45,200m,circ)=" + num(at45.p_c_hat, 4));

    RelayCurveSetup setup;
    setup.replicates = 50;
    setup.seed = acceptance_seed;
    setup.percolation = reference_setting(0.0, 0.05);
    std::vector<double> grid;
    for (double lam = 40.0; lam <= 80.0; lam += 2.5) grid.push_back(lam);
    shared.r50 = relay_curve(grid, setup);
    double first_zero = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : shared.r50) {
        if (row.p_c_circle == 0.0) {
            first_zero = row.lambda_per_km;
            break;
        }
    }
    o.require(std::abs(first_zero - 60.0) <= 10.0, "r=50 m zero crossing");
    o.note("r=50m p_c_circ first 0 at lambda=" + num(first_zero));

    setup.percolation = reference_setting(0.0, 0.2);
    std::vector<double> high{80.0, 90.0, 100.0};
    shared.r200 = relay_curve(high, setup);
    for (const auto& row : shared.r200) {
        double ratio = row.p_c_circle > 0 ? row.p_c_triangle / row.p_c_circle
                                           : (row.p_c_triangle > 0 ? std::numeric_limits<double>::infinity() : 1.0);
        o.require(ratio >= 2.0, "triangle/circle ratio at lambda=" + num(row.lambda_per_km));
        o.note("lambda=" + num(row.lambda_per_km) + " tri=" + num(row.p_c_triangle, 3) + " circ=" +
               num(row.p_c_circle, 3));
    }
    return o;
}

Outcome economics() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    CostScenario sc;
    CashFlowSeries s = cumulated_revenue(sc);
    o.require(s.roi_month && std::abs(*s.roi_month - 43) <= 3, "ROI month");
    o.note("roi_month=" + (s.roi_month ? std::to_string(*s.roi_month) : std::string("never")));

    DeploymentSchedule d = deployment_schedule(sc);
    double cr = 0.0, capex = 0.0;
    long bought = 0;
    bool telescoping = true;
    for (const auto& r : s.rows) {
        cr += r.terms.cash_flow;
        telescoping = telescoping && r.cumulated == cr &&
                      r.terms.cash_flow == cash_flow(r.month, sc, d);
        capex += r.terms.capex;
        bought += r.bought;
    }
    long scheduled = 0;
    for (const auto& m : d.months) scheduled += m.bought;
    o.require(telescoping, "CR telescoping");
    o.require(capex == static_cast<double>(bought) * sc.c_capex && bought == scheduled &&
                  d.at(sc.t_critical).stock == d.full_fleet,
              "CAPEX conservation");

    double lam30 = user_density(30, sc);
    o.require(std::abs(lam30 - 43.0) <= 0.5, "lambda(30)");
    o.note("lambda(30)=" + num(lam30, 5));

    // Inside a replacement cycle at saturation.
    const MonthPurchases& m = d.at(100);
    double steady = cash_flow_terms(sc.adoption.limit(), m.bought, m.stock, sc).cash_flow;
    o.require(steady == 60800.0, "steady-state CF");
    o.note("steady CF=" + num(steady, 8));
    double secs = seconds_since(t0);
    o.require(secs < 1.0, "runtime");
    o.note(num(secs, 3) + " s");
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

bool cli_deterministic(const std::string& cli, std::string& report) {
    const fs::path base = fs::temp_directory_path() / "d2drelay_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    {
        std::ofstream cfg(base / "small.ini");
        cfg << "[street]\nwidth_km = 3\nheight_km = 3\n[percolation]\nreplicates = 10\nlambda_grid = 0,45,90\n"
               "[crossroad]\nlambda_grid = 0:100:25\n";
    }
    struct Cmd {
        std::string name, extra;
        std::vector<std::string> files;
    };
    std::vector<Cmd> cmds{
        {"occupation", "", {"occupation.csv"}},
        {"pstar", "", {"crossing_curve.csv", "summary.txt"}},
        {"relay-curve", "", {"relay_curve.csv"}},
        {"econ", "", {"cash_flow.csv", "summary.txt"}},
        {"dump-streets", " --dump-network",
         {"vertices.csv", "edges.csv", "network_nodes.csv", "network_links.csv"}},
    };
    bool ok = true;
    for (const auto& c : cmds) {
        for (const char* run : {"a", "b"}) {
            fs::path out = base / (c.name + run);
            std::string cmd = "\"" + cli + "\" " + c.name + " --config \"" + (base / "small.ini").string() +
                              "\" --seed 17 --out \"" + out.string() + "\"" + c.extra + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) {
                report += c.name + " failed to run; ";
                ok = false;
            }
        }
        for (const auto& f : c.files) {
            std::string a = slurp(base / (c.name + "a") / f), b = slurp(base / (c.name + "b") / f);
            if (a.empty() || a != b) {
                report += c.name + "/" + f + " differs; ";
                ok = false;
            }
        }
    }
    fs::remove_all(base);
    return ok;
}

Outcome properties(const Shared& shared, const std::string& cli) {
    Outcome o;
    // Coupled monotonicity via per-replicate critical levels.
    const std::size_t n = 20;
    auto lv = [&](double lam, double r, std::optional<CrossingSpec> spec) {
        PercolationSetup s = reference_setting(lam, 0.1, 3.0);
        s.range_km = r;
        s.crossing = spec;
        return replicate_levels(s, n, acceptance_seed + 7);
    };
    CrossingSpec fixed = default_crossing_spec(0.1, 20.0);
    auto base = lv(20.0, 0.1, fixed), more_users = lv(60.0, 0.1, fixed), longer = lv(20.0, 0.15, fixed);
    bool mono = true;
    for (std::size_t i = 0; i < n; ++i) mono = mono && more_users[i] <= base[i] && longer[i] <= base[i];
    // In p: the crossing curve of a coupled sweep never decreases.
    const auto& curve = shared.main.crossing_curve;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        if (curve[i].p >= curve[i - 1].p) mono = mono && curve[i].crossing_prob >= curve[i - 1].crossing_prob;
    }
    o.require(mono, "coupled monotonicity");

    double worst_roundtrip = 0.0;
    bool bounds = true;
    for (double lam = 0.0; lam <= 100.0; lam += 5.0) {
        for (double p = 0.0; p <= 1.0; p += 0.05) {
            for (auto kind : {SurfaceKind::triangle, SurfaceKind::circumcircle}) {
                CrossroadGeometry g{20.0, kind};
                double f = occupation_probability({lam, p, g});
                bounds = bounds && f >= p - 1e-15 && f <= 1.0;
                worst_roundtrip = std::max(worst_roundtrip, std::abs(invert_for_relay_fraction(f, lam, g) - p));
            }
        }
    }
    o.require(bounds, "F in [p,1]");
    o.require(worst_roundtrip <= 1e-12, "affine roundtrip");
    o.note("roundtrip err " + num(worst_roundtrip, 2));

    bool ordered = true;
    for (const auto* rows : {&shared.r50, &shared.r200}) {
        for (const auto& r : *rows) ordered = ordered && r.p_c_circle <= r.p_c_triangle && r.p_c_triangle <= r.p_star;
    }
    o.require(ordered, "p_c ordering");

    PercolationEstimate again = estimate_p_star(reference_setting(45.0, 0.2, 3.0), 10, 5);
    PercolationEstimate twice = estimate_p_star(reference_setting(45.0, 0.2, 3.0), 10, 5);
    bool same = again.p_star_hat == twice.p_star_hat && again.replicate_levels == twice.replicate_levels &&
                generate_pvt(20.0, Window::square(3.0), 5) == generate_pvt(20.0, Window::square(3.0), 5);
    if (!cli.empty()) {
        std::string report;
        same = cli_deterministic(cli, report) && same;
        if (!report.empty()) o.note(report);
        o.note("commands re-run byte-identical");
    } else {
        o.note("command re-runs skipped (no executable given)");
    }
    o.require(same, "determinism");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    Shared shared;
    struct Item {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    std::vector<Item> items{
        {1, "geometry oracle equivalence", geometry_oracle},
        {2, "density normalization and vacancy quadrature", density_and_vacancy},
        {3, "street-system statistics", street_statistics},
        {4, "percolation threshold", [&] { return percolation_threshold(shared); }},
        {5, "relay proportion", [&] { return relay_proportion(shared); }},
        {6, "economics", economics},
        {7, "property suites", [&] { return properties(shared, cli); }},
    };
    int failures = 0;
    for (const auto& item : items) {
        Outcome o;
        try {
            o = item.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", item.id, item.title, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failures, items.size());
    return failures == 0 ? 0 : 1;
}
