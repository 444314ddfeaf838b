#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "d2drelay/econo_model.hpp"
#include "d2drelay/scenario_config.hpp"

using namespace d2drelay;

TEST_CASE("grids") {
    CHECK(parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
    CHECK(parse_grid("5, 10,20") == std::vector<double>{5, 10, 20});
    CHECK(parse_grid("0:100:5").size() == 21);
    CHECK(parse_grid("3") == std::vector<double>{3});
    CHECK_THROWS(parse_grid(""));
    CHECK_THROWS(parse_grid("1:0:1"));
    CHECK_THROWS(parse_grid("0:1:0"));
    CHECK_THROWS(parse_grid("a,b"));
}

TEST_CASE("empty sections take defaults") {
    ScenarioConfig c = parse_config("[economics]\n[street]\n");
    CostScenario d;
    CHECK(c.economics.c_capex == d.c_capex);
    CHECK(c.economics.eta == d.eta);
    CHECK(c.economics.t_dep == 84);
    CHECK(c.economics.p_max == 0.2);
    CHECK(c.street.gamma == 20.0);
    CHECK(c.network.range_km == 0.2);
    CHECK(c.percolation.replicates == 50);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("values, comments and names") {
    ScenarioConfig c = parse_config(R"(
# scenario
[street]
gamma = 15      ; inline comment
width_km = 6
[network]
lambda = 30
range_km = 0.05
[crossroad]
surface = triangle
[percolation]
direction = both
contact_band_km = 0.1
seed = 123456789012
[economics]
remainder = spread
opex_stock = start_of_month
tuning_check = true
)");
    CHECK(c.street.gamma == 15.0);
    CHECK(c.street.width_km == 6.0);
    CHECK(c.network.lambda_per_km == 30.0);
    CHECK(c.crossroad.surface == SurfaceKind::triangle);
    CHECK(c.percolation.direction == CrossingDirection::both);
    CHECK(c.percolation.seed == 123456789012ULL);
    CHECK(c.economics.remainder == RemainderRule::spread);
    CHECK(c.economics.opex_stock == OpexStock::start_of_month);
    CHECK(c.economics_tuning_check);
    PercolationSetup s = c.percolation_setup();
    CHECK(s.crossing_spec().contact_band_km == 0.1);
    CHECK(c.window().margin == doctest::Approx(0.05 + mean_edge_length_for(15.0)));
}

TEST_CASE("parse errors carry line numbers") {
    auto line_of = [](const char* text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("[street]\ngamma = 1\ngamma = 2\n") == 3);
    CHECK(line_of("[street]\nbogus = 1\n") == 2);
    CHECK(line_of("[nowhere]\n") == 1);
    CHECK(line_of("gamma = 1\n") == 1);
    CHECK(line_of("[street]\ngamma = abc\n") == 2);
    CHECK(line_of("[street]\ngamma\n") == 2);
    CHECK(line_of("[crossroad]\nsurface = square\n") == 2);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("constraint violations are listed together") {
    ScenarioConfig c = parse_config("[economics]\np_min = 0.3\np_max = 0.2\n[network]\nlambda = -1\n");
    try {
        c.validate();
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() == 2);
        bool found = false;
        for (const auto& v : e.violations()) found = found || v.find("p_min <= p_max") != std::string::npos;
        CHECK(found);
    }
    ScenarioConfig g = parse_config("[crossroad]\np_grid = 0:2:0.5\n");
    CHECK_THROWS_AS(g.validate(), ValidationError);
}

TEST_CASE("resolved text round-trips") {
    ScenarioConfig c = parse_config("[network]\nrange_km = 0.1\n[street]\nmargin_km = 0.3\n[economics]\neta = 0.125\n");
    std::string text = c.to_ini();
    ScenarioConfig back = parse_config(text);
    CHECK(back.to_ini() == text);
    CHECK(back.network.range_km == 0.1);
    CHECK(back.street.margin_km == 0.3);
    CHECK(back.economics.eta == 0.125);

    auto path = std::filesystem::temp_directory_path() / "d2drelay_roundtrip.ini";
    {
        std::ofstream out(path);
        out << text;
    }
    CHECK(load_config(path).to_ini() == text);
    std::filesystem::remove(path);
}
