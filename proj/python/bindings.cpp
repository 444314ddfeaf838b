#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "d2drelay/crossroad_model.hpp"
#include "d2drelay/econo_model.hpp"
#include "d2drelay/errors.hpp"
#include "d2drelay/percolation_engine.hpp"
#include "d2drelay/relay_planner.hpp"
#include "d2drelay/scenario_config.hpp"
#include "d2drelay/street_geometry.hpp"

namespace py = pybind11;
using namespace d2drelay;

namespace {

CrossroadGeometry geometry_of(double street_width_m, const std::string& surface) {
    CrossroadGeometry g{street_width_m, parse_surface_kind(surface)};
    g.validate();
    return g;
}

PercolationSetup setup_of(double gamma, double lambda_per_km, double range_km, double side_km,
                          std::optional<double> margin_km, unsigned threads) {
    PercolationSetup s;
    s.gamma = gamma;
    s.lambda_per_km = lambda_per_km;
    s.range_km = range_km;
    s.window = Window::square(side_km, margin_km ? *margin_km : range_km + mean_edge_length_for(gamma));
    s.threads = threads;
    return s;
}

py::dict estimate_dict(const PercolationEstimate& e) {
    py::list curve;
    for (const auto& c : e.crossing_curve) {
        curve.append(py::make_tuple(c.p, c.crossing_prob, c.std_error, c.replicates));
    }
    py::dict d;
    d["p_star"] = e.p_star_hat;
    d["std_error"] = e.std_error;
    d["never_percolates"] = e.never_percolates;
    d["always_percolates"] = e.always_percolates;
    d["crossing_curve"] = curve;
    d["lambda"] = e.lambda_per_km;
    d["range_km"] = e.range_km;
    return d;
}

CostScenario scenario_from(const py::kwargs& kw) {
    ScenarioConfig base;
    if (kw.size() == 0) return base.economics;
    std::string text = "[economics]\n";
    for (auto item : kw) {
        text += py::str(item.first).cast<std::string>() + " = " + py::str(item.second).cast<std::string>() + "\n";
    }
    return parse_config(text, "<kwargs>").economics;
}

}  // namespace

PYBIND11_MODULE(_d2drelay, m) {
    m.doc() = "Relay planning for D2D street networks";
    m.attr("__version__") = D2DRELAY_VERSION;

    py::register_exception<FiniteSizeError>(m, "FiniteSizeError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("triangle_surface",
          [](double alpha, double beta, double street_width_m) {
              return triangle_surface({street_width_m, SurfaceKind::triangle}, {alpha, beta});
          },
          py::arg("alpha"), py::arg("beta"), py::arg("street_width_m") = 20.0);
    m.def("circumcircle_surface",
          [](double alpha, double beta, double street_width_m) {
              return circumcircle_surface({street_width_m, SurfaceKind::circumcircle}, {alpha, beta});
          },
          py::arg("alpha"), py::arg("beta"), py::arg("street_width_m") = 20.0);
    m.def("angle_density", [](double a, double b) { return angle_density({a, b}); },
          py::arg("alpha"), py::arg("beta"));

    m.def("mean_vacancy",
          [](double lambda, double width, const std::string& surface) {
              return mean_vacancy(lambda, geometry_of(width, surface));
          },
          py::arg("lambda_per_km"), py::arg("street_width_m") = 20.0,
          py::arg("surface") = "circumcircle");
    m.def("occupation_probability",
          [](double lambda, double p, double width, const std::string& surface) {
              return occupation_probability({lambda, p, geometry_of(width, surface)});
          },
          py::arg("lambda_per_km"), py::arg("relay_fraction"), py::arg("street_width_m") = 20.0,
          py::arg("surface") = "circumcircle");
    m.def("invert_for_relay_fraction",
          [](double p_star, double lambda, double width, const std::string& surface) {
              return invert_for_relay_fraction(p_star, lambda, geometry_of(width, surface));
          },
          py::arg("p_star"), py::arg("lambda_per_km"), py::arg("street_width_m") = 20.0,
          py::arg("surface") = "circumcircle");

    m.def("street_stats",
          [](double gamma, double side_km, std::uint64_t seed) {
              StreetSystem s = generate_pvt(gamma, Window::square(side_km), seed);
              StreetStats st = street_stats(s);
              py::dict d;
              d["length_intensity"] = st.length_intensity_hat;
              d["vertex_intensity"] = st.vertex_intensity_hat;
              d["edge_intensity"] = st.edge_intensity_hat;
              d["mean_edge_length"] = st.mean_edge_length;
              d["vertex_count"] = st.vertex_count;
              d["edge_count"] = st.edge_count;
              return d;
          },
          py::arg("gamma") = 20.0, py::arg("side_km") = 5.0, py::arg("seed") = 1);

    m.def("estimate_p_star",
          [](double lambda, double range_km, double gamma, double side_km, std::size_t replicates,
             std::uint64_t seed, std::optional<double> margin_km, unsigned threads) {
              PercolationSetup setup = setup_of(gamma, lambda, range_km, side_km, margin_km, threads);
              PercolationEstimate est;
              {
                  py::gil_scoped_release release;
                  est = estimate_p_star(setup, replicates, seed);
              }
              return estimate_dict(est);
          },
          py::arg("lambda_per_km"), py::arg("range_km") = 0.2, py::arg("gamma") = 20.0,
          py::arg("side_km") = 5.0, py::arg("replicates") = 50, py::arg("seed") = 1,
          py::arg("margin_km") = py::none(), py::arg("threads") = 0);

    m.def("minimal_relay_proportion",
          [](double p_star, double lambda, double width, const std::string& surface) {
              return minimal_relay_proportion(lambda, 0.0, geometry_of(width, surface), p_star).p_c_hat;
          },
          py::arg("p_star"), py::arg("lambda_per_km"), py::arg("street_width_m") = 20.0,
          py::arg("surface") = "circumcircle");

    m.def("relay_curve",
          [](std::vector<double> grid, double range_km, double gamma, double side_km,
             std::size_t replicates, std::uint64_t seed, double width, unsigned threads) {
              RelayCurveSetup setup;
              setup.percolation = setup_of(gamma, 0.0, range_km, side_km, std::nullopt, threads);
              setup.street_width_m = width;
              setup.replicates = replicates;
              setup.seed = seed;
              std::vector<RelayCurveRow> rows;
              {
                  py::gil_scoped_release release;
                  rows = relay_curve(grid, setup);
              }
              py::list out;
              for (const auto& r : rows) {
                  py::dict d;
                  d["lambda"] = r.lambda_per_km;
                  d["p_star"] = r.p_star;
                  d["p_star_se"] = r.p_star_std_error;
                  d["p_c_triangle"] = r.p_c_triangle;
                  d["p_c_circle"] = r.p_c_circle;
                  d["never_percolates"] = r.never_percolates;
                  out.append(d);
              }
              return out;
          },
          py::arg("lambda_grid"), py::arg("range_km") = 0.2, py::arg("gamma") = 20.0,
          py::arg("side_km") = 5.0, py::arg("replicates") = 50, py::arg("seed") = 1,
          py::arg("street_width_m") = 20.0, py::arg("threads") = 0);

    m.def("user_density",
          [](double t, const py::kwargs& kw) { return user_density(t, scenario_from(kw)); },
          py::arg("t"));
    m.def("cash_flow",
          [](const py::kwargs& kw) {
              CashFlowSeries s = cumulated_revenue(scenario_from(kw));
              py::dict d;
              d["roi_month"] = s.roi_month ? py::cast(*s.roi_month) : py::none();
              py::list rows;
              for (const auto& r : s.rows) {
                  py::dict row;
                  row["month"] = r.month;
                  row["bought"] = r.bought;
                  row["stock"] = r.stock;
                  row["lambda"] = r.lambda_per_km;
                  row["cash_flow"] = r.terms.cash_flow;
                  row["cumulated"] = r.cumulated;
                  rows.append(row);
              }
              d["rows"] = rows;
              d["warnings"] = s.warnings;
              return d;
          },
          "Cash-flow series; keyword arguments use the [economics] config keys.");

    m.def("load_config", [](const std::string& path) { return load_config(path).to_ini(); },
          py::arg("path"), "Resolved configuration text for a scenario file.");
}
