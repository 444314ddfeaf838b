#include "d2drelay/csv.hpp"

#include <cmath>
#include <cstdio>

namespace d2drelay::csv {

std::string number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void write_occupation(std::ostream& out, std::span<const OccupationRow> rows) {
    out << "lambda,p,F\n";
    for (const auto& r : rows) {
        out << number(r.lambda_per_km) << ',' << number(r.p) << ',' << number(r.f) << '\n';
    }
}

void write_crossing_curve(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "p,crossing_prob,std_error,replicates\n";
    for (const auto& c : curve) {
        out << number(c.p) << ',' << number(c.crossing_prob) << ',' << number(c.std_error) << ','
            << c.replicates << '\n';
    }
}

void write_relay_curve(std::ostream& out, std::span<const RelayCurveRow> rows) {
    out << "lambda,p_star,p_star_se,p_c_triangle,p_c_circle\n";
    for (const auto& r : rows) {
        out << number(r.lambda_per_km) << ',' << number(r.p_star) << ',' << number(r.p_star_std_error)
            << ',' << number(r.p_c_triangle) << ',' << number(r.p_c_circle) << '\n';
    }
}

void write_cash_flow(std::ostream& out, const CashFlowSeries& series) {
    out << "month,N_B,N,lambda,users,revenue,capex,opex,cf,cr\n";
    for (const auto& r : series.rows) {
        out << r.month << ',' << r.bought << ',' << r.stock << ',' << number(r.lambda_per_km) << ','
            << number(r.terms.users) << ',' << number(r.terms.revenue) << ','
            << number(r.terms.capex) << ',' << number(r.terms.opex) << ','
            << number(r.terms.cash_flow) << ',' << number(r.cumulated) << '\n';
    }
}

void write_vertices(std::ostream& out, const StreetSystem& s) {
    out << "id,x_km,y_km,boundary,degree\n";
    for (const auto& v : s.vertices()) {
        out << v.id << ',' << number(v.position.x) << ',' << number(v.position.y) << ','
            << (v.boundary ? 1 : 0) << ',' << s.degree(v.id) << '\n';
    }
}

void write_edges(std::ostream& out, const StreetSystem& s) {
    out << "id,a,b,length_km\n";
    for (const auto& e : s.edges()) {
        out << e.id << ',' << e.a << ',' << e.b << ',' << number(e.length) << '\n';
    }
}

void write_graph_nodes(std::ostream& out, const ConnectivityGraph& g) {
    out << "node,kind,source,x_km,y_km\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        out << i << ',' << (n.kind == NodeKind::user ? "user" : "relay_vertex") << ',' << n.source
            << ',' << number(n.position.x) << ',' << number(n.position.y) << '\n';
    }
}

void write_graph_links(std::ostream& out, const ConnectivityGraph& g) {
    out << "a,b\n";
    for (std::size_t i = 0; i < g.adjacency.size(); ++i) {
        for (auto j : g.adjacency[i]) {
            if (static_cast<std::size_t>(j) > i) out << i << ',' << j << '\n';
        }
    }
}

}  // namespace d2drelay::csv
