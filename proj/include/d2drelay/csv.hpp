#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "d2drelay/econo_model.hpp"
#include "d2drelay/network_realization.hpp"
#include "d2drelay/percolation_engine.hpp"
#include "d2drelay/relay_planner.hpp"
#include "d2drelay/street_geometry.hpp"

namespace d2drelay::csv {

/// Fixed text form for reals: 9 significant digits, '.' decimal point,
/// "inf" / "-inf" / "nan" for non-finite values.
std::string number(double value);

struct OccupationRow {
    double lambda_per_km;
    double p;
    double f;
};

void write_occupation(std::ostream& out, std::span<const OccupationRow> rows);
void write_crossing_curve(std::ostream& out, std::span<const CurvePoint> curve);
void write_relay_curve(std::ostream& out, std::span<const RelayCurveRow> rows);
void write_cash_flow(std::ostream& out, const CashFlowSeries& series);
void write_vertices(std::ostream& out, const StreetSystem& s);
void write_edges(std::ostream& out, const StreetSystem& s);
void write_graph_nodes(std::ostream& out, const ConnectivityGraph& g);
void write_graph_links(std::ostream& out, const ConnectivityGraph& g);

}  // namespace d2drelay::csv
