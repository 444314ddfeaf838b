#include "d2drelay/econo_model.hpp"

#include <cmath>
#include <sstream>

#include "d2drelay/errors.hpp"

namespace d2drelay {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::ostringstream out;
    for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "; " : "") << items[i];
    return out.str();
}

long fleet_size(double count, std::string_view label, std::vector<std::string>& warnings) {
    double rounded = std::round(count);
    if (std::abs(count - rounded) > 1e-9) {
        std::ostringstream msg;
        msg << label << " fleet " << count << " is not an integer; rounded to " << rounded;
        warnings.push_back(msg.str());
    }
    return static_cast<long>(rounded);
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument("invalid scenario: " + join(violations)),
      violations_(std::move(violations)) {}

double AdoptionCurve::evaluate(double t) const {
    double s = t - onset;
    return scale * (logistic_amplitude / (1.0 + logistic_coefficient * std::exp(-logistic_rate * s)) +
                    saturation_amplitude * (1.0 - std::exp(-s / saturation_time)));
}

std::string_view to_string(RemainderRule rule) noexcept {
    return rule == RemainderRule::final_month ? "final_month" : "spread";
}

std::string_view to_string(OpexStock stock) noexcept {
    return stock == OpexStock::end_of_month ? "end_of_month" : "start_of_month";
}

RemainderRule parse_remainder_rule(std::string_view name) {
    if (name == "final_month") return RemainderRule::final_month;
    if (name == "spread") return RemainderRule::spread;
    throw DomainError("unknown remainder rule '" + std::string(name) +
                      "' (expected final_month or spread)");
}

OpexStock parse_opex_stock(std::string_view name) {
    if (name == "end_of_month") return OpexStock::end_of_month;
    if (name == "start_of_month") return OpexStock::start_of_month;
    throw DomainError("unknown OPEX stock convention '" + std::string(name) +
                      "' (expected end_of_month or start_of_month)");
}

std::vector<std::string> CostScenario::violations() const {
    std::vector<std::string> v;
    if (!(p_min >= 0)) v.emplace_back("p_min >= 0");
    if (!(p_min <= p_max)) v.emplace_back("p_min <= p_max");
    if (!(p_max <= 1)) v.emplace_back("p_max <= 1");
    if (!(t_launch > 0)) v.emplace_back("t_launch > 0");
    if (!(t_launch < t_critical)) v.emplace_back("t_launch < t_critical");
    if (!(t_dep > t_critical)) v.emplace_back("t_dep > t_critical");
    if (!(horizon >= t_dep)) v.emplace_back("horizon >= t_dep");
    if (!(c_capex >= 0)) v.emplace_back("c_capex >= 0");
    if (!(eta >= 0)) v.emplace_back("eta >= 0");
    if (!(g_revenue >= 0)) v.emplace_back("g_revenue >= 0");
    if (!(gamma > 0)) v.emplace_back("gamma > 0");
    if (!(area_km2 > 0)) v.emplace_back("area > 0");
    if (adoption.id != "logistic_saturating") v.emplace_back("adoption = logistic_saturating");
    if (!(adoption.saturation_time > 0)) v.emplace_back("adoption_saturation_time > 0");
    if (!(adoption.scale >= 0 && adoption.logistic_amplitude >= 0 &&
          adoption.saturation_amplitude >= 0 && adoption.logistic_coefficient >= 0 &&
          adoption.logistic_rate >= 0)) {
        v.emplace_back("adoption curve coefficients >= 0");
    }
    return v;
}

void CostScenario::validate() const {
    auto v = violations();
    if (!v.empty()) throw ValidationError(std::move(v));
}

double user_density(double t, const CostScenario& scenario) {
    if (!(t >= 0)) throw DomainError("time must be non-negative");
    if (t <= scenario.t_launch) return 0.0;
    return std::max(0.0, scenario.adoption.evaluate(t));
}

std::vector<long> split_purchases(long total, int months, RemainderRule rule) {
    if (months <= 0) throw DomainError("a purchase phase needs at least one month");
    if (total < 0) throw DomainError("cannot purchase a negative number of relays");
    const long base = total / months;
    const long remainder = total % months;
    std::vector<long> out(static_cast<std::size_t>(months), base);
    if (rule == RemainderRule::final_month) {
        out.back() += remainder;
    } else {
        for (long i = 0; i < remainder; ++i) ++out[static_cast<std::size_t>(i)];
    }
    return out;
}

DeploymentSchedule deployment_schedule(const CostScenario& scenario) {
    scenario.validate();
    DeploymentSchedule sched;
    const double crossroads = scenario.crossroad_count();
    sched.phase1_fleet = fleet_size(scenario.p_min * crossroads, "phase-1", sched.warnings);
    sched.full_fleet = fleet_size(scenario.p_max * crossroads, "full", sched.warnings);

    const auto horizon = static_cast<std::size_t>(scenario.horizon);
    std::vector<long> bought(horizon + 1, 0);
    std::vector<long> added(horizon + 1, 0);
    auto place = [&](int start, const std::vector<long>& counts, bool grows_stock) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            auto month = static_cast<std::size_t>(start) + i;
            if (month > horizon) break;
            bought[month] += counts[i];
            if (grows_stock) added[month] += counts[i];
        }
    };

    place(1, split_purchases(sched.phase1_fleet, scenario.t_launch, scenario.remainder), true);
    place(scenario.t_launch + 1,
          split_purchases(sched.full_fleet - sched.phase1_fleet,
                          scenario.t_critical - scenario.t_launch, scenario.remainder),
          true);
    // Replacement cycle k covers months k*t_dep + 1 .. (k+1)*t_dep.
    const auto replacement = split_purchases(sched.full_fleet, scenario.t_dep, scenario.remainder);
    for (int start = scenario.t_dep + 1; start <= scenario.horizon; start += scenario.t_dep) {
        place(start, replacement, false);
    }

    long stock = 0;
    sched.months.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
        stock += added[t];
        sched.months.push_back(MonthPurchases{static_cast<int>(t), bought[t], stock});
    }
    return sched;
}

CashFlowTerms cash_flow_terms(double lambda_per_km, long bought, long stock,
                              const CostScenario& scenario) {
    CashFlowTerms terms;
    terms.users = lambda_per_km * scenario.gamma * scenario.area_km2;
    terms.revenue = scenario.g_revenue * terms.users;
    terms.capex = static_cast<double>(bought) * scenario.c_capex;
    terms.opex = static_cast<double>(stock) * scenario.eta * scenario.c_capex / 12.0;
    terms.cash_flow = terms.revenue - terms.capex - terms.opex;
    return terms;
}

namespace {

long opex_stock_at(int t, const CostScenario& scenario, const DeploymentSchedule& schedule) {
    if (scenario.opex_stock == OpexStock::end_of_month) return schedule.at(t).stock;
    return t > 1 ? schedule.at(t - 1).stock : 0;
}

}  // namespace

double cash_flow(int t, const CostScenario& scenario, const DeploymentSchedule& schedule) {
    if (t == 0) return 0.0;
    if (t < 0 || t > static_cast<int>(schedule.months.size())) {
        throw DomainError("month outside the scenario horizon");
    }
    return cash_flow_terms(user_density(t, scenario), schedule.at(t).bought,
                           opex_stock_at(t, scenario, schedule), scenario)
        .cash_flow;
}

CashFlowSeries cumulated_revenue(const CostScenario& scenario) {
    DeploymentSchedule schedule = deployment_schedule(scenario);
    CashFlowSeries series;
    series.warnings = schedule.warnings;
    series.rows.reserve(schedule.months.size());
    double cumulated = 0.0;  // CR(0) = CF(0) = 0
    for (const MonthPurchases& m : schedule.months) {
        CashFlowRow row;
        row.month = m.month;
        row.bought = m.bought;
        row.stock = m.stock;
        row.lambda_per_km = user_density(m.month, scenario);
        row.terms = cash_flow_terms(row.lambda_per_km, m.bought,
                                    opex_stock_at(m.month, scenario, schedule), scenario);
        cumulated += row.terms.cash_flow;
        row.cumulated = cumulated;
        if (!series.roi_month && cumulated > 0) series.roi_month = m.month;
        series.rows.push_back(row);
    }
    return series;
}

TuningReport tuning_check(const CostScenario& scenario, const RelayPlan& plan, double tolerance) {
    TuningReport report;
    report.lambda_at_critical = user_density(scenario.t_critical, scenario);
    if (std::abs(plan.lambda_per_km - report.lambda_at_critical) > 1e-9 * (1.0 + report.lambda_at_critical)) {
        throw DomainError("relay plan must be computed at lambda(t_critical)");
    }
    report.p_c = plan.p_c_hat;
    report.p_max = scenario.p_max;
    report.deviation = std::abs(scenario.p_max - plan.p_c_hat);
    report.tolerance = tolerance;
    report.flagged = report.deviation > tolerance;
    return report;
}

}  // namespace d2drelay
