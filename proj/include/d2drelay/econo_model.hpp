#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "d2drelay/relay_planner.hpp"

namespace d2drelay {

/// Scenario parameters violating their constraints; `violations` lists each.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// User density over time (users per km of street): zero up to the launch,
/// then scale * (A / (1 + c * exp(-rate (t - onset))) + B * (1 - exp(-(t - onset) / tau))).
struct AdoptionCurve {
    std::string id = "logistic_saturating";
    double scale = 0.2;
    double logistic_amplitude = 180.0;
    double logistic_coefficient = 200.0;
    double logistic_rate = 0.5;
    double onset = 11.961;
    double saturation_amplitude = 100.0;
    double saturation_time = 36.0;

    double evaluate(double t) const;
    /// Value as t grows without bound.
    double limit() const noexcept { return scale * (logistic_amplitude + saturation_amplitude); }
};

/// How an integer phase total is split over the phase's months.
enum class RemainderRule {
    final_month,  // floor(total / months) each month, remainder in the last
    spread,       // one extra relay in each of the first `remainder` months
};

/// Which stock incurs OPEX in month t.
enum class OpexStock { end_of_month, start_of_month };

std::string_view to_string(RemainderRule rule) noexcept;
std::string_view to_string(OpexStock stock) noexcept;
RemainderRule parse_remainder_rule(std::string_view name);
OpexStock parse_opex_stock(std::string_view name);

struct CostScenario {
    double c_capex = 1200.0;   // currency per relay
    double eta = 0.1;          // yearly OPEX as a fraction of CAPEX
    double g_revenue = 3.0;    // currency per user per month
    int t_dep = 84;            // months
    int t_launch = 12;         // months
    int t_critical = 30;       // months
    double p_min = 0.1;
    double p_max = 0.2;
    double gamma = 20.0;       // km / km^2
    double area_km2 = 25.0;
    int horizon = 120;         // months
    AdoptionCurve adoption;
    RemainderRule remainder = RemainderRule::final_month;
    OpexStock opex_stock = OpexStock::end_of_month;

    std::vector<std::string> violations() const;
    /// Throws ValidationError listing every violated constraint.
    void validate() const;

    /// Mean crossroad count gamma^2 * area / 2.
    double crossroad_count() const noexcept { return gamma * gamma * area_km2 / 2.0; }
};

/// User density lambda(t) in users per km, zero for t <= t_launch.
double user_density(double t, const CostScenario& scenario);

struct MonthPurchases {
    int month = 0;
    long bought = 0;  // N_B(t)
    long stock = 0;   // N(t), end of month
};

struct DeploymentSchedule {
    long phase1_fleet = 0;  // relays in place at t_launch
    long full_fleet = 0;    // relays in place at t_critical
    std::vector<MonthPurchases> months;  // months 1..horizon
    std::vector<std::string> warnings;

    const MonthPurchases& at(int month) const { return months.at(static_cast<std::size_t>(month - 1)); }
};

/// Integer split of `total` over `months` under `rule`.
std::vector<long> split_purchases(long total, int months, RemainderRule rule);

DeploymentSchedule deployment_schedule(const CostScenario& scenario);

struct CashFlowTerms {
    double users = 0.0;
    double revenue = 0.0;
    double capex = 0.0;
    double opex = 0.0;
    double cash_flow = 0.0;
};

/// CF = G lambda gamma area - N_B c_capex - N eta c_capex / 12.
CashFlowTerms cash_flow_terms(double lambda_per_km, long bought, long stock,
                              const CostScenario& scenario);

/// Cash flow of month t (t >= 1); CF(0) = 0.
double cash_flow(int t, const CostScenario& scenario, const DeploymentSchedule& schedule);

struct CashFlowRow {
    int month = 0;
    long bought = 0;
    long stock = 0;
    double lambda_per_km = 0.0;
    CashFlowTerms terms;
    double cumulated = 0.0;
};

struct CashFlowSeries {
    std::vector<CashFlowRow> rows;
    std::optional<int> roi_month;  // first month with positive cumulated revenue
    std::vector<std::string> warnings;
};

CashFlowSeries cumulated_revenue(const CostScenario& scenario);

struct TuningReport {
    double lambda_at_critical = 0.0;
    double p_c = 0.0;
    double p_max = 0.0;
    double deviation = 0.0;
    double tolerance = 0.05;
    bool flagged = false;
};

/// Compares p_max with the minimal relay proportion at lambda(t_critical).
/// The plan must have been computed at that lambda.
TuningReport tuning_check(const CostScenario& scenario, const RelayPlan& plan,
                          double tolerance = 0.05);

}  // namespace d2drelay
