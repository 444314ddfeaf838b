#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace d2drelay {

namespace detail {

/// Gauss-Legendre nodes and weights on (0, 1). Cached per order.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendreRule& gauss_legendre_unit(int order);

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Fixed-order rule on the domain, parametrised by alpha in (0, pi) and
// beta = pi - alpha + u * alpha with u in (0, 1); Jacobian pi * alpha.
template <typename G>
double integrate_fixed(G& g, int order) {
    const auto& rule = gauss_legendre_unit(order);
    constexpr double pi = std::numbers::pi;
    CompensatedSum total;
    for (int i = 0; i < order; ++i) {
        double alpha = pi * rule.nodes[i];
        double sin_a = std::sin(alpha);
        CompensatedSum row;
        for (int j = 0; j < order; ++j) {
            double beta = pi - alpha + rule.nodes[j] * alpha;
            double f = -(8.0 / (3.0 * pi)) * sin_a * std::sin(beta) * std::sin(alpha + beta);
            row.add(rule.weights[j] * f * g(alpha, beta));
        }
        total.add(rule.weights[i] * pi * alpha * row.value());
    }
    return total.value();
}

}  // namespace detail

template <typename G>
double integrate_over_angles(G&& g, const QuadratureOptions& options) {
    int order = options.initial_nodes;
    double previous = detail::integrate_fixed(g, order);
    while (order < options.max_nodes) {
        order *= 2;
        double current = detail::integrate_fixed(g, order);
        if (std::abs(current - previous) < options.tolerance) return current;
        previous = current;
    }
    return previous;
}

}  // namespace d2drelay
