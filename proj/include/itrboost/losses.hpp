#pragma once

#include <variant>
#include <vector>

namespace itrboost {

struct GradHess {
    std::vector<double> g;
    std::vector<double> h;
};

// Per-arm squared loss: g = -2(target - f), h = 2.
struct SquaredLoss {
    std::vector<double> target;
};

// Weighted squared loss (weights 1/pi, responses 2YA):
// g = -2 w (target - f), h = 2 w.
struct WeightedSquaredLoss {
    std::vector<double> target;
    std::vector<double> weight;  // strictly positive
};

// Residual-weighted deviance loss phi(x) = log(1 + e^{-2x}) on margins
// z_i * f_i with per-observation weights |Y - mu|/pi:
//   g = w z phi'(z f),  h = w phi''(z f)  (h floored at 1e-16 w).
struct WeightedDevianceLoss {
    std::vector<double> label;   // z in {-1, +1}
    std::vector<double> weight;  // nonnegative
};

using LossSpec = std::variant<SquaredLoss, WeightedSquaredLoss, WeightedDevianceLoss>;

GradHess grad_hess_squared(const std::vector<double>& target,
                           const std::vector<double>& predictions);
GradHess grad_hess_weighted_squared(const std::vector<double>& target,
                                    const std::vector<double>& weight,
                                    const std::vector<double>& predictions);
GradHess grad_hess_weighted_deviance(const std::vector<double>& label,
                                     const std::vector<double>& weight,
                                     const std::vector<double>& predictions);

GradHess evaluate_loss(const LossSpec& loss, const std::vector<double>& predictions);
std::size_t loss_size(const LossSpec& loss);

// phi'(x) = -2 / (1 + e^{2x}),  phi''(x) = 4 e^{2x} / (1 + e^{2x})^2,
// computed in overflow-safe forms.
double deviance_grad(double margin);
double deviance_hess(double margin);

}  // namespace itrboost
