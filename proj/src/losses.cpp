#include "itrboost/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace itrboost {

namespace {

void check_sizes(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

double deviance_grad(double margin) {
    // phi'(x) = -2 / (1 + e^{2x}); for large negative x the ratio saturates
    // to -2, for large positive x to 0, both without overflow.
    if (margin >= 0.0) {
        const double e = std::exp(-2.0 * margin);
        return -2.0 * e / (1.0 + e);
    }
    return -2.0 / (1.0 + std::exp(2.0 * margin));
}

double deviance_hess(double margin) {
    // phi''(x) = 4 e^{2x} / (1 + e^{2x})^2 = sech^2(x), computed via the
    // smaller exponential so it underflows to 0 instead of overflowing.
    const double e = std::exp(-2.0 * std::fabs(margin));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

GradHess grad_hess_squared(const std::vector<double>& target,
                           const std::vector<double>& predictions) {
    check_sizes(target.size(), predictions.size(), "grad_hess_squared");
    GradHess gh;
    gh.g.resize(target.size());
    gh.h.assign(target.size(), 2.0);
    for (std::size_t i = 0; i < target.size(); ++i) {
        gh.g[i] = -2.0 * (target[i] - predictions[i]);
    }
    return gh;
}

GradHess grad_hess_weighted_squared(const std::vector<double>& target,
                                    const std::vector<double>& weight,
                                    const std::vector<double>& predictions) {
    check_sizes(target.size(), predictions.size(), "grad_hess_weighted_squared");
    check_sizes(target.size(), weight.size(), "grad_hess_weighted_squared");
    GradHess gh;
    gh.g.resize(target.size());
    gh.h.resize(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (!(weight[i] > 0.0)) {
            throw std::invalid_argument("grad_hess_weighted_squared: nonpositive weight");
        }
        gh.g[i] = -2.0 * weight[i] * (target[i] - predictions[i]);
        gh.h[i] = 2.0 * weight[i];
    }
    return gh;
}

GradHess grad_hess_weighted_deviance(const std::vector<double>& label,
                                     const std::vector<double>& weight,
                                     const std::vector<double>& predictions) {
    check_sizes(label.size(), predictions.size(), "grad_hess_weighted_deviance");
    check_sizes(label.size(), weight.size(), "grad_hess_weighted_deviance");
    GradHess gh;
    gh.g.resize(label.size());
    gh.h.resize(label.size());
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] != 1.0 && label[i] != -1.0) {
            throw std::invalid_argument("grad_hess_weighted_deviance: label must be -1 or +1");
        }
        if (!(weight[i] >= 0.0)) {
            throw std::invalid_argument("grad_hess_weighted_deviance: negative weight");
        }
        const double margin = label[i] * predictions[i];
        gh.g[i] = weight[i] * label[i] * deviance_grad(margin);
        // Floor keeps saturated leaves solvable.
        gh.h[i] = std::max(weight[i] * deviance_hess(margin), 1e-16 * weight[i]);
    }
    return gh;
}

GradHess evaluate_loss(const LossSpec& loss, const std::vector<double>& predictions) {
    if (const auto* s = std::get_if<SquaredLoss>(&loss)) {
        return grad_hess_squared(s->target, predictions);
    }
    if (const auto* w = std::get_if<WeightedSquaredLoss>(&loss)) {
        return grad_hess_weighted_squared(w->target, w->weight, predictions);
    }
    const auto& d = std::get<WeightedDevianceLoss>(loss);
    return grad_hess_weighted_deviance(d.label, d.weight, predictions);
}

std::size_t loss_size(const LossSpec& loss) {
    if (const auto* s = std::get_if<SquaredLoss>(&loss)) return s->target.size();
    if (const auto* w = std::get_if<WeightedSquaredLoss>(&loss)) return w->target.size();
    return std::get<WeightedDevianceLoss>(loss).label.size();
}

}  // namespace itrboost
