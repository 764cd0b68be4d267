#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "itrboost/boosting.hpp"
#include "itrboost/dataset.hpp"
#include "itrboost/linear.hpp"

namespace itrboost {

// sign with sign(0) = +1, the convention used for every decision rule here.
inline double decision_sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Deterministic treatment rule decide(x) = sign(score(x)).
struct BoostedIndirectPolicy {
    BoostedEnsemble model_plus;   // Q(x, +1)
    BoostedEnsemble model_minus;  // Q(x, -1)
};
struct BoostedDirectPolicy {
    BoostedEnsemble model;  // decision function f(x)
};
struct LinearPolicy {
    double intercept = 0.0;
    std::vector<double> coefficients;
};

class ItrPolicy {
public:
    using Kind = std::variant<BoostedIndirectPolicy, BoostedDirectPolicy, LinearPolicy>;

    explicit ItrPolicy(Kind kind) : kind_(std::move(kind)) {}

    double score(const std::vector<double>& x) const;
    double decide(const std::vector<double>& x) const { return decision_sign(score(x)); }
    std::vector<double> decide_rows(const Dataset& data) const;

    const Kind& kind() const { return kind_; }

    std::string to_json() const;
    static ItrPolicy from_json(const std::string& text);

private:
    Kind kind_;
};

// mu(x): common effect of covariates in Y = mu(X) + delta(X) A + eps.
struct CommonEffectModel {
    double intercept = 0.0;
    std::vector<double> slope;  // empty for the null model

    double evaluate(const std::vector<double>& x) const;
};

// Algorithm: per-arm squared-loss boosting of Q(x,+1) and Q(x,-1); the rule
// is the sign of their difference. Warns to stderr when one arm holds fewer
// than 10% of rows (imbalanced-arms caveat).
ItrPolicy fit_indirect_boosting(const Dataset& data, const HyperParams& params);

// Algorithm: one weighted-squared-loss ensemble with responses 2*Y*A and
// weights 1/pi, estimating f*(x) = Q(x,+1) - Q(x,-1) directly.
ItrPolicy fit_direct_boosting_1(const Dataset& data, const HyperParams& params);

// Algorithm: labels z = A * sign(Y - mu(X)), weights |Y - mu(X)|/pi, one
// ensemble under the weighted deviance loss.
ItrPolicy fit_direct_boosting_2(const Dataset& data, const HyperParams& params,
                                const CommonEffectModel& mu);

CommonEffectModel estimate_common_effect_linear(const Dataset& data);
CommonEffectModel estimate_common_effect_lasso(const Dataset& data, const LassoConfig& cfg);
CommonEffectModel estimate_common_effect_null(const Dataset& data);

// Linear baselines: per-arm OLS Q-learning and (optionally lasso) D-learning
// on responses 2*Y*A with weights 1/pi.
ItrPolicy fit_q_learning_linear(const Dataset& data);
ItrPolicy fit_d_learning_linear(const Dataset& data,
                                std::optional<double> lasso_penalty = std::nullopt);

}  // namespace itrboost
