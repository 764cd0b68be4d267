#include "itrboost/itr.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "itrboost/losses.hpp"

namespace itrboost {

namespace {

std::vector<std::size_t> arm_indices(const Dataset& data, double arm) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (data.treatment(i) == arm) idx.push_back(i);
    }
    return idx;
}

std::vector<std::vector<double>> covariate_columns(const Dataset& data) {
    std::vector<std::vector<double>> cols(data.n_features());
    for (std::size_t j = 0; j < data.n_features(); ++j) cols[j] = data.column(j);
    return cols;
}

std::vector<double> inverse_propensities(const Dataset& data) {
    std::vector<double> w(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) w[i] = 1.0 / data.propensity(i);
    return w;
}

std::vector<double> d_learning_target(const Dataset& data) {
    std::vector<double> target(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        target[i] = 2.0 * data.outcome(i) * data.treatment(i);
    }
    return target;
}

}  // namespace

double ItrPolicy::score(const std::vector<double>& x) const {
    if (const auto* p = std::get_if<BoostedIndirectPolicy>(&kind_)) {
        return p->model_plus.predict(x) - p->model_minus.predict(x);
    }
    if (const auto* p = std::get_if<BoostedDirectPolicy>(&kind_)) {
        return p->model.predict(x);
    }
    const auto& lin = std::get<LinearPolicy>(kind_);
    if (x.size() < lin.coefficients.size()) {
        throw std::invalid_argument("ItrPolicy: covariate row too short");
    }
    double s = lin.intercept;
    for (std::size_t j = 0; j < lin.coefficients.size(); ++j) {
        s += lin.coefficients[j] * x[j];
    }
    return s;
}

std::vector<double> ItrPolicy::decide_rows(const Dataset& data) const {
    std::vector<double> out(data.n_rows());
    std::vector<double> x(data.n_features());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) x[j] = data.covariate(i, j);
        out[i] = decide(x);
    }
    return out;
}

double CommonEffectModel::evaluate(const std::vector<double>& x) const {
    if (x.size() < slope.size()) {
        throw std::invalid_argument("CommonEffectModel: covariate row too short");
    }
    double v = intercept;
    for (std::size_t j = 0; j < slope.size(); ++j) v += slope[j] * x[j];
    return v;
}

ItrPolicy fit_indirect_boosting(const Dataset& data, const HyperParams& params) {
    const auto plus = arm_indices(data, 1.0);
    const auto minus = arm_indices(data, -1.0);
    if (plus.empty() || minus.empty()) {
        throw std::runtime_error("fit_indirect_boosting: one treatment arm is empty");
    }
    const double frac =
        static_cast<double>(std::min(plus.size(), minus.size())) /
        static_cast<double>(data.n_rows());
    if (frac < 0.10) {
        std::cerr << "warning: imbalanced arms (" << plus.size() << " vs "
                  << minus.size() << "); the smaller arm's quality estimate may be "
                  << "poor\n";
    }
    const Dataset data_plus = split(data, plus);
    const Dataset data_minus = split(data, minus);
    BoostedEnsemble model_plus =
        train(data_plus, SquaredLoss{data_plus.outcomes()}, params);
    BoostedEnsemble model_minus =
        train(data_minus, SquaredLoss{data_minus.outcomes()}, params);
    return ItrPolicy(BoostedIndirectPolicy{std::move(model_plus), std::move(model_minus)});
}

ItrPolicy fit_direct_boosting_1(const Dataset& data, const HyperParams& params) {
    WeightedSquaredLoss loss{d_learning_target(data), inverse_propensities(data)};
    return ItrPolicy(BoostedDirectPolicy{train(data, std::move(loss), params)});
}

ItrPolicy fit_direct_boosting_2(const Dataset& data, const HyperParams& params,
                                const CommonEffectModel& mu) {
    const std::size_t n = data.n_rows();
    WeightedDevianceLoss loss;
    loss.label.resize(n);
    loss.weight.resize(n);
    std::vector<double> x(data.n_features());
    std::size_t zero_weights = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) x[j] = data.covariate(i, j);
        const double residual = data.outcome(i) - mu.evaluate(x);
        loss.label[i] = data.treatment(i) * decision_sign(residual);
        loss.weight[i] = std::fabs(residual) / data.propensity(i);
        if (loss.weight[i] == 0.0) ++zero_weights;
    }
    if (zero_weights == n) {
        std::cerr << "warning: all residual weights are zero; the fitted rule is the "
                  << "constant +1 policy\n";
    }
    return ItrPolicy(BoostedDirectPolicy{train(data, std::move(loss), params)});
}

CommonEffectModel estimate_common_effect_linear(const Dataset& data) {
    const auto fit = weighted_least_squares(covariate_columns(data), data.outcomes(),
                                            inverse_propensities(data));
    return CommonEffectModel{fit.intercept, fit.coefficients};
}

CommonEffectModel estimate_common_effect_lasso(const Dataset& data,
                                               const LassoConfig& cfg) {
    const auto fit = weighted_lasso(covariate_columns(data), data.outcomes(),
                                    inverse_propensities(data), cfg);
    return CommonEffectModel{fit.intercept, fit.coefficients};
}

CommonEffectModel estimate_common_effect_null(const Dataset& data) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        num += data.outcome(i) / data.propensity(i);
        den += 1.0 / data.propensity(i);
    }
    return CommonEffectModel{num / den, {}};
}

ItrPolicy fit_q_learning_linear(const Dataset& data) {
    const auto plus = arm_indices(data, 1.0);
    const auto minus = arm_indices(data, -1.0);
    if (plus.empty() || minus.empty()) {
        throw std::runtime_error("fit_q_learning_linear: one treatment arm is empty");
    }
    const Dataset data_plus = split(data, plus);
    const Dataset data_minus = split(data, minus);
    const std::vector<double> ones_plus(data_plus.n_rows(), 1.0);
    const std::vector<double> ones_minus(data_minus.n_rows(), 1.0);
    const auto fit_plus = weighted_least_squares(covariate_columns(data_plus),
                                                 data_plus.outcomes(), ones_plus);
    const auto fit_minus = weighted_least_squares(covariate_columns(data_minus),
                                                  data_minus.outcomes(), ones_minus);
    LinearPolicy policy;
    policy.intercept = fit_plus.intercept - fit_minus.intercept;
    policy.coefficients.resize(data.n_features());
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        policy.coefficients[j] = fit_plus.coefficients[j] - fit_minus.coefficients[j];
    }
    return ItrPolicy(std::move(policy));
}

ItrPolicy fit_d_learning_linear(const Dataset& data,
                                std::optional<double> lasso_penalty) {
    const auto target = d_learning_target(data);
    const auto weights = inverse_propensities(data);
    LinearFit fit;
    if (lasso_penalty) {
        LassoConfig cfg;
        cfg.penalty = *lasso_penalty;
        fit = weighted_lasso(covariate_columns(data), target, weights, cfg);
    } else {
        fit = weighted_least_squares(covariate_columns(data), target, weights);
    }
    return ItrPolicy(LinearPolicy{fit.intercept, fit.coefficients});
}

std::string ItrPolicy::to_json() const {
    nlohmann::json j;
    if (const auto* p = std::get_if<BoostedIndirectPolicy>(&kind_)) {
        j["kind"] = "boosted_indirect";
        j["model_plus"] = nlohmann::json::parse(p->model_plus.to_json());
        j["model_minus"] = nlohmann::json::parse(p->model_minus.to_json());
    } else if (const auto* p = std::get_if<BoostedDirectPolicy>(&kind_)) {
        j["kind"] = "boosted_direct";
        j["model"] = nlohmann::json::parse(p->model.to_json());
    } else {
        const auto& lin = std::get<LinearPolicy>(kind_);
        j["kind"] = "linear";
        j["intercept"] = lin.intercept;
        j["coefficients"] = lin.coefficients;
    }
    return j.dump();
}

ItrPolicy ItrPolicy::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "boosted_indirect") {
        return ItrPolicy(BoostedIndirectPolicy{
            BoostedEnsemble::from_json(j.at("model_plus").dump()),
            BoostedEnsemble::from_json(j.at("model_minus").dump())});
    }
    if (kind == "boosted_direct") {
        return ItrPolicy(
            BoostedDirectPolicy{BoostedEnsemble::from_json(j.at("model").dump())});
    }
    if (kind == "linear") {
        return ItrPolicy(LinearPolicy{j.at("intercept").get<double>(),
                                      j.at("coefficients").get<std::vector<double>>()});
    }
    throw std::runtime_error("ItrPolicy::from_json: unknown kind '" + kind + "'");
}

}  // namespace itrboost
