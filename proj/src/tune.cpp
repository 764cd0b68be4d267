#include "itrboost/tune.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "itrboost/eval.hpp"

namespace itrboost {

Method method_from_name(const std::string& name) {
    if (name == "indirect-boosting") return Method::IndirectBoosting;
    if (name == "direct-boosting-1") return Method::DirectBoosting1;
    if (name == "direct-boosting-2") return Method::DirectBoosting2;
    if (name == "q-linear") return Method::QLearning;
    if (name == "d-linear") return Method::DLearning;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::IndirectBoosting: return "indirect-boosting";
        case Method::DirectBoosting1: return "direct-boosting-1";
        case Method::DirectBoosting2: return "direct-boosting-2";
        case Method::QLearning: return "q-linear";
        case Method::DLearning: return "d-linear";
    }
    throw std::logic_error("unreachable");
}

bool method_is_boosting(Method m) {
    return m == Method::IndirectBoosting || m == Method::DirectBoosting1 ||
           m == Method::DirectBoosting2;
}

ItrPolicy fit_method(Method m, const Dataset& data, const HyperParams& params,
                     std::optional<double> lasso_penalty) {
    switch (m) {
        case Method::IndirectBoosting:
            return fit_indirect_boosting(data, params);
        case Method::DirectBoosting1:
            return fit_direct_boosting_1(data, params);
        case Method::DirectBoosting2:
            return fit_direct_boosting_2(data, params,
                                         estimate_common_effect_linear(data));
        case Method::QLearning:
            return fit_q_learning_linear(data);
        case Method::DLearning:
            return fit_d_learning_linear(data, lasso_penalty);
    }
    throw std::logic_error("unreachable");
}

namespace {

std::vector<TuneCandidate> make_candidates(Method method, const Grid& grid) {
    std::vector<TuneCandidate> out;
    if (method_is_boosting(method)) {
        if (grid.rounds.empty() || grid.shrinkages.empty() || grid.depths.empty()) {
            throw std::invalid_argument("cross_validate: empty grid axis");
        }
        for (int rounds : grid.rounds) {
            for (double eta : grid.shrinkages) {
                for (int depth : grid.depths) {
                    TuneCandidate c;
                    c.params = grid.base;
                    c.params.rounds = rounds;
                    c.params.shrinkage = eta;
                    c.params.max_depth = depth;
                    c.params.validate();
                    out.push_back(std::move(c));
                }
            }
        }
        return out;
    }
    if (method == Method::DLearning && !grid.lasso_penalties.empty()) {
        for (double penalty : grid.lasso_penalties) {
            TuneCandidate c;
            c.params = grid.base;
            c.lasso_penalty = penalty;
            out.push_back(std::move(c));
        }
        return out;
    }
    TuneCandidate c;
    c.params = grid.base;
    out.push_back(std::move(c));
    return out;
}

// Parsimony order for exact value ties: smaller K, larger eta, smaller depth,
// smaller penalty.
bool prefer(const TuneCandidate& a, const TuneCandidate& b) {
    if (a.mean_value != b.mean_value) return a.mean_value > b.mean_value;
    if (a.params.rounds != b.params.rounds) return a.params.rounds < b.params.rounds;
    if (a.params.shrinkage != b.params.shrinkage) {
        return a.params.shrinkage > b.params.shrinkage;
    }
    if (a.params.max_depth != b.params.max_depth) {
        return a.params.max_depth < b.params.max_depth;
    }
    const double pa = a.lasso_penalty.value_or(-1.0);
    const double pb = b.lasso_penalty.value_or(-1.0);
    return pa < pb;
}

}  // namespace

TuneResult cross_validate(Method method, const Dataset& data, const Grid& grid,
                          int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
    const auto folds = make_folds(data.n_rows(), k, seed);

    std::vector<Dataset> train_sets, valid_sets;
    train_sets.reserve(k);
    for (int fold = 0; fold < k; ++fold) {
        train_sets.push_back(split(data, folds.complement_indices(fold)));
        valid_sets.push_back(split(data, folds.fold_indices(fold)));
    }

    auto candidates = make_candidates(method, grid);
    for (auto& cand : candidates) {
        double sum = 0.0, sumsq = 0.0;
        bool minus_inf = false;
        std::vector<double> fold_values;
        for (int fold = 0; fold < k; ++fold) {
            try {
                const ItrPolicy policy = fit_method(method, train_sets[fold],
                                                    cand.params, cand.lasso_penalty);
                const auto decisions = policy.decide_rows(valid_sets[fold]);
                double v;
                try {
                    v = estimate_value(decisions, valid_sets[fold]);
                } catch (const std::runtime_error&) {
                    // No policy-treatment match on the held-out fold.
                    minus_inf = true;
                    continue;
                }
                fold_values.push_back(v);
                sum += v;
                sumsq += v * v;
            } catch (const std::exception& e) {
                cand.failure = "fold " + std::to_string(fold) + ": " + e.what();
                break;
            }
        }
        if (!cand.failure.empty()) {
            cand.mean_value = -std::numeric_limits<double>::infinity();
            continue;
        }
        cand.folds_used = static_cast<int>(fold_values.size());
        if (minus_inf || fold_values.empty()) {
            cand.mean_value = -std::numeric_limits<double>::infinity();
            continue;
        }
        const double mean = sum / static_cast<double>(fold_values.size());
        cand.mean_value = mean;
        if (fold_values.size() > 1) {
            const double var =
                (sumsq - mean * sum) / static_cast<double>(fold_values.size() - 1);
            cand.std_error = std::sqrt(std::max(var, 0.0) /
                                       static_cast<double>(fold_values.size()));
        }
    }

    const TuneCandidate* best = nullptr;
    for (const auto& cand : candidates) {
        if (!cand.failure.empty()) continue;
        if (!best || prefer(cand, *best)) best = &cand;
    }
    if (!best) {
        std::string detail;
        for (const auto& cand : candidates) {
            if (!cand.failure.empty()) detail = cand.failure;
        }
        throw std::runtime_error("cross_validate: every candidate failed (" + detail + ")");
    }
    TuneResult result;
    result.best = best->params;
    result.best_lasso_penalty = best->lasso_penalty;
    result.table = std::move(candidates);
    return result;
}

std::string TuneResult::table_csv() const {
    std::ostringstream out;
    out << "rounds,shrinkage,depth,lasso_penalty,mean_value,std_error,folds,failure\n";
    for (const auto& c : table) {
        out << c.params.rounds << ',' << c.params.shrinkage << ','
            << c.params.max_depth << ',';
        if (c.lasso_penalty) out << *c.lasso_penalty;
        out << ',' << c.mean_value << ',' << c.std_error << ',' << c.folds_used << ','
            << c.failure << '\n';
    }
    return out.str();
}

}  // namespace itrboost
