#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itrboost/boosting.hpp"
#include "itrboost/dataset.hpp"
#include "itrboost/itr.hpp"

namespace itrboost {

enum class Method {
    IndirectBoosting,
    DirectBoosting1,
    DirectBoosting2,
    QLearning,
    DLearning,
};

Method method_from_name(const std::string& name);
std::string method_name(Method m);
bool method_is_boosting(Method m);

// Fits one method. Boosting methods read (rounds, shrinkage, depth, ...)
// from `params`; DLearning uses `lasso_penalty` when present.
ItrPolicy fit_method(Method m, const Dataset& data, const HyperParams& params,
                     std::optional<double> lasso_penalty = std::nullopt);

struct Grid {
    std::vector<int> rounds{50, 100, 200, 400};
    std::vector<double> shrinkages{0.05, 0.1, 0.3};
    std::vector<int> depths{2, 3, 4};
    std::vector<double> lasso_penalties;  // for linear/l1 methods
    HyperParams base;                     // gamma, lambda, min_child_hessian
};

struct TuneCandidate {
    HyperParams params;
    std::optional<double> lasso_penalty;
    double mean_value = 0.0;
    double std_error = 0.0;
    int folds_used = 0;
    std::string failure;  // nonempty when the candidate could not be fit
};

struct TuneResult {
    HyperParams best;
    std::optional<double> best_lasso_penalty;
    std::vector<TuneCandidate> table;

    std::string table_csv() const;
};

// k-fold CV maximizing the mean held-out value estimate. A held-out fold
// with zero policy-treatment matches scores -inf for that fold. Ties break
// toward smaller K, then larger eta, then smaller depth.
TuneResult cross_validate(Method method, const Dataset& data, const Grid& grid,
                          int k, std::uint64_t seed);

}  // namespace itrboost
