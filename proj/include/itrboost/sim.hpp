#pragma once

#include <cstdint>
#include <vector>

#include "itrboost/dataset.hpp"

namespace itrboost {

// Synthetic randomized trial: X_j ~ U(-1,1) iid, A ~ +-1 with probability
// 1/2, eps ~ N(0,1), Y = mu(X) + delta(X) * A + eps with
// mu(X) = 1 + 2 x1 + x2 + x3/2. Five interaction functions delta are
// provided, each with a known closed-form optimal rule.
struct ScenarioSpec {
    int id = 1;          // 1..5
    std::size_t n = 0;
    std::size_t p = 0;
    std::uint64_t seed = 0;
};

struct SimulatedTrial {
    Dataset data;
    std::vector<double> oracle_decisions;  // sign(delta), sign(0) = +1
    std::vector<double> delta_values;
};

// Minimum covariate dimension for a scenario (delta's needs and mu's p >= 3).
std::size_t scenario_min_dim(int id);

double scenario_delta(int id, const std::vector<double>& x);
double scenario_mu(const std::vector<double>& x);

// The closed-form optimal rule, evaluated directly from its region statement.
double oracle_decide(int id, const std::vector<double>& x);

SimulatedTrial generate(const ScenarioSpec& spec);

}  // namespace itrboost
