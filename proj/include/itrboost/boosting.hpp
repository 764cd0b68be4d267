#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itrboost/dataset.hpp"
#include "itrboost/losses.hpp"

namespace itrboost {

struct HyperParams {
    int rounds = 100;              // K
    double shrinkage = 0.1;        // eta in (0, 1]
    int max_depth = 3;             // d
    double leaf_penalty = 0.0;     // gamma, per-leaf cost
    double weight_penalty = 1.0;   // lambda, L2 on leaf weights
    double min_child_hessian = 0.0;

    void validate() const;  // throws std::invalid_argument on bad bounds
};

// One regression tree as a flat node array. Node 0 is the root. Rows go left
// when feature value < threshold, right when >= threshold.
struct TreeNode {
    bool is_leaf = true;
    double weight = 0.0;   // leaf output
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double evaluate(const std::vector<double>& x) const;
    int leaf_count() const;
};

struct BoostedEnsemble {
    double base_score = 0.0;
    double shrinkage = 1.0;
    std::vector<RegressionTree> trees;

    // base_score + eta * sum of tree outputs
    double predict(const std::vector<double>& x) const;
    void predict_rows(const Dataset& data, std::vector<double>& out) const;

    std::string to_json() const;
    static BoostedEnsemble from_json(const std::string& text);
};

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Closed-form second-order leaf weight -G/(H+lambda). Throws when the
// denominator is not positive.
double fit_leaf_weight(double grad_sum, double hess_sum, double weight_penalty);

// Penalized loss reduction of a split:
//   0.5 * [Gl^2/(Hl+lambda) + Gr^2/(Hr+lambda) - (Gl+Gr)^2/(Hl+Hr+lambda)] - gamma
double split_gain(double grad_left, double hess_left,
                  double grad_right, double hess_right,
                  double weight_penalty, double leaf_penalty);

// Exact greedy scan over every feature; thresholds are midpoints between
// consecutive distinct sorted values. Returns the best candidate with
// strictly positive gain whose children both satisfy the hessian minimum,
// or nullopt. Ties break toward the lower feature index, then the smaller
// threshold.
std::optional<SplitCandidate> find_best_split(const std::vector<std::size_t>& rows,
                                              const GradHess& grad_hess,
                                              const Dataset& data,
                                              const HyperParams& params);

// Grows one tree by recursive greedy splitting until max_depth or no
// positive-gain split remains.
RegressionTree grow_tree(const std::vector<std::size_t>& rows,
                         const GradHess& grad_hess,
                         const Dataset& data,
                         const HyperParams& params);

// Forward stagewise training: K rounds of (gradient/hessian at current
// predictions, grow one tree, append with shrinkage). Stops early only when
// every gradient is exactly zero.
BoostedEnsemble train(const Dataset& data, const LossSpec& loss,
                      const HyperParams& params);

}  // namespace itrboost
