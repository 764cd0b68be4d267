#include "itrboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace itrboost {

void HyperParams::validate() const {
    if (rounds < 1) throw std::invalid_argument("HyperParams: rounds must be >= 1");
    if (!(shrinkage > 0.0) || shrinkage > 1.0) {
        throw std::invalid_argument("HyperParams: shrinkage must lie in (0,1]");
    }
    if (max_depth < 1) throw std::invalid_argument("HyperParams: max_depth must be >= 1");
    if (!(leaf_penalty >= 0.0)) throw std::invalid_argument("HyperParams: leaf_penalty < 0");
    if (!(weight_penalty >= 0.0)) {
        throw std::invalid_argument("HyperParams: weight_penalty < 0");
    }
    if (!(min_child_hessian >= 0.0)) {
        throw std::invalid_argument("HyperParams: min_child_hessian < 0");
    }
}

double fit_leaf_weight(double grad_sum, double hess_sum, double weight_penalty) {
    const double denom = hess_sum + weight_penalty;
    if (!(denom > 0.0)) {
        throw std::invalid_argument("fit_leaf_weight: H + lambda must be positive");
    }
    return -grad_sum / denom;
}

double split_gain(double grad_left, double hess_left,
                  double grad_right, double hess_right,
                  double weight_penalty, double leaf_penalty) {
    const double dl = hess_left + weight_penalty;
    const double dr = hess_right + weight_penalty;
    const double dp = hess_left + hess_right + weight_penalty;
    if (!(dl > 0.0) || !(dr > 0.0) || !(dp > 0.0)) {
        throw std::invalid_argument("split_gain: zero denominator");
    }
    const double total = grad_left + grad_right;
    return 0.5 * (grad_left * grad_left / dl + grad_right * grad_right / dr -
                  total * total / dp) -
           leaf_penalty;
}

namespace {

// Scans one feature's rows in (value, row) order and keeps the best midpoint
// candidate. Prefix sums run in the same order for every caller, so the
// standalone scan and the in-training scan produce identical floats.
void scan_feature(int feature, const std::vector<std::size_t>& sorted_rows,
                  const std::vector<double>& values, const GradHess& grad_hess,
                  const HyperParams& params, std::optional<SplitCandidate>& best) {
    double total_g = 0.0, total_h = 0.0;
    for (std::size_t r : sorted_rows) {
        total_g += grad_hess.g[r];
        total_h += grad_hess.h[r];
    }
    double left_g = 0.0, left_h = 0.0;
    for (std::size_t k = 0; k + 1 < sorted_rows.size(); ++k) {
        left_g += grad_hess.g[sorted_rows[k]];
        left_h += grad_hess.h[sorted_rows[k]];
        const double v1 = values[sorted_rows[k]];
        const double v2 = values[sorted_rows[k + 1]];
        if (v1 == v2) continue;
        const double threshold = 0.5 * (v1 + v2);
        if (!(v1 < threshold)) continue;  // midpoint collapsed onto v1
        const double right_g = total_g - left_g;
        const double right_h = total_h - left_h;
        if (left_h < params.min_child_hessian || right_h < params.min_child_hessian) {
            continue;
        }
        const double lambda = params.weight_penalty;
        if (!(left_h + lambda > 0.0) || !(right_h + lambda > 0.0) ||
            !(total_h + lambda > 0.0)) {
            continue;
        }
        const double gain =
            split_gain(left_g, left_h, right_g, right_h, lambda, params.leaf_penalty);
        if (!(gain > 0.0)) continue;
        // Strict > keeps the first (lowest feature, smallest threshold) winner.
        if (!best || gain > best->gain) {
            best = SplitCandidate{feature, threshold, gain};
        }
    }
}

std::vector<std::size_t> sort_rows_by_feature(const std::vector<std::size_t>& rows,
                                              const std::vector<double>& values) {
    std::vector<std::size_t> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    return sorted;
}

struct TreeBuilder {
    const Dataset& data;
    const GradHess& grad_hess;
    const HyperParams& params;
    std::vector<TreeNode> nodes;

    // sorted_per_feature holds this node's rows ordered by (value, row).
    int build(const std::vector<std::vector<std::size_t>>& sorted_per_feature,
              int depth) {
        std::optional<SplitCandidate> best;
        if (depth < params.max_depth) {
            for (std::size_t f = 0; f < data.n_features(); ++f) {
                scan_feature(static_cast<int>(f), sorted_per_feature[f],
                             data.column(f), grad_hess, params, best);
            }
        }
        const int index = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (!best) {
            double g = 0.0, h = 0.0;
            for (std::size_t r : sorted_per_feature[0]) {
                g += grad_hess.g[r];
                h += grad_hess.h[r];
            }
            const double denom = h + params.weight_penalty;
            nodes[index].weight = denom > 0.0 ? -g / denom : 0.0;
            return index;
        }
        const auto& split_values = data.column(best->feature);
        std::vector<std::vector<std::size_t>> left(data.n_features());
        std::vector<std::vector<std::size_t>> right(data.n_features());
        for (std::size_t f = 0; f < data.n_features(); ++f) {
            for (std::size_t r : sorted_per_feature[f]) {
                (split_values[r] < best->threshold ? left[f] : right[f]).push_back(r);
            }
        }
        const int li = build(left, depth + 1);
        const int ri = build(right, depth + 1);
        nodes[index].is_leaf = false;
        nodes[index].feature = best->feature;
        nodes[index].threshold = best->threshold;
        nodes[index].left = li;
        nodes[index].right = ri;
        return index;
    }
};

}  // namespace

std::optional<SplitCandidate> find_best_split(const std::vector<std::size_t>& rows,
                                              const GradHess& grad_hess,
                                              const Dataset& data,
                                              const HyperParams& params) {
    if (rows.empty()) throw std::invalid_argument("find_best_split: empty row set");
    std::optional<SplitCandidate> best;
    for (std::size_t f = 0; f < data.n_features(); ++f) {
        const auto sorted = sort_rows_by_feature(rows, data.column(f));
        scan_feature(static_cast<int>(f), sorted, data.column(f), grad_hess, params,
                     best);
    }
    return best;
}

RegressionTree grow_tree(const std::vector<std::size_t>& rows,
                         const GradHess& grad_hess,
                         const Dataset& data,
                         const HyperParams& params) {
    if (rows.empty()) throw std::invalid_argument("grow_tree: empty row set");
    std::vector<std::vector<std::size_t>> sorted(data.n_features());
    for (std::size_t f = 0; f < data.n_features(); ++f) {
        sorted[f] = sort_rows_by_feature(rows, data.column(f));
    }
    TreeBuilder builder{data, grad_hess, params, {}};
    builder.build(sorted, 0);
    return RegressionTree{std::move(builder.nodes)};
}

double RegressionTree::evaluate(const std::vector<double>& x) const {
    int i = 0;
    while (!nodes[i].is_leaf) {
        const auto f = static_cast<std::size_t>(nodes[i].feature);
        if (f >= x.size()) {
            throw std::invalid_argument("RegressionTree: covariate row too short");
        }
        i = x[f] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].weight;
}

int RegressionTree::leaf_count() const {
    int c = 0;
    for (const auto& node : nodes) c += node.is_leaf ? 1 : 0;
    return c;
}

double BoostedEnsemble::predict(const std::vector<double>& x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.evaluate(x);
    return base_score + shrinkage * sum;
}

void BoostedEnsemble::predict_rows(const Dataset& data, std::vector<double>& out) const {
    out.assign(data.n_rows(), base_score);
    std::vector<double> x(data.n_features());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) x[j] = data.covariate(i, j);
        double sum = 0.0;
        for (const auto& tree : trees) sum += tree.evaluate(x);
        out[i] = base_score + shrinkage * sum;
    }
}

BoostedEnsemble train(const Dataset& data, const LossSpec& loss,
                      const HyperParams& params) {
    params.validate();
    if (loss_size(loss) != data.n_rows()) {
        throw std::invalid_argument("train: loss length does not match data");
    }
    BoostedEnsemble model;
    model.base_score = 0.0;
    model.shrinkage = params.shrinkage;

    const std::size_t n = data.n_rows();
    std::vector<std::size_t> all_rows(n);
    for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;
    std::vector<double> predictions(n, 0.0);
    std::vector<double> x(data.n_features());

    for (int round = 1; round <= params.rounds; ++round) {
        const GradHess gh = evaluate_loss(loss, predictions);
        bool all_zero = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(gh.g[i]) || !std::isfinite(gh.h[i])) {
                throw std::runtime_error("train: non-finite gradient/hessian at round " +
                                         std::to_string(round) + ", observation " +
                                         std::to_string(i));
            }
            if (gh.g[i] != 0.0) all_zero = false;
        }
        if (all_zero) break;  // every further tree would be a zero leaf
        RegressionTree tree = grow_tree(all_rows, gh, data, params);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < data.n_features(); ++j) {
                x[j] = data.covariate(i, j);
            }
            predictions[i] += params.shrinkage * tree.evaluate(x);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::string BoostedEnsemble::to_json() const {
    nlohmann::json j;
    j["base_score"] = base_score;
    j["eta"] = shrinkage;
    j["trees"] = nlohmann::json::array();
    for (const auto& tree : trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : tree.nodes) {
            if (node.is_leaf) {
                nodes.push_back({{"weight", node.weight}});
            } else {
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right}});
            }
        }
        j["trees"].push_back({{"nodes", std::move(nodes)}});
    }
    return j.dump();
}

BoostedEnsemble from_json_object(const nlohmann::json& j) {
    BoostedEnsemble model;
    model.base_score = j.at("base_score").get<double>();
    model.shrinkage = j.at("eta").get<double>();
    for (const auto& jt : j.at("trees")) {
        RegressionTree tree;
        for (const auto& jn : jt.at("nodes")) {
            TreeNode node;
            if (jn.contains("weight")) {
                node.weight = jn.at("weight").get<double>();
            } else {
                node.is_leaf = false;
                node.feature = jn.at("feature").get<int>();
                node.threshold = jn.at("threshold").get<double>();
                node.left = jn.at("left").get<int>();
                node.right = jn.at("right").get<int>();
            }
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

BoostedEnsemble BoostedEnsemble::from_json(const std::string& text) {
    return from_json_object(nlohmann::json::parse(text));
}

}  // namespace itrboost
