#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "itrboost/tune.hpp"

namespace itrboost {

struct BenchConfig {
    std::vector<int> scenarios{1};
    std::vector<std::pair<std::size_t, std::size_t>> sizes{{400, 10}};  // (n, p)
    int replications = 20;
    std::size_t test_n = 3000;
    std::vector<Method> methods{Method::IndirectBoosting, Method::DirectBoosting1,
                                Method::DirectBoosting2, Method::QLearning,
                                Method::DLearning};
    std::uint64_t master_seed = 1;
    Grid grid;
    std::optional<HyperParams> fixed_params;  // skip tuning when set
    bool tune_every_rep = false;
    int cv_folds = 10;
    std::string out_dir;  // empty: nothing persisted

    std::string to_json() const;
    static BenchConfig from_json(const std::string& text);
};

struct BenchCell {
    Method method;
    int scenario = 0;
    std::size_t n = 0;
    std::size_t p = 0;
    int replications = 0;
    bool failed = false;
    std::string failure;
    double mean_misclassification = 0.0;
    double sd_misclassification = 0.0;
    double mean_value = 0.0;
    double sd_value = 0.0;
    // per-replication rows: (misclassification, value, oracle value)
    std::vector<double> misclassifications;
    std::vector<double> values;
    std::vector<double> oracle_values;
};

struct BenchSummary {
    std::vector<BenchCell> cells;

    std::string summary_csv() const;
};

// Runs the simulation study: per (scenario, size, method), tune once on the
// first replication (unless fixed or tune_every_rep), fit each replication
// on its own training trial, and score misclassification and value on a
// shared per-replication test trial. Cells run on a worker pool capped by
// ITRBOOST_THREADS; seeds derive only from (master_seed, scenario, size,
// replication, role), so results are schedule-independent.
BenchSummary run(const BenchConfig& config);

int worker_pool_size();  // ITRBOOST_THREADS or hardware concurrency

}  // namespace itrboost
