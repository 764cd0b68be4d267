#include "itrboost/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "itrboost/eval.hpp"
#include "itrboost/rng.hpp"
#include "itrboost/sim.hpp"

namespace itrboost {

namespace {

// Roles keep the train, test, and tuning streams of one replication disjoint.
enum SeedRole : std::uint64_t { kTrainRole = 0, kTestRole = 1, kTuneRole = 2 };

std::uint64_t derive_seed(std::uint64_t master, int scenario, std::size_t n,
                          std::size_t p, int replication, SeedRole role) {
    std::uint64_t s = CounterRng::hash(master, 0x62656e6368ULL,  // "bench"
                                       static_cast<std::uint64_t>(scenario));
    s = CounterRng::hash(s, n, p);
    return CounterRng::hash(s, static_cast<std::uint64_t>(replication),
                            static_cast<std::uint64_t>(role));
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> default_lasso_grid() { return {0.5, 1, 2, 4, 8, 16, 32, 64}; }

void run_cell(const BenchConfig& config, BenchCell& cell) {
    Grid grid = config.grid;
    if (cell.method == Method::DLearning && cell.p > 10 &&
        grid.lasso_penalties.empty()) {
        grid.lasso_penalties = default_lasso_grid();
    }
    const bool wants_lasso = cell.method == Method::DLearning && cell.p > 10;
    const bool needs_tuning =
        !config.fixed_params &&
        (method_is_boosting(cell.method) || wants_lasso);

    HyperParams params = config.fixed_params.value_or(grid.base);
    std::optional<double> lasso_penalty;
    bool tuned = false;

    for (int rep = 0; rep < config.replications; ++rep) {
        ScenarioSpec train_spec{cell.scenario, cell.n, cell.p,
                                derive_seed(config.master_seed, cell.scenario, cell.n,
                                            cell.p, rep, kTrainRole)};
        ScenarioSpec test_spec{cell.scenario, config.test_n, cell.p,
                               derive_seed(config.master_seed, cell.scenario, cell.n,
                                           cell.p, rep, kTestRole)};
        const SimulatedTrial train_trial = generate(train_spec);
        const SimulatedTrial test_trial = generate(test_spec);

        if (needs_tuning && (!tuned || config.tune_every_rep)) {
            const auto tune_seed = derive_seed(config.master_seed, cell.scenario,
                                               cell.n, cell.p, rep, kTuneRole);
            const auto result = cross_validate(cell.method, train_trial.data, grid,
                                               config.cv_folds, tune_seed);
            params = result.best;
            lasso_penalty = result.best_lasso_penalty;
            tuned = true;
        } else if (wants_lasso && !needs_tuning && !lasso_penalty) {
            lasso_penalty = grid.lasso_penalties.empty() ? 1.0
                                                         : grid.lasso_penalties.front();
        }

        const ItrPolicy policy =
            fit_method(cell.method, train_trial.data, params, lasso_penalty);
        const auto decisions = policy.decide_rows(test_trial.data);
        cell.misclassifications.push_back(
            misclassification(decisions, test_trial.oracle_decisions));
        cell.values.push_back(estimate_value(decisions, test_trial.data));
        cell.oracle_values.push_back(
            estimate_value(test_trial.oracle_decisions, test_trial.data));
    }
    cell.replications = static_cast<int>(cell.values.size());
    mean_sd(cell.misclassifications, cell.mean_misclassification,
            cell.sd_misclassification);
    mean_sd(cell.values, cell.mean_value, cell.sd_value);
}

std::string cell_file_name(const BenchCell& cell) {
    return std::to_string(cell.scenario) + "_" + std::to_string(cell.n) + "_" +
           std::to_string(cell.p) + "_" + method_name(cell.method) + ".csv";
}

}  // namespace

int worker_pool_size() {
    if (const char* env = std::getenv("ITRBOOST_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

BenchSummary run(const BenchConfig& config) {
    if (config.scenarios.empty() || config.sizes.empty() || config.methods.empty()) {
        throw std::invalid_argument("bench: empty scenario/size/method selection");
    }
    if (config.replications < 1 || config.test_n < 1) {
        throw std::invalid_argument("bench: replications and test_n must be >= 1");
    }

    BenchSummary summary;
    for (int scenario : config.scenarios) {
        for (const auto& [n, p] : config.sizes) {
            for (Method method : config.methods) {
                BenchCell cell;
                cell.method = method;
                cell.scenario = scenario;
                cell.n = n;
                cell.p = p;
                summary.cells.push_back(std::move(cell));
            }
        }
    }

    // Cells are independent; per-cell seeds never depend on scheduling.
    const int workers =
        std::min<int>(worker_pool_size(), static_cast<int>(summary.cells.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= summary.cells.size()) return;
            try {
                run_cell(config, summary.cells[i]);
            } catch (const std::exception& e) {
                summary.cells[i].failed = true;
                summary.cells[i].failure = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(fs::path(config.out_dir) / "cells");
        {
            std::ofstream out(fs::path(config.out_dir) / "summary.csv");
            out << summary.summary_csv();
        }
        {
            std::ofstream out(fs::path(config.out_dir) / "config.json");
            out << config.to_json() << '\n';
        }
        for (const auto& cell : summary.cells) {
            std::ofstream out(fs::path(config.out_dir) / "cells" / cell_file_name(cell));
            out << "replication,misclassification,value,oracle_value\n";
            for (std::size_t r = 0; r < cell.values.size(); ++r) {
                out << r << ',' << format_double(cell.misclassifications[r]) << ','
                    << format_double(cell.values[r]) << ','
                    << format_double(cell.oracle_values[r]) << '\n';
            }
        }
    }
    return summary;
}

std::string BenchSummary::summary_csv() const {
    std::ostringstream out;
    out << "method,scenario,n,p,replications,mean_misclassification,"
           "sd_misclassification,mean_value,sd_value,failed\n";
    for (const auto& cell : cells) {
        out << method_name(cell.method) << ',' << cell.scenario << ',' << cell.n << ','
            << cell.p << ',' << cell.replications << ','
            << format_double(cell.mean_misclassification) << ','
            << format_double(cell.sd_misclassification) << ','
            << format_double(cell.mean_value) << ',' << format_double(cell.sd_value)
            << ',' << (cell.failed ? cell.failure : "") << '\n';
    }
    return out.str();
}

std::string BenchConfig::to_json() const {
    nlohmann::json j;
    j["scenarios"] = scenarios;
    j["sizes"] = nlohmann::json::array();
    for (const auto& [n, p] : sizes) j["sizes"].push_back({{"n", n}, {"p", p}});
    j["replications"] = replications;
    j["test_n"] = test_n;
    j["methods"] = nlohmann::json::array();
    for (Method m : methods) j["methods"].push_back(method_name(m));
    j["master_seed"] = master_seed;
    j["grid"] = {{"rounds", grid.rounds},
                 {"shrinkages", grid.shrinkages},
                 {"depths", grid.depths},
                 {"lasso_penalties", grid.lasso_penalties},
                 {"leaf_penalty", grid.base.leaf_penalty},
                 {"weight_penalty", grid.base.weight_penalty},
                 {"min_child_hessian", grid.base.min_child_hessian}};
    if (fixed_params) {
        j["fixed_params"] = {{"rounds", fixed_params->rounds},
                             {"shrinkage", fixed_params->shrinkage},
                             {"max_depth", fixed_params->max_depth},
                             {"leaf_penalty", fixed_params->leaf_penalty},
                             {"weight_penalty", fixed_params->weight_penalty},
                             {"min_child_hessian", fixed_params->min_child_hessian}};
    }
    j["tune_every_rep"] = tune_every_rep;
    j["cv_folds"] = cv_folds;
    if (!out_dir.empty()) j["out_dir"] = out_dir;
    return j.dump(2);
}

BenchConfig BenchConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BenchConfig c;
    if (j.contains("scenarios")) c.scenarios = j["scenarios"].get<std::vector<int>>();
    if (j.contains("sizes")) {
        c.sizes.clear();
        for (const auto& s : j["sizes"]) {
            c.sizes.emplace_back(s.at("n").get<std::size_t>(),
                                 s.at("p").get<std::size_t>());
        }
    }
    if (j.contains("replications")) c.replications = j["replications"].get<int>();
    if (j.contains("test_n")) c.test_n = j["test_n"].get<std::size_t>();
    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j["methods"]) {
            c.methods.push_back(method_from_name(m.get<std::string>()));
        }
    }
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (g.contains("rounds")) c.grid.rounds = g["rounds"].get<std::vector<int>>();
        if (g.contains("shrinkages")) {
            c.grid.shrinkages = g["shrinkages"].get<std::vector<double>>();
        }
        if (g.contains("depths")) c.grid.depths = g["depths"].get<std::vector<int>>();
        if (g.contains("lasso_penalties")) {
            c.grid.lasso_penalties = g["lasso_penalties"].get<std::vector<double>>();
        }
        if (g.contains("leaf_penalty")) {
            c.grid.base.leaf_penalty = g["leaf_penalty"].get<double>();
        }
        if (g.contains("weight_penalty")) {
            c.grid.base.weight_penalty = g["weight_penalty"].get<double>();
        }
        if (g.contains("min_child_hessian")) {
            c.grid.base.min_child_hessian = g["min_child_hessian"].get<double>();
        }
    }
    if (j.contains("fixed_params")) {
        const auto& f = j["fixed_params"];
        HyperParams hp;
        hp.rounds = f.at("rounds").get<int>();
        hp.shrinkage = f.at("shrinkage").get<double>();
        hp.max_depth = f.at("max_depth").get<int>();
        if (f.contains("leaf_penalty")) hp.leaf_penalty = f["leaf_penalty"].get<double>();
        if (f.contains("weight_penalty")) {
            hp.weight_penalty = f["weight_penalty"].get<double>();
        }
        if (f.contains("min_child_hessian")) {
            hp.min_child_hessian = f["min_child_hessian"].get<double>();
        }
        hp.validate();
        c.fixed_params = hp;
    }
    if (j.contains("tune_every_rep")) c.tune_every_rep = j["tune_every_rep"].get<bool>();
    if (j.contains("cv_folds")) c.cv_folds = j["cv_folds"].get<int>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    return c;
}

}  // namespace itrboost
