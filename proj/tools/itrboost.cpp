#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "itrboost/bench.hpp"
#include "itrboost/eval.hpp"
#include "itrboost/itr.hpp"
#include "itrboost/sim.hpp"
#include "itrboost/tune.hpp"

namespace {

using namespace itrboost;

PropensitySpec parse_propensity(const std::string& spec) {
    if (spec.empty()) return ConstantPropensity{0.5};
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), v);
    if (ec == std::errc{} && ptr == spec.data() + spec.size()) {
        return ConstantPropensity{v};
    }
    return ColumnPropensity{spec};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Pulls one named column out of a CSV file (for the simulate-emitted oracle).
std::vector<double> read_column(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    long target = -1;
    {
        std::stringstream ss(line);
        std::string field;
        long j = 0;
        while (std::getline(ss, field, ',')) {
            if (field == name) target = j;
            ++j;
        }
    }
    if (target < 0) throw std::runtime_error(path + ": missing column '" + name + "'");
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        long j = 0;
        while (std::getline(ss, field, ',')) {
            if (j == target) out.push_back(std::stod(field));
            ++j;
        }
    }
    return out;
}

Grid parse_grid_file(const std::string& path) {
    const auto j = nlohmann::json::parse(read_file(path));
    Grid g;
    if (j.contains("rounds")) g.rounds = j["rounds"].get<std::vector<int>>();
    if (j.contains("shrinkages")) g.shrinkages = j["shrinkages"].get<std::vector<double>>();
    if (j.contains("depths")) g.depths = j["depths"].get<std::vector<int>>();
    if (j.contains("lasso_penalties")) {
        g.lasso_penalties = j["lasso_penalties"].get<std::vector<double>>();
    }
    if (j.contains("leaf_penalty")) g.base.leaf_penalty = j["leaf_penalty"].get<double>();
    if (j.contains("weight_penalty")) {
        g.base.weight_penalty = j["weight_penalty"].get<double>();
    }
    if (j.contains("min_child_hessian")) {
        g.base.min_child_hessian = j["min_child_hessian"].get<double>();
    }
    return g;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Gradient-tree-boosting estimation of individualized treatment rules"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic trial CSV");
    int sim_scenario = 1;
    std::size_t sim_n = 400, sim_p = 10;
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    simulate->add_option("--scenario", sim_scenario, "Scenario id (1-5)")->required();
    simulate->add_option("--n", sim_n, "Sample size")->required();
    simulate->add_option("--p", sim_p, "Covariate dimension")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    simulate->add_option("--out", sim_out, "Output CSV path")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "Fit a treatment rule");
    std::string tr_method, tr_data, tr_propensity, tr_model_out, tr_mu = "linear";
    bool tr_cv = false;
    HyperParams tr_params;
    std::optional<double> tr_lasso;
    double tr_lasso_value = 0.0;
    int tr_cv_k = 10;
    std::uint64_t tr_cv_seed = 1;
    train_cmd
        ->add_option("--method", tr_method,
                     "indirect-boosting | direct-boosting-1 | direct-boosting-2 | "
                     "q-linear | d-linear")
        ->required();
    train_cmd->add_option("--data", tr_data, "Training CSV")->required();
    train_cmd->add_option("--propensity", tr_propensity,
                          "Constant in (0,1) or a column name (default 0.5)");
    train_cmd->add_option("--model-out", tr_model_out, "Output model JSON")->required();
    train_cmd->add_flag("--cv", tr_cv, "Tune (K, eta, d) by cross validation");
    train_cmd->add_option("--rounds", tr_params.rounds, "Boosting rounds K")
        ->capture_default_str();
    train_cmd->add_option("--eta", tr_params.shrinkage, "Shrinkage")
        ->capture_default_str();
    train_cmd->add_option("--depth", tr_params.max_depth, "Maximum tree depth")
        ->capture_default_str();
    train_cmd->add_option("--gamma", tr_params.leaf_penalty, "Per-leaf penalty")
        ->capture_default_str();
    train_cmd->add_option("--lambda", tr_params.weight_penalty, "L2 leaf penalty")
        ->capture_default_str();
    train_cmd->add_option("--min-child-hessian", tr_params.min_child_hessian,
                          "Minimum child hessian")
        ->capture_default_str();
    auto* tr_lasso_opt = train_cmd->add_option(
        "--lasso", tr_lasso_value, "L1 penalty for d-linear / lasso mu estimation");
    train_cmd->add_option("--mu", tr_mu,
                          "Common-effect estimator for direct-boosting-2: "
                          "linear | lasso | null")
        ->capture_default_str();
    train_cmd->add_option("--k", tr_cv_k, "CV folds")->capture_default_str();
    train_cmd->add_option("--seed", tr_cv_seed, "CV fold seed")->capture_default_str();

    // predict
    auto* predict = app.add_subcommand("predict", "Write one decision per row");
    std::string pr_model, pr_data, pr_out, pr_propensity;
    predict->add_option("--model", pr_model, "Model JSON")->required();
    predict->add_option("--data", pr_data, "Input CSV")->required();
    predict->add_option("--propensity", pr_propensity, "Constant or column name");
    predict->add_option("--out", pr_out, "Output path (one decision per line)")
        ->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Value / misclassification report");
    std::string ev_model, ev_data, ev_oracle_col, ev_report, ev_propensity;
    evaluate->add_option("--model", ev_model, "Model JSON")->required();
    evaluate->add_option("--data", ev_data, "Evaluation CSV")->required();
    evaluate->add_option("--propensity", ev_propensity, "Constant or column name");
    evaluate->add_option("--oracle-col", ev_oracle_col,
                         "Column holding the known optimal decisions");
    evaluate->add_option("--report", ev_report, "Output report JSON path");

    // cv
    auto* cv = app.add_subcommand("cv", "Cross-validated hyperparameter search");
    std::string cv_method, cv_data, cv_grid, cv_propensity;
    int cv_k = 10;
    std::uint64_t cv_seed = 1;
    cv->add_option("--method", cv_method, "Method name")->required();
    cv->add_option("--data", cv_data, "Training CSV")->required();
    cv->add_option("--propensity", cv_propensity, "Constant or column name");
    cv->add_option("--grid", cv_grid, "Grid JSON file (defaults when omitted)");
    cv->add_option("--k", cv_k, "Folds")->capture_default_str();
    cv->add_option("--seed", cv_seed, "Fold seed")->capture_default_str();

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "Run the simulation study");
    std::string bm_config, bm_out;
    bool bm_full = false;
    benchmark->add_option("--config", bm_config, "BenchConfig JSON file")->required();
    benchmark->add_option("--out", bm_out, "Output directory (overrides config)");
    benchmark->add_flag("--full", bm_full, "Force 100 replications");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    if (simulate->parsed()) {
        const SimulatedTrial trial = generate({sim_scenario, sim_n, sim_p, sim_seed});
        write_csv(sim_out, trial.data, "oracle", &trial.oracle_decisions);
        double plus = 0.0;
        for (double d : trial.oracle_decisions) plus += d > 0 ? 1.0 : 0.0;
        std::cout << "n=" << sim_n << " p=" << sim_p << " oracle_plus_fraction="
                  << plus / static_cast<double>(sim_n) << "\n";
        return 0;
    }

    if (train_cmd->parsed()) {
        const Method method = method_from_name(tr_method);
        const Dataset data = load_csv(tr_data, parse_propensity(tr_propensity));
        if (tr_lasso_opt->count() > 0) tr_lasso = tr_lasso_value;
        HyperParams params = tr_params;
        std::optional<double> lasso = tr_lasso;
        if (tr_cv) {
            Grid grid;
            grid.base = tr_params;
            const auto result = cross_validate(method, data, grid, tr_cv_k, tr_cv_seed);
            params = result.best;
            lasso = result.best_lasso_penalty;
        }
        params.validate();
        std::optional<ItrPolicy> policy;
        if (method == Method::DirectBoosting2) {
            CommonEffectModel mu;
            if (tr_mu == "linear") {
                mu = estimate_common_effect_linear(data);
            } else if (tr_mu == "lasso") {
                LassoConfig cfg;
                cfg.penalty = tr_lasso.value_or(1.0);
                mu = estimate_common_effect_lasso(data, cfg);
            } else if (tr_mu == "null") {
                mu = estimate_common_effect_null(data);
            } else {
                throw CLI::ValidationError("--mu must be linear, lasso, or null");
            }
            policy = fit_direct_boosting_2(data, params, mu);
        } else {
            policy = fit_method(method, data, params, lasso);
        }
        std::ofstream out(tr_model_out);
        if (!out) throw std::runtime_error("cannot write " + tr_model_out);
        out << policy->to_json() << '\n';
        std::cout << "method=" << tr_method;
        if (method_is_boosting(method)) {
            std::cout << " rounds=" << params.rounds << " eta=" << params.shrinkage
                      << " depth=" << params.max_depth;
        }
        if (lasso) std::cout << " lasso=" << *lasso;
        std::cout << "\n";
        return 0;
    }

    if (predict->parsed()) {
        const ItrPolicy policy = ItrPolicy::from_json(read_file(pr_model));
        const Dataset data = load_csv(pr_data, parse_propensity(pr_propensity));
        const auto decisions = policy.decide_rows(data);
        std::ofstream out(pr_out);
        if (!out) throw std::runtime_error("cannot write " + pr_out);
        for (double d : decisions) out << (d > 0 ? "1" : "-1") << '\n';
        return 0;
    }

    if (evaluate->parsed()) {
        const ItrPolicy policy = ItrPolicy::from_json(read_file(ev_model));
        const Dataset data = load_csv(ev_data, parse_propensity(ev_propensity));
        const auto decisions = policy.decide_rows(data);
        EvalReport report;
        report.value = estimate_value(decisions, data);
        if (!ev_oracle_col.empty()) {
            report.misclassification =
                misclassification(decisions, read_column(ev_data, ev_oracle_col));
        }
        const std::string text = report.to_json();
        std::cout << text << "\n";
        if (!ev_report.empty()) {
            std::ofstream out(ev_report);
            if (!out) throw std::runtime_error("cannot write " + ev_report);
            out << text << '\n';
        }
        return 0;
    }

    if (cv->parsed()) {
        const Method method = method_from_name(cv_method);
        const Dataset data = load_csv(cv_data, parse_propensity(cv_propensity));
        const Grid grid = cv_grid.empty() ? Grid{} : parse_grid_file(cv_grid);
        const auto result = cross_validate(method, data, grid, cv_k, cv_seed);
        std::cout << result.table_csv();
        std::cout << "best: rounds=" << result.best.rounds
                  << " eta=" << result.best.shrinkage
                  << " depth=" << result.best.max_depth;
        if (result.best_lasso_penalty) {
            std::cout << " lasso=" << *result.best_lasso_penalty;
        }
        std::cout << "\n";
        return 0;
    }

    if (benchmark->parsed()) {
        BenchConfig config = BenchConfig::from_json(read_file(bm_config));
        if (!bm_out.empty()) config.out_dir = bm_out;
        if (bm_full) {
            std::cerr << "warning: --full runs 100 replications per cell; expect a "
                      << "long runtime\n";
            config.replications = 100;
        }
        const BenchSummary summary = run(config);
        std::cout << summary.summary_csv();
        for (const auto& cell : summary.cells) {
            if (cell.failed) return 1;
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const CLI::ParseError&) {
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
