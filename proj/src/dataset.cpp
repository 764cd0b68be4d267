#include "itrboost/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "itrboost/rng.hpp"

namespace itrboost {

namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(std::string("non-finite value in ") + what);
        }
    }
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error("row " + std::to_string(row) + ": malformed value '" +
                                 s + "' in column " + col);
    }
    return v;
}

}  // namespace

Dataset::Dataset(std::vector<std::vector<double>> columns,
                 std::vector<double> treatments,
                 std::vector<double> outcomes,
                 std::vector<double> propensities)
    : columns_(std::move(columns)),
      treatments_(std::move(treatments)),
      outcomes_(std::move(outcomes)),
      propensities_(std::move(propensities)) {
    const std::size_t n = treatments_.size();
    if (n < 1) throw std::invalid_argument("Dataset needs at least one observation");
    if (columns_.empty()) throw std::invalid_argument("Dataset needs at least one feature");
    if (outcomes_.size() != n || propensities_.size() != n) {
        throw std::invalid_argument("Dataset field lengths differ");
    }
    for (const auto& col : columns_) {
        if (col.size() != n) throw std::invalid_argument("covariate column length differs");
        check_finite(col, "covariates");
    }
    check_finite(outcomes_, "outcomes");
    for (std::size_t i = 0; i < n; ++i) {
        if (treatments_[i] != 1.0 && treatments_[i] != -1.0) {
            throw std::invalid_argument("row " + std::to_string(i) +
                                        ": treatment must be -1 or +1");
        }
        if (!(propensities_[i] > 0.0) || !(propensities_[i] < 1.0)) {
            throw std::invalid_argument("row " + std::to_string(i) +
                                        ": propensity must lie strictly in (0,1)");
        }
    }
}

std::vector<double> Dataset::row(std::size_t i) const {
    std::vector<double> x(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) x[j] = columns_[j][i];
    return x;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Dataset load_csv(const std::string& path, const PropensitySpec& propensity) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_line(line);

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    long treatment_col = -1, outcome_col = -1, propensity_col = -1;
    const auto* by_column = std::get_if<ColumnPropensity>(&propensity);
    for (std::size_t j = 0; j < header.size(); ++j) {
        const std::string& name = header[j];
        if (name.rfind("x_", 0) == 0) {
            feature_cols.push_back(j);
            feature_names.push_back(name);
        } else if (name == "treatment") {
            treatment_col = static_cast<long>(j);
        } else if (name == "outcome") {
            outcome_col = static_cast<long>(j);
        } else if (by_column && name == by_column->name) {
            propensity_col = static_cast<long>(j);
        }
    }
    if (treatment_col < 0) throw std::runtime_error(path + ": missing column 'treatment'");
    if (outcome_col < 0) throw std::runtime_error(path + ": missing column 'outcome'");
    if (feature_cols.empty()) throw std::runtime_error(path + ": no feature columns (x_*)");
    if (by_column && propensity_col < 0) {
        throw std::runtime_error(path + ": missing propensity column '" + by_column->name + "'");
    }
    double const_propensity = 0.5;
    if (const auto* c = std::get_if<ConstantPropensity>(&propensity)) {
        if (!(c->value > 0.0) || !(c->value < 1.0)) {
            throw std::invalid_argument("constant propensity must lie strictly in (0,1)");
        }
        const_propensity = c->value;
    }

    std::vector<std::vector<double>> columns(feature_cols.size());
    std::vector<double> treatments, outcomes, propensities;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_no;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(row_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            columns[f].push_back(
                parse_double(fields[feature_cols[f]], row_no, feature_names[f]));
        }
        const double a = parse_double(fields[treatment_col], row_no, "treatment");
        if (a != 1.0 && a != -1.0) {
            throw std::runtime_error("row " + std::to_string(row_no) +
                                     ": treatment must be -1 or 1, got " +
                                     fields[treatment_col]);
        }
        treatments.push_back(a);
        outcomes.push_back(parse_double(fields[outcome_col], row_no, "outcome"));
        double pi = const_propensity;
        if (propensity_col >= 0) {
            pi = parse_double(fields[propensity_col], row_no, header[propensity_col]);
            if (!(pi > 0.0) || !(pi < 1.0)) {
                throw std::runtime_error("row " + std::to_string(row_no) +
                                         ": propensity outside (0,1): " +
                                         fields[propensity_col]);
            }
        }
        propensities.push_back(pi);
    }
    if (treatments.empty()) throw std::runtime_error(path + ": no data rows");
    return Dataset(std::move(columns), std::move(treatments), std::move(outcomes),
                   std::move(propensities));
}

void write_csv(const std::string& path, const Dataset& data,
               const std::string& extra_name, const std::vector<double>* extra) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        out << "x_" << (j + 1) << ',';
    }
    out << "treatment,outcome";
    if (extra) out << ',' << extra_name;
    out << '\n';
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t j = 0; j < data.n_features(); ++j) {
            out << format_double(data.covariate(i, j)) << ',';
        }
        out << (data.treatment(i) > 0 ? "1" : "-1") << ','
            << format_double(data.outcome(i));
        if (extra) out << ',' << format_double((*extra)[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("make_folds: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("make_folds: k > n");
    // Fisher-Yates with counter-based draws, then deal round-robin.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(seed, /*stream=*/0x666f6c64);  // "fold"
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % (i + 1));
        std::swap(order[i], order[j]);
    }
    FoldAssignment fa;
    fa.k = k;
    fa.seed = seed;
    fa.fold_of.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        fa.fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }
    return fa;
}

std::vector<std::size_t> FoldAssignment::fold_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldAssignment::complement_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

Dataset split(const Dataset& data, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw std::invalid_argument("split: empty index set");
    for (std::size_t i : indices) {
        if (i >= data.n_rows()) throw std::invalid_argument("split: index out of range");
    }
    std::vector<std::vector<double>> columns(data.n_features());
    std::vector<double> a, y, pi;
    a.reserve(indices.size());
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        columns[j].reserve(indices.size());
        const auto& col = data.column(j);
        for (std::size_t i : indices) columns[j].push_back(col[i]);
    }
    for (std::size_t i : indices) {
        a.push_back(data.treatment(i));
        y.push_back(data.outcome(i));
        pi.push_back(data.propensity(i));
    }
    return Dataset(std::move(columns), std::move(a), std::move(y), std::move(pi));
}

}  // namespace itrboost
