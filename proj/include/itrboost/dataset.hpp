#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace itrboost {

// Trial data: covariates X (n x p), treatments A in {-1,+1}, outcomes Y,
// and the propensity of the received treatment pi_{A_i}(X_i).
// Covariates are stored column-major so per-feature split scans are
// contiguous. Immutable after construction.
class Dataset {
public:
    Dataset(std::vector<std::vector<double>> columns,
            std::vector<double> treatments,
            std::vector<double> outcomes,
            std::vector<double> propensities);

    std::size_t n_rows() const { return treatments_.size(); }
    std::size_t n_features() const { return columns_.size(); }

    const std::vector<double>& column(std::size_t j) const { return columns_[j]; }
    double covariate(std::size_t i, std::size_t j) const { return columns_[j][i]; }
    std::vector<double> row(std::size_t i) const;

    double treatment(std::size_t i) const { return treatments_[i]; }
    double outcome(std::size_t i) const { return outcomes_[i]; }
    double propensity(std::size_t i) const { return propensities_[i]; }

    const std::vector<double>& treatments() const { return treatments_; }
    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<double>& propensities() const { return propensities_; }

private:
    std::vector<std::vector<double>> columns_;  // p columns of length n
    std::vector<double> treatments_;
    std::vector<double> outcomes_;
    std::vector<double> propensities_;
};

// How propensities are obtained at load time: a known constant (randomized
// trial) or a named CSV column.
struct ConstantPropensity {
    double value = 0.5;
};
struct ColumnPropensity {
    std::string name;
};
using PropensitySpec = std::variant<ConstantPropensity, ColumnPropensity>;

struct FoldAssignment {
    std::vector<int> fold_of;  // length n, entries in [0, k)
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<std::size_t> fold_indices(int fold) const;
    std::vector<std::size_t> complement_indices(int fold) const;
};

// CSV ingestion. Header mandatory: feature columns prefixed "x_", plus
// `treatment`, `outcome`, and optionally the propensity column named by the
// spec. Feature column order in the file defines covariate column order.
Dataset load_csv(const std::string& path, const PropensitySpec& propensity = ConstantPropensity{});

// Writes `x_1,...,x_p,treatment,outcome` rows; doubles use shortest
// round-trip formatting so a reload reproduces values exactly. `extra`
// optionally appends one more column (e.g. the simulation oracle).
void write_csv(const std::string& path, const Dataset& data,
               const std::string& extra_name = "",
               const std::vector<double>* extra = nullptr);

// Deterministic balanced k-fold assignment (fold sizes differ by at most 1).
FoldAssignment make_folds(std::size_t n, int k, std::uint64_t seed);

// Row subset preserving column order. Indices must be valid and nonempty.
Dataset split(const Dataset& data, const std::vector<std::size_t>& indices);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace itrboost
