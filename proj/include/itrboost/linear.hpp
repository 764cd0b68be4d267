#pragma once

#include <vector>

namespace itrboost {

struct LinearFit {
    double intercept = 0.0;
    std::vector<double> coefficients;
    bool ridge_fallback = false;  // near-singular system was stabilized
};

struct LassoConfig {
    double penalty = 0.0;       // lambda on standardized coefficients
    double tolerance = 1e-8;    // max coefficient change per sweep
    int max_sweeps = 10000;
};

// Weighted least squares of y on (1, X) minimizing sum w_i (y_i - b0 - b'x)^2.
// Normal equations solved by Cholesky; a near-singular system is retried with
// a ridge of 1e-10 * trace / dim (flagged in the result); an exactly singular
// one (including n < p+1) throws.
LinearFit weighted_least_squares(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w);

// L1-penalized weighted least squares via cyclic coordinate descent with
// soft-thresholding. Features are standardized with weighted means/variances,
// the intercept is unpenalized, and coefficients are reported on the original
// scale. Objective on the standardized scale:
//   0.5 * sum w_i (y_i - b0 - b'x~_i)^2 + penalty * ||b||_1
// so the all-zero threshold is max_j |sum_i w_i x~_ij r_i|.
LinearFit weighted_lasso(const std::vector<std::vector<double>>& columns,
                         const std::vector<double>& y,
                         const std::vector<double>& w,
                         const LassoConfig& cfg);

// Solves A x = b for symmetric positive definite A (row-major dim x dim).
// Throws std::runtime_error when the factorization encounters a nonpositive
// pivot; the message carries a condition estimate.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t dim);

}  // namespace itrboost
