#include "itrboost/linear.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace itrboost {

std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t dim) {
    // In-place lower Cholesky on the row-major copy.
    double max_pivot = 0.0, min_pivot = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        double d = a[j * dim + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * dim + k] * a[j * dim + k];
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw std::runtime_error(
                "singular system: nonpositive pivot at column " + std::to_string(j) +
                " (condition estimate >= " +
                std::to_string(min_pivot > 0.0 ? max_pivot / min_pivot : INFINITY) + ")");
        }
        d = std::sqrt(d);
        a[j * dim + j] = d;
        max_pivot = std::max(max_pivot, d);
        min_pivot = (j == 0) ? d : std::min(min_pivot, d);
        for (std::size_t i = j + 1; i < dim; ++i) {
            double s = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
            a[i * dim + j] = s / d;
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < dim; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * dim + k] * b[k];
        b[i] = s / a[i * dim + i];
    }
    for (std::size_t ii = dim; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < dim; ++k) s -= a[k * dim + ii] * b[k];
        b[ii] = s / a[ii * dim + ii];
    }
    return b;
}

namespace {

// Weighted normal equations for the design (1, X).
void build_normal_equations(const std::vector<std::vector<double>>& columns,
                            const std::vector<double>& y,
                            const std::vector<double>& w,
                            std::vector<double>& a, std::vector<double>& b) {
    const std::size_t p = columns.size();
    const std::size_t n = y.size();
    const std::size_t dim = p + 1;
    a.assign(dim * dim, 0.0);
    b.assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        a[0] += wi;
        b[0] += wi * y[i];
        for (std::size_t j = 0; j < p; ++j) {
            const double xj = columns[j][i];
            a[(j + 1) * dim] += wi * xj;
            b[j + 1] += wi * xj * y[i];
            for (std::size_t k = 0; k <= j; ++k) {
                a[(j + 1) * dim + (k + 1)] += wi * xj * columns[k][i];
            }
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = j + 1; k < dim; ++k) {
            a[j * dim + k] = a[k * dim + j];
        }
    }
}

}  // namespace

LinearFit weighted_least_squares(const std::vector<std::vector<double>>& columns,
                                 const std::vector<double>& y,
                                 const std::vector<double>& w) {
    const std::size_t p = columns.size();
    const std::size_t n = y.size();
    if (w.size() != n) throw std::invalid_argument("weighted_least_squares: length mismatch");
    if (n < p + 1) {
        throw std::runtime_error("singular system: n = " + std::to_string(n) +
                                 " rows cannot identify " + std::to_string(p + 1) +
                                 " coefficients");
    }
    std::vector<double> a, b;
    build_normal_equations(columns, y, w, a, b);
    const std::size_t dim = p + 1;
    LinearFit fit;
    try {
        auto x = cholesky_solve(a, b, dim);
        fit.intercept = x[0];
        fit.coefficients.assign(x.begin() + 1, x.end());
        return fit;
    } catch (const std::runtime_error&) {
        double trace = 0.0;
        for (std::size_t j = 0; j < dim; ++j) trace += a[j * dim + j];
        const double ridge = 1e-10 * trace / static_cast<double>(dim);
        if (!(ridge > 0.0)) throw;
        std::cerr << "warning: near-singular normal equations, adding ridge " << ridge
                  << "\n";
        for (std::size_t j = 0; j < dim; ++j) a[j * dim + j] += ridge;
        auto x = cholesky_solve(a, b, dim);
        fit.intercept = x[0];
        fit.coefficients.assign(x.begin() + 1, x.end());
        fit.ridge_fallback = true;
        return fit;
    }
}

LinearFit weighted_lasso(const std::vector<std::vector<double>>& columns,
                         const std::vector<double>& y,
                         const std::vector<double>& w,
                         const LassoConfig& cfg) {
    if (!(cfg.penalty >= 0.0) || !(cfg.tolerance > 0.0) || cfg.max_sweeps < 1) {
        throw std::invalid_argument("weighted_lasso: invalid config");
    }
    const std::size_t p = columns.size();
    const std::size_t n = y.size();
    double w_sum = 0.0;
    for (double wi : w) w_sum += wi;
    if (!(w_sum > 0.0)) throw std::invalid_argument("weighted_lasso: zero total weight");

    // Weighted standardization of features; constant columns stay at zero.
    std::vector<double> mean(p, 0.0), scale(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += w[i] * columns[j][i];
        m /= w_sum;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = columns[j][i] - m;
            v += w[i] * d * d;
        }
        mean[j] = m;
        scale[j] = std::sqrt(v / w_sum);
    }

    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) y_mean += w[i] * y[i];
    y_mean /= w_sum;

    std::vector<double> beta(p, 0.0);       // standardized-scale coefficients
    std::vector<double> residual(n);
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - y_mean;
    double intercept_std = 0.0;  // offset relative to y_mean

    std::vector<double> col_norm(p, 0.0);  // sum_i w_i x~_ij^2
    for (std::size_t j = 0; j < p; ++j) {
        if (scale[j] > 0.0) col_norm[j] = w_sum;  // standardized columns have unit weighted variance
    }

    auto soft = [](double z, double t) {
        if (z > t) return z - t;
        if (z < -t) return z + t;
        return 0.0;
    };

    int sweep = 0;
    double gap = 0.0;
    for (; sweep < cfg.max_sweeps; ++sweep) {
        gap = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (scale[j] == 0.0) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                rho += w[i] * (columns[j][i] - mean[j]) / scale[j] * residual[i];
            }
            rho += col_norm[j] * beta[j];
            const double updated = soft(rho, cfg.penalty) / col_norm[j];
            const double delta = updated - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) {
                    residual[i] -= delta * (columns[j][i] - mean[j]) / scale[j];
                }
                beta[j] = updated;
                gap = std::max(gap, std::fabs(delta));
            }
        }
        // Unpenalized intercept: weighted mean of the current residual.
        double r_mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) r_mean += w[i] * residual[i];
        r_mean /= w_sum;
        if (r_mean != 0.0) {
            for (std::size_t i = 0; i < n; ++i) residual[i] -= r_mean;
            intercept_std += r_mean;
            gap = std::max(gap, std::fabs(r_mean));
        }
        if (gap < cfg.tolerance) break;
    }
    if (sweep == cfg.max_sweeps && gap >= cfg.tolerance) {
        throw std::runtime_error("weighted_lasso: no convergence after " +
                                 std::to_string(cfg.max_sweeps) +
                                 " sweeps (last gap " + std::to_string(gap) + ")");
    }

    // Back-transform to the original scale.
    LinearFit fit;
    fit.coefficients.assign(p, 0.0);
    double shift = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        if (scale[j] > 0.0) {
            fit.coefficients[j] = beta[j] / scale[j];
            shift += fit.coefficients[j] * mean[j];
        }
    }
    fit.intercept = y_mean + intercept_std - shift;
    return fit;
}

}  // namespace itrboost
