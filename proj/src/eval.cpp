#include "itrboost/eval.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace itrboost {

namespace {

// Lentz's continued fraction for the regularized incomplete beta function.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a,b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_upper_tail(double t, double dof) {
    if (!(dof > 0.0)) throw std::domain_error("student_t_upper_tail: dof > 0");
    const double x = dof / (dof + t * t);
    const double half_tail = 0.5 * incomplete_beta(0.5 * dof, 0.5, x);
    return t >= 0.0 ? half_tail : 1.0 - half_tail;
}

double estimate_value(const std::vector<double>& decisions, const Dataset& data) {
    if (decisions.size() != data.n_rows()) {
        throw std::invalid_argument("estimate_value: decision count mismatch");
    }
    double numerator = 0.0, denominator = 0.0;
    std::size_t matches = 0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        if (decisions[i] == data.treatment(i)) {
            ++matches;
            numerator += data.outcome(i) / data.propensity(i);
            denominator += 1.0 / data.propensity(i);
        }
    }
    if (matches == 0) {
        throw std::runtime_error("estimate_value: no decision matches a received "
                                 "treatment (match count 0)");
    }
    return numerator / denominator;
}

double misclassification(const std::vector<double>& decisions,
                         const std::vector<double>& oracle) {
    if (decisions.size() != oracle.size() || decisions.empty()) {
        throw std::invalid_argument("misclassification: length mismatch");
    }
    std::size_t disagreements = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        if (decisions[i] != oracle[i]) ++disagreements;
    }
    return static_cast<double>(disagreements) / static_cast<double>(decisions.size());
}

WelchResult welch_test(const std::vector<double>& group1,
                       const std::vector<double>& group2) {
    const std::size_t n1 = group1.size();
    const std::size_t n2 = group2.size();
    if (n1 < 2 || n2 < 2) throw std::invalid_argument("welch_test: each group needs >= 2");
    auto mean_var = [](const std::vector<double>& g) {
        double m = 0.0;
        for (double v : g) m += v;
        m /= static_cast<double>(g.size());
        double s2 = 0.0;
        for (double v : g) s2 += (v - m) * (v - m);
        s2 /= static_cast<double>(g.size() - 1);
        return std::pair<double, double>{m, s2};
    };
    const auto [m1, v1] = mean_var(group1);
    const auto [m2, v2] = mean_var(group2);
    const double se1 = v1 / static_cast<double>(n1);
    const double se2 = v2 / static_cast<double>(n2);
    const double se = se1 + se2;
    if (!(se > 0.0)) throw std::runtime_error("welch_test: both group variances are zero");
    WelchResult r;
    r.t = (m1 - m2) / std::sqrt(se);
    r.dof = se * se /
            (se1 * se1 / static_cast<double>(n1 - 1) +
             se2 * se2 / static_cast<double>(n2 - 1));
    r.p_one_sided = student_t_upper_tail(r.t, r.dof);
    return r;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["value"] = value;
    if (misclassification) j["misclassification"] = *misclassification;
    if (welch) {
        j["welch"] = {{"t", welch->t}, {"dof", welch->dof},
                      {"p_one_sided", welch->p_one_sided}};
    }
    return j.dump();
}

}  // namespace itrboost
