#pragma once

#include <optional>
#include <string>
#include <vector>

#include "itrboost/dataset.hpp"

namespace itrboost {

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_one_sided = 0.0;  // upper tail, H_A: mean1 > mean2
};

struct EvalReport {
    double value = 0.0;
    std::optional<double> misclassification;
    std::optional<WelchResult> welch;

    std::string to_json() const;
};

// Inverse-propensity ratio estimator of the value function:
//   [sum Y_i I(D=A_i)/pi_i] / [sum I(D=A_i)/pi_i].
// Throws when no decision matches the received treatment.
double estimate_value(const std::vector<double>& decisions, const Dataset& data);

// Fraction of disagreements against a reference rule.
double misclassification(const std::vector<double>& decisions,
                         const std::vector<double>& oracle);

// Welch's unequal-variance t-test with Satterthwaite degrees of freedom.
WelchResult welch_test(const std::vector<double>& group1,
                       const std::vector<double>& group2);

// Student-t upper tail probability P(T > t), via the regularized incomplete
// beta function.
double student_t_upper_tail(double t, double dof);

double incomplete_beta(double a, double b, double x);  // regularized I_x(a,b)

}  // namespace itrboost
