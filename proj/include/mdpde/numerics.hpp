#ifndef MDPDE_NUMERICS_HPP
#define MDPDE_NUMERICS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "mdpde/errors.hpp"

namespace mdpde {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
// Series expansion for x < a+1, continued fraction otherwise; relative
// accuracy around 1e-14 over the ranges used here.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Central chi-square upper tail and its inverse. chisq_sf(r, chisq_quantile(r, p)) == 1-p
// to 1e-10 or better.
double chisq_sf(double r, double c);
double chisq_quantile(double r, double p);

// Standard normal distribution.
double normal_cdf(double x);
double normal_sf(double x);
double normal_quantile(double p);

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Gauss-Hermite rule with weight exp(-t^2): integrates polynomials of degree
// up to 2n-1 exactly. Rules are cached; the returned reference stays valid.
const QuadratureRule& gauss_hermite(int n);

// Solve A x = b for symmetric positive definite A with a condition guard.
// Throws NotPositiveDefinite / SingularMatrix.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

inline constexpr double kConditionLimit = 1e12;

// Compensated (Kahan) accumulator for long sums.
class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

double pairwise_sum(std::span<const double> v);

} // namespace mdpde

#endif
