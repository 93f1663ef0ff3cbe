#ifndef MDPDE_TEST_ORACLES_HPP
#define MDPDE_TEST_ORACLES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "mdpde/model.hpp"

// Independent reference implementations used to pin expected values in tests.
// These deliberately avoid the library's windowed summation, quadrature and
// solver code paths.
namespace oracle {

struct GammaRef {
    double mass;
    double g1;
    double g11;
};

// Plain sum over y = 0..N (N at least 500), stopping when a term falls below
// 1e-12 of the running total.
GammaRef gamma_poisson(double lp, double alpha);

// Iteratively reweighted least squares for the Poisson log-link MLE.
Eigen::VectorXd irls_poisson(const mdpde::Sample& sample, double tol = 1e-12,
                             int max_iter = 100);

// Monte Carlo estimate of P(chisq_r(delta) > c) with its standard error.
struct McEstimate {
    double value;
    double se;
};
McEstimate mc_noncentral_chisq_sf(int r, double delta, double c, long draws,
                                  std::uint64_t seed);

// Monte Carlo integral of h against N(mu, sd^2).
McEstimate mc_normal_integral(const std::function<double(double)>& h, double mu, double sd,
                              long draws, std::uint64_t seed);

// Central finite-difference gradient of F at x.
Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& F,
                                 const Eigen::VectorXd& x, double h_scale = 1e-6);

// Solve a 3x3 system by cofactor expansion.
Eigen::Vector3d solve3_adjugate(const Eigen::Matrix3d& A, const Eigen::Vector3d& b);

// E[h(Y) | x] under the model: direct summation for counts, Simpson's rule on
// a wide bracket for the continuous family.
double conditional_expectation(const mdpde::GlmModel& model, double lp, double phi,
                               const std::function<double(double)>& h);

} // namespace oracle

#endif
