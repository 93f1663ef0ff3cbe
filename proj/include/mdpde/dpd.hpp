#ifndef MDPDE_DPD_HPP
#define MDPDE_DPD_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "mdpde/model.hpp"

namespace mdpde {

// gamma_j = int K_j f^{1+alpha} dy and gamma_jh = int K_j K_h f^{1+alpha} dy
// at one covariate value. The phi entries are present iff the dispersion is
// estimated.
struct GammaSet {
    double gamma1;
    std::optional<double> gamma2;
    double gamma11;
    std::optional<double> gamma12;
    std::optional<double> gamma22;
};

namespace detail {

// Raw integrals shared by gamma_set, psi_alpha, the objective and the
// sandwich matrices: mass = int f^{1+alpha} dy plus the score moments.
struct GammaCore {
    double mass = 0.0;
    double g1 = 0.0, g11 = 0.0;
    double g2 = 0.0, g12 = 0.0, g22 = 0.0;
    bool has_phi = false;
};

// Counts: windowed summation around the conditional mean, extended until the
// next term is below 1e-14 of the running totals. Continuous: Gauss-Hermite
// centered at the conditional mean with scale sigma/sqrt(1+alpha), validated
// against a coarser rule. Relative accuracy 1e-10.
GammaCore gamma_core(const GlmModel& model, double lp, double phi, double alpha);

} // namespace detail

GammaSet gamma_set(const GlmModel& model, const Eigen::VectorXd& x, const Eta& eta,
                   double alpha);

// Estimating function Psi_alpha(y, x; eta): first block
// (gamma1 - K1 f^alpha(y)) x, then gamma2 - K2 f^alpha(y) when phi is
// estimated. Its conditional expectation under the model is zero.
Eigen::VectorXd psi_alpha(const GlmModel& model, const Observation& obs, const Eta& eta,
                          double alpha);

// Empirical divergence objective for alpha > 0, normalized so that
// -alpha * gradient equals the sample mean of psi_alpha. Stationary points
// solve the estimating equations; the estimator maximizes this objective.
double dpd_objective(const GlmModel& model, std::span<const Observation> sample,
                     const Eta& eta, double alpha);

// Descent-oriented form used by the solver's line search:
// mean_i [ int f^{1+alpha} dy - (1+1/alpha) f^alpha(y_i) ] for alpha > 0,
// mean negative log-likelihood at alpha = 0. Equal to
// -alpha(1+alpha) * dpd_objective when alpha > 0.
double dpd_loss(const GlmModel& model, std::span<const Observation> sample, const Eta& eta,
                double alpha);

} // namespace mdpde

#endif
