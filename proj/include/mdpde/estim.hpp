#ifndef MDPDE_ESTIM_HPP
#define MDPDE_ESTIM_HPP

#include <optional>
#include <span>
#include <vector>

#include "mdpde/asymp.hpp"
#include "mdpde/model.hpp"

namespace mdpde {

struct FitOptions {
    double tol = 1e-8;        // sup-norm of the mean estimating function
    double step_tol = 1e-10;  // sup-norm of the parameter step
    int max_iterations = 200;
    std::optional<Eta> init;  // explicit start; default is the MLE
};

struct MdpdeFit {
    Eta eta_hat;
    double alpha = 0.0;
    double gradient_norm = 0.0;  // sup-norm of mean Psi at eta_hat
    int iterations = 0;
    bool converged = false;
    long n_obs = 0;
    SandwichMatrices sandwich;   // empirical J, K, Sigma at eta_hat

    const Eigen::MatrixXd& sigma_hat() const { return sandwich.Sigma; }
};

// Minimum density power divergence fit. alpha = 0 gives the MLE; alpha > 0
// starts from the MLE unless options.init is set. Damped Newton on the
// estimating equations with the expected Jacobian, falling back to a line
// search on the divergence loss when a Newton step does not reduce the
// residual. Returns converged = false after max_iterations; throws
// RankDeficient for a deficient design and NonConvergence when the iterates
// run away (separation-like degeneracy).
MdpdeFit fit_mdpde(const GlmModel& model, std::span<const Observation> sample, double alpha,
                   const FitOptions& options = {});

// Warm-started fits over an ascending alpha grid. Per-element failures are
// recorded in the returned element (converged = false), not thrown.
std::vector<MdpdeFit> fit_path(const GlmModel& model, std::span<const Observation> sample,
                               std::span<const double> alphas, const FitOptions& options = {});

} // namespace mdpde

#endif
