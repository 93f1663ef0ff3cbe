#ifndef MDPDE_ASYMP_HPP
#define MDPDE_ASYMP_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "mdpde/dpd.hpp"
#include "mdpde/model.hpp"
#include "mdpde/rng.hpp"

namespace mdpde {

// Distribution G of the covariate vector, used to integrate the gamma
// functions over the covariate space. UnivariateNormal and ProductNormal are
// integrated by Gauss-Hermite quadrature (tensorized up to dimension 3, Monte
// Carlo beyond); Empirical averages over the stored points.
class CovariateDistribution {
public:
    enum class Kind { UnivariateNormal, Empirical, ProductNormal };

    static CovariateDistribution univariate_normal(double mu, double sd);
    static CovariateDistribution empirical(std::vector<Eigen::VectorXd> points);
    static CovariateDistribution product_normal(Eigen::VectorXd mu, Eigen::VectorXd sd);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    // Calls cb(x, w) over the integration measure; weights sum to one.
    void for_each_node(const std::function<void(const Eigen::VectorXd&, double)>& cb) const;

    // One random draw from G.
    Eigen::VectorXd sample(CounterRng& rng) const;

    // Normal-kind parameters (throws for Empirical).
    Eigen::VectorXd normal_mu() const;
    Eigen::VectorXd normal_sd() const;

    const std::vector<Eigen::VectorXd>& points() const;

private:
    CovariateDistribution() = default;
    Kind kind_ = Kind::UnivariateNormal;
    int dim_ = 1;
    double mu1_ = 0.0, sd1_ = 1.0;
    std::vector<Eigen::VectorXd> points_;
    Eigen::VectorXd mu_, sd_;
};

// J, K and Sigma = J^{-1} K J^{-1} for sqrt(n)(eta_hat - eta0). Dimension is
// k when the dispersion is known, k+1 otherwise.
struct SandwichMatrices {
    Eigen::MatrixXd J;
    Eigen::MatrixXd K;
    Eigen::MatrixXd Sigma;
};

SandwichMatrices sandwich_empirical(const GlmModel& model, std::span<const Observation> sample,
                                    const Eta& eta, double alpha);

SandwichMatrices sandwich_analytic(const GlmModel& model, const CovariateDistribution& dist,
                                   const Eta& eta, double alpha);

// Asymptotic relative efficiency for scalar beta with known dispersion:
// Sigma_0 / Sigma_alpha, in (0, 1].
double are(const GlmModel& model, const CovariateDistribution& dist, double beta0,
           double alpha);

// Column rank check used by fit and sandwich preconditions.
bool design_full_rank(std::span<const Observation> sample, int k);

} // namespace mdpde

#endif
