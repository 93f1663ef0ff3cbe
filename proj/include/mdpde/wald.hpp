#ifndef MDPDE_WALD_HPP
#define MDPDE_WALD_HPP

#include <Eigen/Dense>

#include "mdpde/asymp.hpp"
#include "mdpde/estim.hpp"
#include "mdpde/model.hpp"

namespace mdpde {

struct ContaminationPoint {
    double y;
    Eigen::VectorXd x;
};

// Affine restriction m(eta) = L beta - l0 with Jacobian M(eta) = d m^T/d eta.
// When the dispersion is estimated the Jacobian gains a zero row for phi.
struct LinearHypothesis {
    Eigen::MatrixXd L;   // r x k, full row rank
    Eigen::VectorXd l0;  // r

    int r() const { return static_cast<int>(L.rows()); }

    Eigen::VectorXd m(const Eta& eta) const { return L * eta.beta - l0; }

    Eigen::MatrixXd jacobian(int eta_dim) const {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(eta_dim, r());
        M.topRows(L.cols()) = L.transpose();
        return M;
    }

    void validate(int k, int eta_dim) const;
};

struct WaldResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;

    bool reject_at(double level) const { return p_value < level; }
};

// W_n = n m(eta_hat)^T [M^T Sigma_hat M]^{-1} m(eta_hat), chi-square with r
// degrees of freedom under the null.
WaldResult wald_statistic(const MdpdeFit& fit, const LinearHypothesis& hypothesis);

// P(chisq_r(delta) > c) through the Poisson-mixture series, truncated once the
// cumulative mixture weight exceeds 1 - 1e-12 (or at 5000 terms).
double noncentral_chisq_sf(int r, double delta, double c);

// Which slots of q_{eta1}(eta2) vary when differentiating for the power
// approximation at a fixed alternative.
enum class QDerivative { Diagonal, FirstSlotOnly };

// First-order power approximation at a fixed alternative eta_star with
// m(eta_star) != 0.
double power_fixed_alternative(const GlmModel& model, const CovariateDistribution& dist,
                               const Eta& eta_star, const LinearHypothesis& hypothesis,
                               long n, double level, double alpha,
                               QDerivative slots = QDerivative::Diagonal);

// Smallest n whose approximate power reaches target_power.
long required_sample_size(const GlmModel& model, const CovariateDistribution& dist,
                          const Eta& eta_star, const LinearHypothesis& hypothesis,
                          double target_power, double level, double alpha,
                          QDerivative slots = QDerivative::Diagonal);

// Asymptotic power under eta_n = eta0 + d/sqrt(n); d lives in parameter space.
double contiguous_power(const GlmModel& model, const CovariateDistribution& dist,
                        const Eta& eta0, const LinearHypothesis& hypothesis,
                        const Eigen::VectorXd& d, double level, double alpha);

// Same under m(eta_n) = d_star/sqrt(n); d_star lives in restriction space.
double contiguous_power_mspace(const GlmModel& model, const CovariateDistribution& dist,
                               const Eta& eta0, const LinearHypothesis& hypothesis,
                               const Eigen::VectorXd& d_star, double level, double alpha);

// Power under the contiguous alternative with an additional eps/sqrt(n) point
// mass at the contamination point; eps = 0 reduces to contiguous_power.
double contaminated_contiguous_power(const GlmModel& model, const CovariateDistribution& dist,
                                     const Eta& eta0, const LinearHypothesis& hypothesis,
                                     const Eigen::VectorXd& d, double epsilon,
                                     const ContaminationPoint& point, double level,
                                     double alpha);

} // namespace mdpde

#endif
