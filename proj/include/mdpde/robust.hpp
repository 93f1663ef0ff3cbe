#ifndef MDPDE_ROBUST_HPP
#define MDPDE_ROBUST_HPP

#include <Eigen/Dense>
#include <optional>

#include "mdpde/asymp.hpp"
#include "mdpde/model.hpp"
#include "mdpde/wald.hpp"

namespace mdpde {

// Estimator influence function at a contamination point:
// J_alpha^{-1} (u(y_t) f^alpha(y_t) - int u f^{1+alpha}) with J from the
// analytic sandwich. Bounded in the point for alpha > 0, unbounded at
// alpha = 0. For the Poisson family the beta part reduces to
// J^{-1} x_t [ (y_t - mu_t) f^alpha(y_t) - gamma_1(x_t) ].
Eigen::VectorXd if_estimator(const GlmModel& model, const CovariateDistribution& dist,
                             const Eta& eta, double alpha, const ContaminationPoint& point);

// Second-order influence function of the Wald-type statistic at the null:
// IF^T M [M^T Sigma M]^{-1} M^T IF >= 0. The first-order influence function
// is identically zero.
double if2_test(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta0,
                const LinearHypothesis& hypothesis, double alpha,
                const ContaminationPoint& point);

inline double if1_test(const GlmModel&, const CovariateDistribution&, const Eta&,
                       const LinearHypothesis&, double, const ContaminationPoint&) {
    return 0.0;
}

// Power influence function under the contiguous shift d; the level influence
// function (d = 0) is identically zero.
double pif_test(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta0,
                const LinearHypothesis& hypothesis, const Eigen::VectorXd& d, double alpha,
                const ContaminationPoint& point, double level);

enum class IfKind { Estimator, SecondOrderTest, Power };

struct IfGridSpec {
    Eigen::VectorXd y_grid;
    Eigen::VectorXd x_grid;  // scalar covariate grid (k = 1)
};

struct TestGridParams {
    LinearHypothesis hypothesis;
    Eigen::VectorXd d;  // used by Power
    double level = 0.05;
};

struct IfGrid {
    Eigen::VectorXd y_grid;
    Eigen::VectorXd x_grid;
    Eigen::MatrixXd values;  // y index by x index
    double sup_abs = 0.0;
};

// Dense influence surface over (y_t, x_t); scalar covariate. SecondOrderTest
// and Power require params.
IfGrid if_grid_scan(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta,
                    double alpha, IfKind which, const IfGridSpec& grid,
                    const std::optional<TestGridParams>& params = std::nullopt);

// The grid behind the influence figures: y in {0,...,30}, x in [-3,3] step 0.05.
IfGridSpec figure_grid();

} // namespace mdpde

#endif
