#include "mdpde/robust.hpp"

#include <cmath>

#include "mdpde/dpd.hpp"
#include "mdpde/numerics.hpp"

namespace mdpde {

namespace {

Eigen::VectorXd neg_psi(const GlmModel& model, const Eta& eta, double alpha,
                        const ContaminationPoint& point) {
    Observation obs{point.y, point.x};
    return -psi_alpha(model, obs, eta, alpha);
}

// sum_v Pois(s/2)(v) [P(chisq_{r+2v+2} > c) - P(chisq_{r+2v} > c)]; smooth in
// s including s = 0, where it equals the v = 0 increment.
double k_star(double s, int r, double c) {
    const double half = 0.5 * s;
    const double logc2 = std::log(0.5 * c);
    KahanSum acc;
    double cumw = 0.0;
    for (int v = 0; v < 5000; ++v) {
        double w;
        if (half == 0.0) {
            w = v == 0 ? 1.0 : 0.0;
        } else {
            w = std::exp(-half + v * std::log(half) - std::lgamma(v + 1.0));
        }
        double a = 0.5 * r + v;
        double increment = std::exp(a * logc2 - 0.5 * c - std::lgamma(a + 1.0));
        acc.add(w * increment);
        cumw += w;
        if (cumw >= 1.0 - 1e-12) break;
    }
    return acc.value();
}

} // namespace

Eigen::VectorXd if_estimator(const GlmModel& model, const CovariateDistribution& dist,
                             const Eta& eta, double alpha, const ContaminationPoint& point) {
    if (!model.in_support(point.y)) throw DomainError("if_estimator: y_t outside support");
    Eigen::MatrixXd J = sandwich_analytic(model, dist, eta, alpha).J;
    return solve_spd(J, neg_psi(model, eta, alpha, point));
}

double if2_test(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta0,
                const LinearHypothesis& hypothesis, double alpha,
                const ContaminationPoint& point) {
    hypothesis.validate(static_cast<int>(eta0.beta.size()), eta0.dim());
    if (hypothesis.m(eta0).lpNorm<Eigen::Infinity>() > 1e-8) {
        throw DomainError("if2_test: eta0 must satisfy the null");
    }
    auto sw = sandwich_analytic(model, dist, eta0, alpha);
    Eigen::VectorXd inf = solve_spd(sw.J, neg_psi(model, eta0, alpha, point));
    Eigen::MatrixXd M = hypothesis.jacobian(eta0.dim());
    Eigen::MatrixXd A = M.transpose() * sw.Sigma * M;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::VectorXd proj = M.transpose() * inf;
    return proj.dot(solve_spd(A, proj));
}

double pif_test(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta0,
                const LinearHypothesis& hypothesis, const Eigen::VectorXd& d, double alpha,
                const ContaminationPoint& point, double level) {
    hypothesis.validate(static_cast<int>(eta0.beta.size()), eta0.dim());
    if (hypothesis.m(eta0).lpNorm<Eigen::Infinity>() > 1e-8) {
        throw DomainError("pif_test: eta0 must satisfy the null");
    }
    if (d.size() != eta0.dim()) throw DomainError("pif_test: d has wrong length");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("pif_test: level in (0,1)");

    auto sw = sandwich_analytic(model, dist, eta0, alpha);
    Eigen::MatrixXd M = hypothesis.jacobian(eta0.dim());
    Eigen::MatrixXd A = M.transpose() * sw.Sigma * M;
    A = 0.5 * (A + A.transpose()).eval();

    // row vector P = d^T M A^{-1} M^T
    Eigen::VectorXd p_row = M * solve_spd(A, Eigen::VectorXd(M.transpose() * d));
    double s0 = p_row.dot(d);
    Eigen::VectorXd inf = solve_spd(sw.J, neg_psi(model, eta0, alpha, point));

    double c = chisq_quantile(hypothesis.r(), 1.0 - level);
    return k_star(s0, hypothesis.r(), c) * p_row.dot(inf);
}

IfGrid if_grid_scan(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta,
                    double alpha, IfKind which, const IfGridSpec& grid,
                    const std::optional<TestGridParams>& params) {
    if (eta.beta.size() != 1) throw DomainError("if_grid_scan: scalar covariate only");
    if (grid.y_grid.size() == 0 || grid.x_grid.size() == 0) {
        throw DomainError("if_grid_scan: empty grid");
    }
    if (which != IfKind::Estimator && !params) {
        throw DomainError("if_grid_scan: hypothesis params required for test kinds");
    }

    auto sw = sandwich_analytic(model, dist, eta, alpha);
    const double phi = model.effective_phi(eta);

    Eigen::MatrixXd M, A;
    Eigen::VectorXd p_row;
    double kst = 0.0;
    if (which != IfKind::Estimator) {
        const auto& hyp = params->hypothesis;
        hyp.validate(1, eta.dim());
        M = hyp.jacobian(eta.dim());
        A = M.transpose() * sw.Sigma * M;
        A = 0.5 * (A + A.transpose()).eval();
        if (which == IfKind::Power) {
            if (params->d.size() != eta.dim()) throw DomainError("if_grid_scan: d length");
            p_row = M * solve_spd(A, Eigen::VectorXd(M.transpose() * params->d));
            double s0 = p_row.dot(params->d);
            double c = chisq_quantile(hyp.r(), 1.0 - params->level);
            kst = k_star(s0, hyp.r(), c);
        }
    }

    IfGrid out;
    out.y_grid = grid.y_grid;
    out.x_grid = grid.x_grid;
    out.values.resize(grid.y_grid.size(), grid.x_grid.size());

    for (int j = 0; j < grid.x_grid.size(); ++j) {
        Eigen::VectorXd xt = Eigen::VectorXd::Constant(1, grid.x_grid(j));
        double lp = xt.dot(eta.beta);
        auto core = detail::gamma_core(model, lp, phi, alpha);  // reused across the y column
        for (int i = 0; i < grid.y_grid.size(); ++i) {
            double y = grid.y_grid(i);
            if (!model.in_support(y)) throw DomainError("if_grid_scan: grid y outside support");
            auto sc = model.score_components(y, lp, phi);
            double fa = alpha == 0.0 ? 1.0 : std::exp(alpha * model.log_density(y, lp, phi));
            Eigen::VectorXd npsi(eta.dim());
            npsi.head(1) = (sc.k1 * fa - core.g1) * xt;
            if (eta.phi) npsi(1) = *sc.k2 * fa - core.g2;
            Eigen::VectorXd inf = solve_spd(sw.J, npsi);
            double v = 0.0;
            switch (which) {
                case IfKind::Estimator:
                    v = inf(0);
                    break;
                case IfKind::SecondOrderTest: {
                    Eigen::VectorXd proj = M.transpose() * inf;
                    v = proj.dot(solve_spd(A, proj));
                    break;
                }
                case IfKind::Power:
                    v = kst * p_row.dot(inf);
                    break;
            }
            out.values(i, j) = v;
        }
    }
    out.sup_abs = out.values.cwiseAbs().maxCoeff();
    return out;
}

IfGridSpec figure_grid() {
    IfGridSpec g;
    g.y_grid.resize(31);
    for (int i = 0; i <= 30; ++i) g.y_grid(i) = i;
    int nx = static_cast<int>(std::lround((3.0 - (-3.0)) / 0.05)) + 1;
    g.x_grid.resize(nx);
    for (int i = 0; i < nx; ++i) g.x_grid(i) = -3.0 + 0.05 * i;
    return g;
}

} // namespace mdpde
