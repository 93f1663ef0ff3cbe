#include "mdpde/wald.hpp"

#include <cmath>

#include "mdpde/numerics.hpp"
#include "mdpde/robust.hpp"

namespace mdpde {

void LinearHypothesis::validate(int k, int eta_dim) const {
    if (L.cols() != k) throw DomainError("hypothesis: L has wrong number of columns");
    if (l0.size() != L.rows()) throw DomainError("hypothesis: l0 length mismatch");
    if (r() >= eta_dim + 1 || r() < 1) throw DomainError("hypothesis: need 1 <= r < k+1");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(L.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() != r()) throw DomainError("hypothesis: L is not full row rank");
}

WaldResult wald_statistic(const MdpdeFit& fit, const LinearHypothesis& hypothesis) {
    if (!fit.converged) throw DomainError("wald_statistic: fit did not converge");
    const int k = static_cast<int>(fit.eta_hat.beta.size());
    hypothesis.validate(k, fit.eta_hat.dim());

    Eigen::VectorXd m = hypothesis.m(fit.eta_hat);
    Eigen::MatrixXd M = hypothesis.jacobian(fit.eta_hat.dim());
    Eigen::MatrixXd A = M.transpose() * fit.sandwich.Sigma * M;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::VectorXd t = solve_spd(A, m);

    WaldResult res;
    res.statistic = static_cast<double>(fit.n_obs) * m.dot(t);
    res.df = hypothesis.r();
    res.p_value = chisq_sf(res.df, res.statistic);
    return res;
}

double noncentral_chisq_sf(int r, double delta, double c) {
    if (r < 1) throw DomainError("noncentral_chisq_sf: need r >= 1");
    if (delta < 0.0 || c < 0.0) throw DomainError("noncentral_chisq_sf: need delta, c >= 0");
    if (c == 0.0) return 1.0;

    const double half = 0.5 * delta;
    const double a0 = 0.5 * r;
    const double logc2 = std::log(0.5 * c);

    double tail = gamma_q(a0, 0.5 * c);  // P(chisq_{r} > c), bumped by recurrence
    KahanSum acc;
    double cumw = 0.0;
    for (int v = 0; v < 5000; ++v) {
        double w;
        if (half == 0.0) {
            w = v == 0 ? 1.0 : 0.0;
        } else {
            w = std::exp(-half + v * std::log(half) - std::lgamma(v + 1.0));
        }
        acc.add(w * tail);
        cumw += w;
        if (cumw >= 1.0 - 1e-12) break;
        double a = a0 + v;
        tail += std::exp(a * logc2 - 0.5 * c - std::lgamma(a + 1.0));
        if (tail > 1.0) tail = 1.0;
    }
    double out = acc.value();
    if (out < 0.0) out = 0.0;
    if (out > 1.0) out = 1.0;
    return out;
}

namespace {

double q_form(const GlmModel& model, const CovariateDistribution& dist, const Eta& eta1,
              const Eta& eta2, const LinearHypothesis& hyp, double alpha) {
    Eigen::MatrixXd M = hyp.jacobian(eta2.dim());
    Eigen::MatrixXd Sigma = sandwich_analytic(model, dist, eta2, alpha).Sigma;
    Eigen::MatrixXd A = M.transpose() * Sigma * M;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::VectorXd m = hyp.m(eta1);
    return m.dot(solve_spd(A, m));
}

Eta perturb(const Eta& eta, int j, double h) {
    Eta out = eta;
    Eigen::VectorXd v = out.packed();
    v(j) += h;
    return Eta::unpack(v, eta.phi.has_value());
}

// sigma^2(eta*) from central differences of the map eta -> q_eta(eta).
double sigma2_fixed(const GlmModel& model, const CovariateDistribution& dist,
                    const Eta& eta_star, const LinearHypothesis& hyp, double alpha,
                    QDerivative slots, const Eigen::MatrixXd& Sigma_star) {
    const int p = eta_star.dim();
    Eigen::VectorXd grad(p);
    for (int j = 0; j < p; ++j) {
        double h = 1e-5 * (1.0 + std::fabs(eta_star.packed()(j)));
        Eta up = perturb(eta_star, j, h);
        Eta dn = perturb(eta_star, j, -h);
        double qu, qd;
        if (slots == QDerivative::Diagonal) {
            qu = q_form(model, dist, up, up, hyp, alpha);
            qd = q_form(model, dist, dn, dn, hyp, alpha);
        } else {
            qu = q_form(model, dist, up, eta_star, hyp, alpha);
            qd = q_form(model, dist, dn, eta_star, hyp, alpha);
        }
        grad(j) = (qu - qd) / (2.0 * h);
    }
    return grad.dot(Sigma_star * grad);
}

} // namespace

double power_fixed_alternative(const GlmModel& model, const CovariateDistribution& dist,
                               const Eta& eta_star, const LinearHypothesis& hypothesis,
                               long n, double level, double alpha, QDerivative slots) {
    if (n < 1) throw DomainError("power_fixed_alternative: need n >= 1");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("level must be in (0,1)");
    hypothesis.validate(static_cast<int>(eta_star.beta.size()), eta_star.dim());

    double q = q_form(model, dist, eta_star, eta_star, hypothesis, alpha);
    if (!(q > 0.0)) {
        throw DomainError("power_fixed_alternative: m(eta_star) must be nonzero");
    }
    Eigen::MatrixXd Sigma_star = sandwich_analytic(model, dist, eta_star, alpha).Sigma;
    double s2 = sigma2_fixed(model, dist, eta_star, hypothesis, alpha, slots, Sigma_star);
    if (!(s2 > 0.0)) throw SingularMatrix("power_fixed_alternative: degenerate sigma^2");

    double c = chisq_quantile(hypothesis.r(), 1.0 - level);
    double sqn = std::sqrt(static_cast<double>(n));
    double z = (c / sqn - sqn * q) / std::sqrt(s2);
    return 1.0 - normal_cdf(z);
}

long required_sample_size(const GlmModel& model, const CovariateDistribution& dist,
                          const Eta& eta_star, const LinearHypothesis& hypothesis,
                          double target_power, double level, double alpha,
                          QDerivative slots) {
    if (!(target_power > 0.0 && target_power < 1.0)) {
        throw DomainError("required_sample_size: target power must be in (0,1)");
    }
    hypothesis.validate(static_cast<int>(eta_star.beta.size()), eta_star.dim());
    double q = q_form(model, dist, eta_star, eta_star, hypothesis, alpha);
    if (!(q > 0.0)) {
        throw DomainError("required_sample_size: m(eta_star) must be nonzero");
    }
    Eigen::MatrixXd Sigma_star = sandwich_analytic(model, dist, eta_star, alpha).Sigma;
    double s2 = sigma2_fixed(model, dist, eta_star, hypothesis, alpha, slots, Sigma_star);
    double c = chisq_quantile(hypothesis.r(), 1.0 - level);

    double z = normal_quantile(1.0 - target_power);
    double A = s2 * z * z;
    double B = 2.0 * c * q;
    double nstar = (A + B + std::sqrt(A * (A + 2.0 * B))) / (2.0 * q * q);
    return static_cast<long>(std::floor(nstar)) + 1;
}

namespace {

double contiguous_core(const GlmModel& model, const CovariateDistribution& dist,
                       const Eta& eta0, const LinearHypothesis& hyp,
                       const Eigen::VectorXd& shift_m, double level, double alpha) {
    Eigen::MatrixXd M = hyp.jacobian(eta0.dim());
    Eigen::MatrixXd Sigma = sandwich_analytic(model, dist, eta0, alpha).Sigma;
    Eigen::MatrixXd A = M.transpose() * Sigma * M;
    A = 0.5 * (A + A.transpose()).eval();
    double delta = shift_m.dot(solve_spd(A, shift_m));
    double c = chisq_quantile(hyp.r(), 1.0 - level);
    return noncentral_chisq_sf(hyp.r(), delta, c);
}

void check_null(const LinearHypothesis& hyp, const Eta& eta0) {
    if (hyp.m(eta0).lpNorm<Eigen::Infinity>() > 1e-8) {
        throw DomainError("contiguous power: eta0 must satisfy the null");
    }
}

} // namespace

double contiguous_power(const GlmModel& model, const CovariateDistribution& dist,
                        const Eta& eta0, const LinearHypothesis& hypothesis,
                        const Eigen::VectorXd& d, double level, double alpha) {
    hypothesis.validate(static_cast<int>(eta0.beta.size()), eta0.dim());
    check_null(hypothesis, eta0);
    if (d.size() != eta0.dim()) throw DomainError("contiguous_power: d has wrong length");
    Eigen::MatrixXd M = hypothesis.jacobian(eta0.dim());
    return contiguous_core(model, dist, eta0, hypothesis, M.transpose() * d, level, alpha);
}

double contiguous_power_mspace(const GlmModel& model, const CovariateDistribution& dist,
                               const Eta& eta0, const LinearHypothesis& hypothesis,
                               const Eigen::VectorXd& d_star, double level, double alpha) {
    hypothesis.validate(static_cast<int>(eta0.beta.size()), eta0.dim());
    check_null(hypothesis, eta0);
    if (d_star.size() != hypothesis.r()) {
        throw DomainError("contiguous_power_mspace: d_star has wrong length");
    }
    return contiguous_core(model, dist, eta0, hypothesis, d_star, level, alpha);
}

double contaminated_contiguous_power(const GlmModel& model, const CovariateDistribution& dist,
                                     const Eta& eta0, const LinearHypothesis& hypothesis,
                                     const Eigen::VectorXd& d, double epsilon,
                                     const ContaminationPoint& point, double level,
                                     double alpha) {
    hypothesis.validate(static_cast<int>(eta0.beta.size()), eta0.dim());
    check_null(hypothesis, eta0);
    if (epsilon < 0.0) throw DomainError("contaminated power: need epsilon >= 0");
    if (d.size() != eta0.dim()) throw DomainError("contaminated power: d has wrong length");

    Eigen::VectorXd shifted = d;
    if (epsilon != 0.0) {
        shifted += epsilon * if_estimator(model, dist, eta0, alpha, point);
    }
    Eigen::MatrixXd M = hypothesis.jacobian(eta0.dim());
    return contiguous_core(model, dist, eta0, hypothesis, M.transpose() * shifted, level,
                           alpha);
}

} // namespace mdpde
