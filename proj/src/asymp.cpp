#include "mdpde/asymp.hpp"

#include <cmath>
#include <numbers>

#include "mdpde/numerics.hpp"
#include "mdpde/rng.hpp"

namespace mdpde {

CovariateDistribution CovariateDistribution::univariate_normal(double mu, double sd) {
    if (!(sd > 0.0)) throw DomainError("univariate_normal: need sd > 0");
    CovariateDistribution d;
    d.kind_ = Kind::UnivariateNormal;
    d.dim_ = 1;
    d.mu1_ = mu;
    d.sd1_ = sd;
    return d;
}

CovariateDistribution CovariateDistribution::empirical(std::vector<Eigen::VectorXd> points) {
    if (points.empty()) throw DomainError("empirical: need at least one point");
    CovariateDistribution d;
    d.kind_ = Kind::Empirical;
    d.dim_ = static_cast<int>(points.front().size());
    for (const auto& p : points) {
        if (p.size() != d.dim_) throw DomainError("empirical: inconsistent dimensions");
    }
    d.points_ = std::move(points);
    return d;
}

CovariateDistribution CovariateDistribution::product_normal(Eigen::VectorXd mu,
                                                            Eigen::VectorXd sd) {
    if (mu.size() != sd.size() || mu.size() == 0) {
        throw DomainError("product_normal: mu/sd size mismatch");
    }
    if ((sd.array() <= 0.0).any()) throw DomainError("product_normal: need sd > 0");
    CovariateDistribution d;
    d.kind_ = Kind::ProductNormal;
    d.dim_ = static_cast<int>(mu.size());
    d.mu_ = std::move(mu);
    d.sd_ = std::move(sd);
    return d;
}

void CovariateDistribution::for_each_node(
    const std::function<void(const Eigen::VectorXd&, double)>& cb) const {
    switch (kind_) {
        case Kind::UnivariateNormal: {
            const auto& rule = gauss_hermite(61);
            const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi_v<double>);
            Eigen::VectorXd x(1);
            for (int i = 0; i < rule.nodes.size(); ++i) {
                x(0) = mu1_ + std::numbers::sqrt2_v<double> * sd1_ * rule.nodes[i];
                cb(x, rule.weights[i] * inv_sqrt_pi);
            }
            return;
        }
        case Kind::Empirical: {
            const double w = 1.0 / static_cast<double>(points_.size());
            for (const auto& p : points_) cb(p, w);
            return;
        }
        case Kind::ProductNormal: {
            if (dim_ <= 3) {
                const auto& rule = gauss_hermite(dim_ == 1 ? 61 : (dim_ == 2 ? 41 : 25));
                const int n = static_cast<int>(rule.nodes.size());
                const double norm = std::pow(std::sqrt(std::numbers::pi_v<double>), -dim_);
                Eigen::VectorXd x(dim_);
                std::vector<int> idx(dim_, 0);
                while (true) {
                    double w = norm;
                    for (int j = 0; j < dim_; ++j) {
                        x(j) = mu_(j) +
                               std::numbers::sqrt2_v<double> * sd_(j) * rule.nodes[idx[j]];
                        w *= rule.weights[idx[j]];
                    }
                    cb(x, w);
                    int j = 0;
                    for (; j < dim_; ++j) {
                        if (++idx[j] < n) break;
                        idx[j] = 0;
                    }
                    if (j == dim_) break;
                }
                return;
            }
            // Monte Carlo fallback for higher dimensions, fixed stream.
            const int draws = 200000;
            CounterRng rng(0x9e3779b97f4a7c15ULL, 1);
            const double w = 1.0 / draws;
            Eigen::VectorXd x(dim_);
            for (int i = 0; i < draws; ++i) {
                for (int j = 0; j < dim_; ++j) x(j) = mu_(j) + sd_(j) * rng.next_normal();
                cb(x, w);
            }
            return;
        }
    }
}

Eigen::VectorXd CovariateDistribution::sample(CounterRng& rng) const {
    switch (kind_) {
        case Kind::UnivariateNormal: {
            Eigen::VectorXd x(1);
            x(0) = mu1_ + sd1_ * rng.next_normal();
            return x;
        }
        case Kind::ProductNormal: {
            Eigen::VectorXd x(dim_);
            for (int j = 0; j < dim_; ++j) x(j) = mu_(j) + sd_(j) * rng.next_normal();
            return x;
        }
        case Kind::Empirical: {
            auto idx = static_cast<std::size_t>(rng.next_uniform() *
                                                static_cast<double>(points_.size()));
            if (idx >= points_.size()) idx = points_.size() - 1;
            return points_[idx];
        }
    }
    throw DomainError("sample: unknown covariate kind");
}

Eigen::VectorXd CovariateDistribution::normal_mu() const {
    if (kind_ == Kind::UnivariateNormal) return Eigen::VectorXd::Constant(1, mu1_);
    if (kind_ == Kind::ProductNormal) return mu_;
    throw DomainError("normal_mu: not a normal covariate distribution");
}

Eigen::VectorXd CovariateDistribution::normal_sd() const {
    if (kind_ == Kind::UnivariateNormal) return Eigen::VectorXd::Constant(1, sd1_);
    if (kind_ == Kind::ProductNormal) return sd_;
    throw DomainError("normal_sd: not a normal covariate distribution");
}

const std::vector<Eigen::VectorXd>& CovariateDistribution::points() const {
    if (kind_ != Kind::Empirical) throw DomainError("points: not an empirical distribution");
    return points_;
}

namespace {

// One x-point contribution to J and K given the gamma integrals at alpha and
// 2*alpha.
void accumulate_blocks(const Eigen::VectorXd& x, double w, const detail::GammaCore& ga,
                       const detail::GammaCore& g2a, Eigen::MatrixXd& J, Eigen::MatrixXd& K) {
    const int k = static_cast<int>(x.size());
    J.topLeftCorner(k, k) += w * ga.g11 * (x * x.transpose());
    K.topLeftCorner(k, k) += w * (g2a.g11 - ga.g1 * ga.g1) * (x * x.transpose());
    if (ga.has_phi) {
        J.block(0, k, k, 1) += w * ga.g12 * x;
        J.block(k, 0, 1, k) += w * ga.g12 * x.transpose();
        J(k, k) += w * ga.g22;
        double koff = g2a.g12 - ga.g1 * ga.g2;
        K.block(0, k, k, 1) += w * koff * x;
        K.block(k, 0, 1, k) += w * koff * x.transpose();
        K(k, k) += w * (g2a.g22 - ga.g2 * ga.g2);
    }
}

SandwichMatrices finish_sandwich(Eigen::MatrixXd J, Eigen::MatrixXd K) {
    J = 0.5 * (J + J.transpose()).eval();
    K = 0.5 * (K + K.transpose()).eval();
    Eigen::MatrixXd JinvK = solve_spd(J, K);
    Eigen::MatrixXd Sigma = solve_spd(J, Eigen::MatrixXd(JinvK.transpose()));
    Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();
    return {std::move(J), std::move(K), std::move(Sigma)};
}

} // namespace

bool design_full_rank(std::span<const Observation> sample, int k) {
    Eigen::MatrixXd X(sample.size(), k);
    for (std::size_t i = 0; i < sample.size(); ++i) X.row(i) = sample[i].x.transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    return qr.rank() == k;
}

SandwichMatrices sandwich_empirical(const GlmModel& model, std::span<const Observation> sample,
                                    const Eta& eta, double alpha) {
    if (sample.empty()) throw DomainError("sandwich_empirical: empty sample");
    const int k = static_cast<int>(eta.beta.size());
    const int kp = eta.dim();
    const double phi = model.effective_phi(eta);

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kp, kp);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(kp, kp);
    const double w = 1.0 / static_cast<double>(sample.size());
    for (const auto& obs : sample) {
        if (obs.x.size() != k) throw DomainError("sandwich_empirical: dimension mismatch");
        double lp = obs.x.dot(eta.beta);
        auto ga = detail::gamma_core(model, lp, phi, alpha);
        auto g2a = detail::gamma_core(model, lp, phi, 2.0 * alpha);
        accumulate_blocks(obs.x, w, ga, g2a, J, K);
    }
    return finish_sandwich(std::move(J), std::move(K));
}

SandwichMatrices sandwich_analytic(const GlmModel& model, const CovariateDistribution& dist,
                                   const Eta& eta, double alpha) {
    const int k = static_cast<int>(eta.beta.size());
    if (dist.dim() != k) throw DomainError("sandwich_analytic: dimension mismatch");
    const int kp = eta.dim();
    const double phi = model.effective_phi(eta);

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kp, kp);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(kp, kp);
    dist.for_each_node([&](const Eigen::VectorXd& x, double w) {
        double lp = x.dot(eta.beta);
        auto ga = detail::gamma_core(model, lp, phi, alpha);
        auto g2a = detail::gamma_core(model, lp, phi, 2.0 * alpha);
        accumulate_blocks(x, w, ga, g2a, J, K);
    });
    return finish_sandwich(std::move(J), std::move(K));
}

double are(const GlmModel& model, const CovariateDistribution& dist, double beta0,
           double alpha) {
    if (!model.dispersion_known()) throw DomainError("are: dispersion must be known");
    if (dist.dim() != 1) throw DomainError("are: defined for scalar beta");
    Eta eta{Eigen::VectorXd::Constant(1, beta0), std::nullopt};
    double s0 = sandwich_analytic(model, dist, eta, 0.0).Sigma(0, 0);
    double sa = sandwich_analytic(model, dist, eta, alpha).Sigma(0, 0);
    return s0 / sa;
}

} // namespace mdpde
