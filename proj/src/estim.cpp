#include "mdpde/estim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdpde/dpd.hpp"
#include "mdpde/numerics.hpp"

namespace mdpde {

namespace {

constexpr double kMinPhiIter = 1e-8;
constexpr double kMaxLp = 400.0;

struct IterState {
    Eigen::VectorXd mean_psi;
    Eigen::MatrixXd J;
    double norm = 0.0;
};

// Mean estimating function and expected Jacobian in one pass.
IterState eval_state(const GlmModel& model, std::span<const Observation> sample,
                     const Eta& eta, double alpha) {
    const int k = static_cast<int>(eta.beta.size());
    const int kp = eta.dim();
    const double phi = model.effective_phi(eta);
    IterState st;
    st.mean_psi = Eigen::VectorXd::Zero(kp);
    st.J = Eigen::MatrixXd::Zero(kp, kp);
    const double w = 1.0 / static_cast<double>(sample.size());
    for (const auto& obs : sample) {
        double lp = obs.x.dot(eta.beta);
        if (std::fabs(lp) > kMaxLp) {
            throw NonConvergence(
                "fit_mdpde: separation-like degeneracy, linear predictor diverged");
        }
        auto core = detail::gamma_core(model, lp, phi, alpha);
        auto sc = model.score_components(obs.y, lp, phi);
        double fa = alpha == 0.0 ? 1.0 : std::exp(alpha * model.log_density(obs.y, lp, phi));
        st.mean_psi.head(k) += w * (core.g1 - sc.k1 * fa) * obs.x;
        st.J.topLeftCorner(k, k) += w * core.g11 * (obs.x * obs.x.transpose());
        if (core.has_phi) {
            st.mean_psi(k) += w * (core.g2 - *sc.k2 * fa);
            st.J.block(0, k, k, 1) += w * core.g12 * obs.x;
            st.J.block(k, 0, 1, k) += w * core.g12 * obs.x.transpose();
            st.J(k, k) += w * core.g22;
        }
    }
    st.norm = st.mean_psi.lpNorm<Eigen::Infinity>();
    return st;
}

Eta apply_step(const Eta& eta, const Eigen::VectorXd& delta, double lambda) {
    Eta out = eta;
    out.beta += lambda * delta.head(eta.beta.size());
    if (out.phi) {
        double p = *eta.phi + lambda * delta(eta.beta.size());
        out.phi = std::max(p, kMinPhiIter);
    }
    return out;
}

MdpdeFit solve_equations(const GlmModel& model, std::span<const Observation> sample,
                         double alpha, Eta eta, const FitOptions& opt) {
    MdpdeFit fit;
    fit.alpha = alpha;
    IterState st = eval_state(model, sample, eta, alpha);
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (st.norm < opt.tol) break;
        Eigen::VectorXd step;
        try {
            step = solve_spd(st.J, Eigen::VectorXd(-st.mean_psi));
        } catch (const std::runtime_error&) {
            step = -st.mean_psi;  // Jacobian unusable, steepest descent on the loss
        }
        Eigen::VectorXd before = eta.packed();
        double lambda = 1.0;
        bool accepted = false;
        IterState cand;
        for (int h = 0; h < 30; ++h) {
            Eta trial = apply_step(eta, step, lambda);
            try {
                cand = eval_state(model, sample, trial, alpha);
            } catch (const NonConvergence&) {
                lambda *= 0.5;
                continue;
            }
            if (cand.norm < st.norm * (1.0 - 1e-4 * lambda) || cand.norm < opt.tol) {
                eta = std::move(trial);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Line search on the divergence loss along -mean_psi.
            double base = dpd_loss(model, sample, eta, alpha);
            double g2 = st.mean_psi.squaredNorm();
            double t = 1.0 / std::max(1.0, st.J.norm());
            bool moved = false;
            for (int h = 0; h < 40; ++h) {
                Eta trial = apply_step(eta, Eigen::VectorXd(-st.mean_psi), t);
                double lt;
                try {
                    lt = dpd_loss(model, sample, trial, alpha);
                } catch (const NonConvergence&) {
                    t *= 0.5;
                    continue;
                }
                if (lt < base - 1e-4 * t * g2) {
                    eta = std::move(trial);
                    cand = eval_state(model, sample, eta, alpha);
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if (!moved) break;  // stagnated
        }
        double moved_norm = (eta.packed() - before).lpNorm<Eigen::Infinity>();
        st = std::move(cand);
        if (moved_norm < opt.step_tol) { ++it; break; }
    }
    fit.eta_hat = eta;
    fit.gradient_norm = st.norm;
    fit.iterations = it;
    fit.converged = st.norm < opt.tol;
    fit.n_obs = static_cast<long>(sample.size());
    fit.sandwich = sandwich_empirical(model, sample, eta, alpha);
    return fit;
}

Eta mle_start(const GlmModel& model, std::span<const Observation> sample) {
    Eta eta;
    eta.beta = Eigen::VectorXd::Zero(sample.front().x.size());
    if (!model.dispersion_known()) {
        double mean = 0.0;
        for (const auto& o : sample) mean += o.y;
        mean /= static_cast<double>(sample.size());
        double ss = 0.0;
        for (const auto& o : sample) ss += (o.y - mean) * (o.y - mean);
        double sd = std::sqrt(ss / static_cast<double>(sample.size()));
        eta.phi = std::max(sd, 1e-3);
    }
    return eta;
}

} // namespace

MdpdeFit fit_mdpde(const GlmModel& model, std::span<const Observation> sample, double alpha,
                   const FitOptions& options) {
    if (alpha < 0.0) throw DomainError("fit_mdpde: need alpha >= 0");
    if (sample.empty()) throw DomainError("fit_mdpde: empty sample");
    const int k = static_cast<int>(sample.front().x.size());
    if (static_cast<int>(sample.size()) < k + 1) {
        throw RankDeficient("fit_mdpde: need at least k+1 observations");
    }
    if (!design_full_rank(sample, k)) {
        throw RankDeficient("fit_mdpde: design matrix is rank deficient");
    }
    for (const auto& obs : sample) {
        if (!model.in_support(obs.y)) throw DomainError("fit_mdpde: response outside support");
        if (!obs.x.allFinite()) throw DomainError("fit_mdpde: non-finite covariate");
    }

    Eta start;
    if (options.init) {
        start = *options.init;
    } else {
        MdpdeFit mle = solve_equations(model, sample, 0.0, mle_start(model, sample), options);
        if (alpha == 0.0) return mle;
        start = mle.eta_hat;
    }
    if (alpha == 0.0 && options.init) {
        return solve_equations(model, sample, 0.0, start, options);
    }
    return solve_equations(model, sample, alpha, start, options);
}

std::vector<MdpdeFit> fit_path(const GlmModel& model, std::span<const Observation> sample,
                               std::span<const double> alphas, const FitOptions& options) {
    if (!std::is_sorted(alphas.begin(), alphas.end())) {
        throw DomainError("fit_path: alphas must be ascending");
    }
    std::vector<MdpdeFit> out;
    out.reserve(alphas.size());
    FitOptions opt = options;
    for (double a : alphas) {
        try {
            MdpdeFit fit = fit_mdpde(model, sample, a, opt);
            opt.init = fit.eta_hat;  // warm start for the next alpha
            out.push_back(std::move(fit));
        } catch (const NonConvergence&) {
            MdpdeFit failed;
            failed.alpha = a;
            failed.converged = false;
            failed.gradient_norm = std::numeric_limits<double>::quiet_NaN();
            if (opt.init) failed.eta_hat = *opt.init;
            out.push_back(std::move(failed));
        }
    }
    return out;
}

} // namespace mdpde
