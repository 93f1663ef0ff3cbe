#include "mdpde/dpd.hpp"

#include <cmath>
#include <numbers>

#include "mdpde/numerics.hpp"

namespace mdpde {

namespace detail {

namespace {

constexpr double kTermTol = 1e-14;

// Poisson: K1 = y - mu with the log link, no phi block.
GammaCore gamma_core_counts(double lp, double alpha) {
    const double mu = std::exp(lp);
    const double sd = std::sqrt(mu);
    const double p = 1.0 + alpha;

    long lo = static_cast<long>(std::floor(mu - 12.0 * sd)) - 50;
    if (lo < 0) lo = 0;
    long hi = static_cast<long>(std::ceil(mu + 12.0 * sd)) + 50;

    KahanSum mass, s1, s2;
    // log f(lo), then log f(y+1) = log f(y) + lp - log(y+1)
    double logf = lo * lp - mu - std::lgamma(static_cast<double>(lo) + 1.0);
    long y = lo;
    bool in_tail = false;
    const long hard_cap = hi + 100000000L;
    while (true) {
        double w = std::exp(p * logf);
        double r = static_cast<double>(y) - mu;
        mass.add(w);
        s1.add(r * w);
        s2.add(r * r * w);
        if (y >= hi) {
            in_tail = true;
            double scale = mass.value() + std::fabs(s2.value());
            if (w * (1.0 + r * r) < kTermTol * scale) break;
            if (y >= hard_cap) throw NonConvergence("gamma_core: count summation did not terminate");
        }
        ++y;
        logf += lp - std::log(static_cast<double>(y));
    }
    (void)in_tail;

    GammaCore out;
    out.mass = mass.value();
    out.g1 = s1.value();
    out.g11 = s2.value();
    out.has_phi = false;
    return out;
}

GammaCore eval_continuous(const GlmModel& model, double lp, double phi, double alpha, int n) {
    const auto& rule = gauss_hermite(n);
    const double p = 1.0 + alpha;
    const double scale = std::numbers::sqrt2_v<double> * phi / std::sqrt(p);

    KahanSum mass, s1, s2, s12, s22, s2phi;
    for (int i = 0; i < rule.nodes.size(); ++i) {
        double t = rule.nodes[i];
        double y = lp + scale * t;
        double logf = model.log_density(y, lp, phi);
        double w = rule.weights[i] * std::exp(p * logf + t * t) * scale;
        auto sc = model.score_components(y, lp, phi);
        mass.add(w);
        s1.add(sc.k1 * w);
        s2.add(sc.k1 * sc.k1 * w);
        double k2 = *sc.k2;
        s2phi.add(k2 * w);
        s12.add(sc.k1 * k2 * w);
        s22.add(k2 * k2 * w);
    }
    GammaCore out;
    out.mass = mass.value();
    out.g1 = s1.value();
    out.g11 = s2.value();
    out.g2 = s2phi.value();
    out.g12 = s12.value();
    out.g22 = s22.value();
    out.has_phi = true;
    return out;
}

GammaCore gamma_core_continuous(const GlmModel& model, double lp, double phi, double alpha) {
    GammaCore fine = eval_continuous(model, lp, phi, alpha, 201);
    GammaCore coarse = eval_continuous(model, lp, phi, alpha, 101);
    double ref = std::fabs(fine.mass) + std::fabs(fine.g11) + std::fabs(fine.g22) + 1e-30;
    double diff = std::fabs(fine.mass - coarse.mass) + std::fabs(fine.g1 - coarse.g1) +
                  std::fabs(fine.g11 - coarse.g11) + std::fabs(fine.g2 - coarse.g2) +
                  std::fabs(fine.g12 - coarse.g12) + std::fabs(fine.g22 - coarse.g22);
    if (diff > 1e-9 * ref) throw NonConvergence("gamma_core: quadrature tolerance not met");
    return fine;
}

} // namespace

GammaCore gamma_core(const GlmModel& model, double lp, double phi, double alpha) {
    if (alpha < 0.0) throw DomainError("gamma_core: need alpha >= 0");
    if (model.support() == Support::CountsNonNegativeIntegers) {
        return gamma_core_counts(lp, alpha);
    }
    return gamma_core_continuous(model, lp, phi, alpha);
}

} // namespace detail

GammaSet gamma_set(const GlmModel& model, const Eigen::VectorXd& x, const Eta& eta,
                   double alpha) {
    double lp = x.dot(eta.beta);
    double phi = model.effective_phi(eta);
    auto core = detail::gamma_core(model, lp, phi, alpha);
    GammaSet g;
    g.gamma1 = core.g1;
    g.gamma11 = core.g11;
    if (core.has_phi) {
        g.gamma2 = core.g2;
        g.gamma12 = core.g12;
        g.gamma22 = core.g22;
    }
    return g;
}

Eigen::VectorXd psi_alpha(const GlmModel& model, const Observation& obs, const Eta& eta,
                          double alpha) {
    if (obs.x.size() != eta.beta.size()) throw DomainError("psi_alpha: dimension mismatch");
    double lp = obs.x.dot(eta.beta);
    double phi = model.effective_phi(eta);
    auto core = detail::gamma_core(model, lp, phi, alpha);
    auto sc = model.score_components(obs.y, lp, phi);
    // alpha = 0 short-circuits f^alpha to exactly one
    double fa = alpha == 0.0 ? 1.0 : std::exp(alpha * model.log_density(obs.y, lp, phi));

    Eigen::VectorXd out(eta.dim());
    out.head(obs.x.size()) = (core.g1 - sc.k1 * fa) * obs.x;
    if (eta.phi) out(obs.x.size()) = core.g2 - *sc.k2 * fa;
    return out;
}

double dpd_objective(const GlmModel& model, std::span<const Observation> sample,
                     const Eta& eta, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("dpd_objective: need alpha > 0");
    double phi = model.effective_phi(eta);
    KahanSum acc;
    for (const auto& obs : sample) {
        double lp = obs.x.dot(eta.beta);
        auto core = detail::gamma_core(model, lp, phi, alpha);
        double fa = std::exp(alpha * model.log_density(obs.y, lp, phi));
        acc.add(fa / (alpha * alpha) - core.mass / (alpha * (1.0 + alpha)));
    }
    return acc.value() / static_cast<double>(sample.size());
}

double dpd_loss(const GlmModel& model, std::span<const Observation> sample, const Eta& eta,
                double alpha) {
    double phi = model.effective_phi(eta);
    KahanSum acc;
    for (const auto& obs : sample) {
        double lp = obs.x.dot(eta.beta);
        if (alpha == 0.0) {
            acc.add(-model.log_density(obs.y, lp, phi));
        } else {
            auto core = detail::gamma_core(model, lp, phi, alpha);
            double fa = std::exp(alpha * model.log_density(obs.y, lp, phi));
            acc.add(core.mass - (1.0 + 1.0 / alpha) * fa);
        }
    }
    return acc.value() / static_cast<double>(sample.size());
}

} // namespace mdpde
