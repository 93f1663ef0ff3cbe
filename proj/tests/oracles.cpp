#include "oracles.hpp"

#include <cmath>

#include "mdpde/rng.hpp"

namespace oracle {

GammaRef gamma_poisson(double lp, double alpha) {
    const double mu = std::exp(lp);
    GammaRef out{0.0, 0.0, 0.0};
    const long nmax = std::max<long>(500, static_cast<long>(20.0 * mu) + 500);
    for (long y = 0; y <= nmax; ++y) {
        double logf = y * lp - mu - std::lgamma(static_cast<double>(y) + 1.0);
        double t = std::exp((1.0 + alpha) * logf);
        out.mass += t;
        out.g1 += (y - mu) * t;
        out.g11 += (y - mu) * (y - mu) * t;
        if (y > mu && t * (1.0 + (y - mu) * (y - mu)) < 1e-12 * (out.mass + out.g11)) break;
    }
    return out;
}

Eigen::VectorXd irls_poisson(const mdpde::Sample& sample, double tol, int max_iter) {
    const int k = static_cast<int>(sample.front().x.size());
    const int n = static_cast<int>(sample.size());
    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X.row(i) = sample[i].x.transpose();
        y(i) = sample[i].y;
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu = eta.array().exp();
        Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(mu);  // working response
        Eigen::MatrixXd Xw = mu.asDiagonal() * X;
        Eigen::VectorXd next = (X.transpose() * Xw).ldlt().solve(X.transpose() * (mu.asDiagonal() * z));
        double change = (next - beta).lpNorm<Eigen::Infinity>();
        beta = next;
        if (change < tol) break;
    }
    return beta;
}

McEstimate mc_noncentral_chisq_sf(int r, double delta, double c, long draws,
                                  std::uint64_t seed) {
    mdpde::CounterRng rng(seed, 0);
    const double shift = std::sqrt(delta);
    long hits = 0;
    for (long i = 0; i < draws; ++i) {
        double s = 0.0;
        double z0 = rng.next_normal() + shift;
        s += z0 * z0;
        for (int j = 1; j < r; ++j) {
            double z = rng.next_normal();
            s += z * z;
        }
        if (s > c) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(draws);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(draws))};
}

McEstimate mc_normal_integral(const std::function<double(double)>& h, double mu, double sd,
                              long draws, std::uint64_t seed) {
    mdpde::CounterRng rng(seed, 1);
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < draws; ++i) {
        double v = h(mu + sd * rng.next_normal());
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / draws;
    double var = sumsq / draws - mean * mean;
    return {mean, std::sqrt(var / draws)};
}

Eigen::VectorXd finite_diff_grad(const std::function<double(const Eigen::VectorXd&)>& F,
                                 const Eigen::VectorXd& x, double h_scale) {
    Eigen::VectorXd g(x.size());
    for (int j = 0; j < x.size(); ++j) {
        double h = h_scale * (1.0 + std::fabs(x(j)));
        Eigen::VectorXd up = x, dn = x;
        up(j) += h;
        dn(j) -= h;
        g(j) = (F(up) - F(dn)) / (2.0 * h);
    }
    return g;
}

Eigen::Vector3d solve3_adjugate(const Eigen::Matrix3d& A, const Eigen::Vector3d& b) {
    auto cof = [&](int i, int j) {
        int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
        int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
        return A(r0, c0) * A(r1, c1) - A(r0, c1) * A(r1, c0);
    };
    double det = A(0, 0) * cof(0, 0) + A(0, 1) * cof(0, 1) + A(0, 2) * cof(0, 2);
    Eigen::Matrix3d adjT;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) adjT(j, i) = cof(i, j);
    }
    return (adjT * b) / det;
}

double conditional_expectation(const mdpde::GlmModel& model, double lp, double phi,
                               const std::function<double(double)>& h) {
    if (model.support() == mdpde::Support::CountsNonNegativeIntegers) {
        double mu = std::exp(lp);
        double total = 0.0;
        const long nmax = std::max<long>(500, static_cast<long>(20.0 * mu) + 500);
        for (long y = 0; y <= nmax; ++y) {
            double f = std::exp(model.log_density(static_cast<double>(y), lp, phi));
            total += h(static_cast<double>(y)) * f;
            if (y > mu && f < 1e-18) break;
        }
        return total;
    }
    // Simpson on [lp - 12 phi, lp + 12 phi]
    const int n = 4000;  // even
    const double a = lp - 12.0 * phi, b = lp + 12.0 * phi;
    const double dx = (b - a) / n;
    double total = 0.0;
    for (int i = 0; i <= n; ++i) {
        double y = a + i * dx;
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        total += w * h(y) * std::exp(model.log_density(y, lp, phi));
    }
    return total * dx / 3.0;
}

} // namespace oracle
