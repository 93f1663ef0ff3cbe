#include "mdpde/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace mdpde {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Lower regularized incomplete gamma by series, valid for x < a+1.
double gser(double a, double x) {
    if (x <= 0.0) return 0.0;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < kMaxIter * 10; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by modified Lentz continued fraction,
// valid for x >= a+1.
double gcf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter * 10; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gser(a, x);
    return 1.0 - gcf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gser(a, x);
    return gcf(a, x);
}

double chisq_sf(double r, double c) {
    if (r <= 0.0) throw DomainError("chisq_sf: need r > 0");
    if (c < 0.0) throw DomainError("chisq_sf: need c >= 0");
    return gamma_q(0.5 * r, 0.5 * c);
}

double chisq_quantile(double r, double p) {
    if (r <= 0.0) throw DomainError("chisq_quantile: need r > 0");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chisq_quantile: need p in (0,1)");

    // Wilson-Hilferty start, then Newton on the CDF with a bisection bracket.
    double z = normal_quantile(p);
    double t = 1.0 - 2.0 / (9.0 * r) + z * std::sqrt(2.0 / (9.0 * r));
    double x = r * t * t * t;
    if (!(x > 0.0)) x = 0.5 * r;

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double lognorm = std::lgamma(0.5 * r) + 0.5 * r * std::numbers::ln2_v<double>;
    for (int it = 0; it < 200; ++it) {
        double f = gamma_p(0.5 * r, 0.5 * x) - p;
        if (f > 0.0) hi = x; else lo = x;
        double logpdf = (0.5 * r - 1.0) * std::log(x) - 0.5 * x - lognorm;
        double step = f / std::exp(logpdf);
        double xn = x - step;
        if (!(xn > lo && (xn < hi))) {
            xn = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0 ? 2.0 * lo : 1.0);
        }
        if (std::fabs(xn - x) <= 1e-14 * (1.0 + std::fabs(x))) { x = xn; break; }
        x = xn;
    }
    return x;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2_v<double>);
}

double normal_sf(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2_v<double>);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: need p in (0,1)");

    // Acklam's rational approximation, then one Halley step against erfc.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double s = q * q;
        x = (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * q /
            (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement.
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * std::numbers::pi_v<double>) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

const QuadratureRule& gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: need n >= 1");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Newton iteration on the physicists' Hermite recurrence (weight exp(-t^2)).
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pim4 = 0.7511255444649425; // pi^{-1/4}
    int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        bool ok = false;
        for (int it2 = 0; it2 < 200; ++it2) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * (1.0 + std::fabs(z))) { ok = true; break; }
        }
        if (!ok) throw NonConvergence("gauss_hermite: node iteration failed");
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    // Store nodes ascending for deterministic evaluation order.
    std::vector<std::pair<double, double>> nw(n);
    for (int i = 0; i < n; ++i) nw[i] = {rule.nodes[i], rule.weights[i]};
    std::sort(nw.begin(), nw.end());
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = nw[i].first;
        rule.weights[i] = nw[i].second;
    }
    auto [pos, inserted] = cache.emplace(n, std::move(rule));
    return pos->second;
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> checked_decomposition(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw DomainError("solve_spd: matrix not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw SingularMatrix("solve_spd: eigendecomposition failed");
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    if (lmax <= 0.0) throw SingularMatrix("solve_spd: matrix is zero or negative");
    if (lmin < -1e-10 * lmax) throw NotPositiveDefinite("solve_spd: matrix is indefinite");
    if (lmin <= 0.0 || lmax / lmin > kConditionLimit) {
        throw SingularMatrix("solve_spd: condition number exceeds limit");
    }
    return es;
}

} // namespace

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    auto es = checked_decomposition(A);
    return es.eigenvectors() *
           (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * b));
}

Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    auto es = checked_decomposition(A);
    return es.eigenvectors() *
           (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * B));
}

namespace {

double pairwise_rec(const double* v, std::size_t n) {
    if (n <= 128) {
        KahanSum s;
        for (std::size_t i = 0; i < n; ++i) s.add(v[i]);
        return s.value();
    }
    std::size_t h = n / 2;
    return pairwise_rec(v, h) + pairwise_rec(v + h, n - h);
}

} // namespace

double pairwise_sum(std::span<const double> v) {
    return pairwise_rec(v.data(), v.size());
}

} // namespace mdpde
