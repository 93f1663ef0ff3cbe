#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdpde/numerics.hpp"
#include "mdpde/rng.hpp"
#include "oracles.hpp"

using namespace mdpde;

TEST_CASE("chi-square tail and quantile") {
    CHECK(chisq_sf(1, 3.841459) == doctest::Approx(0.05).epsilon(1e-4));
    CHECK(std::fabs(chisq_sf(1, 3.841459) - 0.05) < 1e-6);
    CHECK(chisq_sf(2, 0.0) == 1.0);
    CHECK(chisq_quantile(1, 0.95) == doctest::Approx(3.841459).epsilon(1e-9));

    CounterRng rng(2024, 0);
    for (int i = 0; i < 20; ++i) {
        double r = 1.0 + std::floor(rng.next_uniform() * 10.0);
        double p = 0.01 + 0.98 * rng.next_uniform();
        double c = chisq_quantile(r, p);
        CHECK(std::fabs(chisq_sf(r, c) - (1.0 - p)) < 1e-10);
    }
    CHECK_THROWS_AS(chisq_quantile(1, 0.0), DomainError);
    CHECK_THROWS_AS(chisq_sf(0, 1.0), DomainError);
}

TEST_CASE("standard normal cdf and quantile") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
    for (double x = -6.0; x <= 6.0; x += 0.37) {
        CHECK(normal_cdf(-x) == doctest::Approx(1.0 - normal_cdf(x)).epsilon(1e-14));
    }
    for (double p = 0.001; p < 1.0; p += 0.017) {
        CHECK(std::fabs(normal_cdf(normal_quantile(p)) - p) < 1e-12);
    }
    CHECK_THROWS_AS(normal_quantile(1.0), DomainError);
}

TEST_CASE("gauss-hermite exactness") {
    // moments of exp(-x^2): odd vanish, m0 = sqrt(pi), m2 = sqrt(pi)/2,
    // m4 = 3 sqrt(pi)/4, m6 = 15 sqrt(pi)/8, m8 = 105 sqrt(pi)/16
    const double sq = std::sqrt(std::numbers::pi_v<double>);
    const double expected[9] = {sq, 0, sq / 2, 0, 3 * sq / 4, 0, 15 * sq / 8, 0, 105 * sq / 16};
    for (int n : {5, 21, 61}) {
        const auto& rule = gauss_hermite(n);
        CHECK((rule.weights.array() > 0).all());
        for (int deg = 0; deg <= 8; ++deg) {
            double s = 0.0;
            for (int i = 0; i < rule.nodes.size(); ++i) {
                s += rule.weights[i] * std::pow(rule.nodes[i], deg);
            }
            CHECK(std::fabs(s - expected[deg]) < 1e-12 * std::max(1.0, expected[deg]));
        }
    }
}

TEST_CASE("solve_spd") {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b(3);
    b << 1.0, -2.0, 0.5;
    CHECK((solve_spd(I, b) - b).norm() == 0.0);

    CounterRng rng(7, 0);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::Matrix3d B;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) B(i, j) = rng.next_normal();
        Eigen::Matrix3d A = B * B.transpose() + Eigen::Matrix3d::Identity();
        Eigen::Vector3d rhs;
        rhs << rng.next_normal(), rng.next_normal(), rng.next_normal();
        Eigen::Vector3d ref = oracle::solve3_adjugate(A, rhs);
        Eigen::VectorXd got = solve_spd(Eigen::MatrixXd(A), Eigen::VectorXd(rhs));
        CHECK((got - ref).norm() < 1e-10 * ref.norm());
        CHECK((A * got - rhs).norm() <= 1e-10 * rhs.norm());
    }

    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(solve_spd(Z, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), SingularMatrix);
    Eigen::MatrixXd Ind(2, 2);
    Ind << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(solve_spd(Ind, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), NotPositiveDefinite);
    Eigen::MatrixXd Illcond(2, 2);
    Illcond << 1.0, 0.0, 0.0, 1e-14;
    CHECK_THROWS_AS(solve_spd(Illcond, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), SingularMatrix);
}

TEST_CASE("compensated summation") {
    std::vector<double> v;
    for (int i = 0; i < 10000; ++i) {
        v.push_back(1e16);
        v.push_back(1.0);
        v.push_back(-1e16);
    }
    CHECK(pairwise_sum(v) == doctest::Approx(10000.0).epsilon(1e-12));
    KahanSum k;
    for (double x : v) k.add(x);
    CHECK(k.value() == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("counter rng determinism and poisson sampling") {
    CounterRng a(42, 3), b(42, 3), c(42, 4);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(a.next_u64() != c.next_u64());

    // moments at small and large mean, both sampler branches
    for (double mu : {3.0, 40.0}) {
        CounterRng rng(11, 0);
        const long n = 200000;
        double s = 0, ss = 0;
        for (long i = 0; i < n; ++i) {
            double y = static_cast<double>(rng.next_poisson(mu));
            s += y;
            ss += y * y;
        }
        double mean = s / n;
        double var = ss / n - mean * mean;
        CHECK(std::fabs(mean - mu) < 4.0 * std::sqrt(mu / n));
        CHECK(std::fabs(var - mu) < 0.05 * mu);
    }
}
