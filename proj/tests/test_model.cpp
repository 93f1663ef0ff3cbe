#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mdpde/model.hpp"
#include "oracles.hpp"

using namespace mdpde;

TEST_CASE("log density values") {
    auto pois = GlmModel::poisson();
    CHECK(pois.log_density(0.0, 0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pois.log_density(2.0, 0.0, 1.0) ==
          doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-14));

    auto norm = GlmModel::normal_linear();
    CHECK(norm.log_density(0.7, 0.7, 1.0) ==
          doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi_v<double>)).epsilon(1e-14));

    CHECK_THROWS_AS(pois.log_density(-1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(pois.log_density(1.5, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(norm.log_density(0.0, 0.0, 0.0), DomainError);
}

TEST_CASE("densities are normalized") {
    auto pois = GlmModel::poisson();
    auto norm = GlmModel::normal_linear();
    for (double lp : {-2.0, 0.0, 1.5, 3.0}) {
        double total = oracle::conditional_expectation(pois, lp, 1.0, [](double) { return 1.0; });
        CHECK(std::fabs(total - 1.0) < 1e-10);
    }
    for (double lp : {-1.0, 0.5}) {
        for (double phi : {0.5, 2.0}) {
            double total =
                oracle::conditional_expectation(norm, lp, phi, [](double) { return 1.0; });
            CHECK(std::fabs(total - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("score components") {
    auto pois = GlmModel::poisson();
    CHECK(pois.score_components(1.0, 0.0, 1.0).k1 == doctest::Approx(0.0));
    CHECK(pois.score_components(3.0, 0.0, 1.0).k1 == doctest::Approx(2.0));
    CHECK(!pois.score_components(3.0, 0.0, 1.0).k2);

    auto norm = GlmModel::normal_linear();
    auto sc = norm.score_components(1.0, 0.0, 1.0);
    CHECK(sc.k1 == doctest::Approx(1.0));
    CHECK(*sc.k2 == doctest::Approx(0.0));
}

TEST_CASE("scores differentiate the log density") {
    // K1 * x matches d log f / d beta, K2 matches d log f / d phi
    auto norm = GlmModel::normal_linear();
    Eigen::VectorXd x(2);
    x << 1.0, -0.7;
    Eigen::VectorXd beta(2);
    beta << 0.4, 1.1;
    double y = 1.3, phi = 0.8;

    auto F = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd b = v.head(2);
        return norm.log_density(y, x.dot(b), v(2));
    };
    Eigen::VectorXd packed(3);
    packed << beta(0), beta(1), phi;
    Eigen::VectorXd g = oracle::finite_diff_grad(F, packed);
    auto sc = norm.score_components(y, x.dot(beta), phi);
    CHECK((g.head(2) - sc.k1 * x).lpNorm<Eigen::Infinity>() < 1e-7);
    CHECK(std::fabs(g(2) - *sc.k2) < 1e-7);

    auto pois = GlmModel::poisson();
    auto Fp = [&](const Eigen::VectorXd& b) { return pois.log_density(4.0, x.dot(b), 1.0); };
    Eigen::VectorXd gp = oracle::finite_diff_grad(Fp, beta);
    auto scp = pois.score_components(4.0, x.dot(beta), 1.0);
    CHECK((gp - scp.k1 * x).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("conditional score has mean zero") {
    auto pois = GlmModel::poisson();
    auto norm = GlmModel::normal_linear();
    for (double lp : {-1.0, 0.0, 2.0}) {
        double ek1 = oracle::conditional_expectation(pois, lp, 1.0, [&](double y) {
            return pois.score_components(y, lp, 1.0).k1;
        });
        CHECK(std::fabs(ek1) < 1e-8);
    }
    for (double lp : {-0.5, 1.0}) {
        double phi = 1.3;
        double ek1 = oracle::conditional_expectation(norm, lp, phi, [&](double y) {
            return norm.score_components(y, lp, phi).k1;
        });
        double ek2 = oracle::conditional_expectation(norm, lp, phi, [&](double y) {
            return *norm.score_components(y, lp, phi).k2;
        });
        CHECK(std::fabs(ek1) < 1e-8);
        CHECK(std::fabs(ek2) < 1e-8);
    }
}

TEST_CASE("poisson mean equals variance") {
    auto pois = GlmModel::poisson();
    for (double lp = -3.0; lp <= 3.0; lp += 0.5) {
        CHECK(pois.mean(lp) == doctest::Approx(std::exp(lp)));
        CHECK(pois.variance(lp, 1.0) == doctest::Approx(pois.mean(lp)));
        CHECK(pois.variance(lp, 1.0) > 0.0);
    }
    // log link inverts the mean on a grid
    for (double lp = -3.0; lp <= 3.0; lp += 0.5) {
        CHECK(std::log(pois.mean(lp)) == doctest::Approx(lp).epsilon(1e-12));
    }
}
