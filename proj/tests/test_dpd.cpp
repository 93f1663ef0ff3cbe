#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mdpde/dpd.hpp"
#include "mdpde/rng.hpp"
#include "oracles.hpp"

using namespace mdpde;

namespace {

Eta scalar_eta(double b) { return Eta{Eigen::VectorXd::Constant(1, b), std::nullopt}; }

Eigen::VectorXd vec1(double v) { return Eigen::VectorXd::Constant(1, v); }

} // namespace

TEST_CASE("gamma integrals against the direct-summation reference") {
    auto pois = GlmModel::poisson();

    auto g0 = gamma_set(pois, vec1(1.0), scalar_eta(0.0), 0.0);
    CHECK(std::fabs(g0.gamma1) < 1e-12);
    CHECK(g0.gamma11 == doctest::Approx(1.0).epsilon(1e-10));  // e^{x'beta} at 0
    CHECK(!g0.gamma2);

    for (double lp : {-1.0, 0.0, 1.0, 2.5}) {
        for (double alpha : {0.1, 0.25, 0.5, 1.0}) {
            auto ref = oracle::gamma_poisson(lp, alpha);
            auto g = gamma_set(pois, vec1(lp), scalar_eta(1.0), alpha);
            CHECK(g.gamma1 == doctest::Approx(ref.g1).epsilon(1e-10));
            CHECK(g.gamma11 == doctest::Approx(ref.g11).epsilon(1e-10));
        }
    }

    // alpha = 0 gives gamma11 = mean for any linear predictor
    for (double lp : {-2.0, 0.5, 3.0}) {
        auto g = gamma_set(pois, vec1(lp), scalar_eta(1.0), 0.0);
        CHECK(g.gamma11 == doctest::Approx(std::exp(lp)).epsilon(1e-10));
    }
}

TEST_CASE("gamma integrals for the normal family") {
    auto norm = GlmModel::normal_linear();
    Eta eta{vec1(0.8), 1.4};
    // closed forms: with s2 = phi^2/(1+alpha) and
    // C = (2 pi phi^2)^{-alpha/2} (1+alpha)^{-1/2},
    // gamma1 = 0, gamma11 = C s2 / phi^4, gamma2 = C (s2 - phi^2)/phi^3,
    // gamma22 = C (3 s2^2 - 2 s2 phi^2 + phi^4)/phi^6, gamma12 = 0
    for (double alpha : {0.0, 0.3, 1.0}) {
        double phi = *eta.phi;
        double C = std::pow(2.0 * std::acos(-1.0) * phi * phi, -alpha / 2.0) /
                   std::sqrt(1.0 + alpha);
        double s2 = phi * phi / (1.0 + alpha);
        auto g = gamma_set(norm, vec1(1.0), eta, alpha);
        CHECK(std::fabs(g.gamma1) < 1e-12);
        CHECK(g.gamma11 == doctest::Approx(C * s2 / std::pow(phi, 4)).epsilon(1e-10));
        CHECK(*g.gamma2 == doctest::Approx(C * (s2 - phi * phi) / std::pow(phi, 3)).epsilon(1e-10));
        CHECK(std::fabs(*g.gamma12) < 1e-12);
        double g22 = C * (3.0 * s2 * s2 - 2.0 * s2 * phi * phi + std::pow(phi, 4)) /
                     std::pow(phi, 6);
        CHECK(*g.gamma22 == doctest::Approx(g22).epsilon(1e-10));
    }
}

TEST_CASE("psi examples") {
    auto pois = GlmModel::poisson();

    // zero residual at alpha = 0
    Observation clean{1.0, vec1(1.0)};
    CHECK(psi_alpha(pois, clean, scalar_eta(0.0), 0.0).norm() < 1e-12);

    Observation three{3.0, vec1(1.0)};
    CHECK(psi_alpha(pois, three, scalar_eta(0.0), 0.0)(0) == doctest::Approx(-2.0));

    // direct evaluation from the reference gamma values
    Observation zero{0.0, vec1(1.0)};
    double alpha = 0.5, beta = 1.0;
    auto ref = oracle::gamma_poisson(beta, alpha);
    double mu = std::exp(beta);
    double fa = std::exp(alpha * (0.0 * beta - mu - 0.0));  // f(0)^alpha, log(0!) = 0
    double expected = ref.g1 - (0.0 - mu) * fa;
    CHECK(psi_alpha(pois, zero, scalar_eta(beta), alpha)(0) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("conditional fisher consistency") {
    auto pois = GlmModel::poisson();
    for (double lp : {-1.0, 0.0, 1.0, 2.0, 3.0}) {
        for (double alpha : {0.0, 0.1, 0.5, 1.0}) {
            Eta eta = scalar_eta(1.0);
            double e = oracle::conditional_expectation(pois, lp, 1.0, [&](double y) {
                Observation obs{y, vec1(lp)};  // x chosen so x'beta = lp
                return psi_alpha(pois, obs, eta, alpha)(0);
            });
            CHECK(std::fabs(e) < 1e-8);
        }
    }
    auto norm = GlmModel::normal_linear();
    Eta eta{vec1(1.0), 0.9};
    for (double lp : {-0.5, 1.2}) {
        for (double alpha : {0.0, 0.5}) {
            for (int comp : {0, 1}) {
                double e = oracle::conditional_expectation(norm, lp, *eta.phi, [&](double y) {
                    Observation obs{y, vec1(lp)};
                    return psi_alpha(norm, obs, eta, alpha)(comp);
                });
                CHECK(std::fabs(e) < 1e-8);
            }
        }
    }
}

TEST_CASE("psi boundedness dichotomy") {
    auto pois = GlmModel::poisson();
    Eta eta = scalar_eta(1.0);

    double sup = 0.0;
    double arg = 0.0;
    for (double y : {0.0, 1.0, 2.0, 5.0, 10.0, 30.0, 100.0, 1000.0, 1e4, 1e5, 1e6}) {
        double v = std::fabs(psi_alpha(pois, {y, vec1(1.0)}, eta, 0.25)(0));
        if (v > sup) {
            sup = v;
            arg = y;
        }
    }
    CHECK(std::isfinite(sup));
    CHECK(arg <= 30.0);  // the maximum sits at small y

    // at alpha = 0 the function keeps growing past the mean
    double prev = 0.0;
    for (double y : {10.0, 100.0, 1000.0, 1e4, 1e5, 1e6}) {
        double v = std::fabs(psi_alpha(pois, {y, vec1(1.0)}, eta, 0.0)(0));
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("objective gradient identity") {
    auto pois = GlmModel::poisson();

    // -alpha * grad(objective) = mean psi, central differences
    Sample s{{2.0, vec1(1.0)}};
    double alpha = 0.4;
    Eta eta = scalar_eta(0.3);
    auto F = [&](const Eigen::VectorXd& v) {
        return dpd_objective(pois, s, Eta{v, std::nullopt}, alpha);
    };
    Eigen::VectorXd g = oracle::finite_diff_grad(F, eta.beta);
    Eigen::VectorXd psibar = psi_alpha(pois, s[0], eta, alpha);
    CHECK(std::fabs(-alpha * g(0) - psibar(0)) < 1e-6);

    // finite for a large count in log space
    Sample big{{1e4, vec1(1.0)}};
    CHECK(std::isfinite(dpd_objective(pois, big, scalar_eta(0.3), 0.5)));

    // averaging: duplicated observation changes nothing
    Sample twice{{2.0, vec1(1.0)}, {2.0, vec1(1.0)}};
    CHECK(dpd_objective(pois, twice, eta, alpha) ==
          doctest::Approx(dpd_objective(pois, s, eta, alpha)).epsilon(1e-14));

    CHECK_THROWS_AS(dpd_objective(pois, s, eta, 0.0), DomainError);
}

TEST_CASE("objective gradient identity across random configurations") {
    auto pois = GlmModel::poisson();
    auto norm = GlmModel::normal_linear();
    CounterRng rng(99, 0);
    for (int rep = 0; rep < 10; ++rep) {
        double alpha = 0.1 + rng.next_uniform();
        const int n = 3;
        Sample sp, sn;
        for (int i = 0; i < n; ++i) {
            double x = rng.next_normal();
            sp.push_back({static_cast<double>(rng.next_poisson(1.5)), vec1(x)});
            sn.push_back({rng.next_normal() * 1.5 + 0.2, vec1(x)});
        }
        Eta etap = scalar_eta(0.2 + 0.3 * rng.next_uniform());
        auto Fp = [&](const Eigen::VectorXd& v) {
            return dpd_objective(pois, sp, Eta{v, std::nullopt}, alpha);
        };
        Eigen::VectorXd gp = oracle::finite_diff_grad(Fp, etap.beta);
        Eigen::VectorXd mp = Eigen::VectorXd::Zero(1);
        for (const auto& o : sp) mp += psi_alpha(pois, o, etap, alpha) / n;
        CHECK(std::fabs(-alpha * gp(0) - mp(0)) < 1e-6);

        Eta etan{vec1(0.1 * rng.next_normal()), 0.8 + rng.next_uniform()};
        auto Fn = [&](const Eigen::VectorXd& v) {
            return dpd_objective(norm, sn, Eta::unpack(v, true), alpha);
        };
        Eigen::VectorXd gn = oracle::finite_diff_grad(Fn, etan.packed());
        Eigen::VectorXd mn = Eigen::VectorXd::Zero(2);
        for (const auto& o : sn) mn += psi_alpha(norm, o, etan, alpha) / n;
        CHECK((-alpha * gn - mn).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}
