#ifndef MDPDE_MODEL_HPP
#define MDPDE_MODEL_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mdpde/errors.hpp"

namespace mdpde {

enum class Family { Poisson, NormalLinear };
enum class Support { CountsNonNegativeIntegers, RealLine };
enum class Link { Log, Identity };

// Parameter vector: beta, plus the dispersion when it is estimated.
// phi is the error standard deviation for the normal-linear family.
struct Eta {
    Eigen::VectorXd beta;
    std::optional<double> phi;

    int dim() const { return static_cast<int>(beta.size()) + (phi ? 1 : 0); }

    Eigen::VectorXd packed() const {
        Eigen::VectorXd v(dim());
        v.head(beta.size()) = beta;
        if (phi) v(beta.size()) = *phi;
        return v;
    }
    static Eta unpack(const Eigen::VectorXd& v, bool has_phi) {
        Eta e;
        if (has_phi) {
            e.beta = v.head(v.size() - 1);
            e.phi = v(v.size() - 1);
        } else {
            e.beta = v;
        }
        return e;
    }
};

struct Observation {
    double y;
    Eigen::VectorXd x;
};

using Sample = std::vector<Observation>;

struct ScoreComponents {
    double k1;                 // d log f / d(linear predictor direction): K1 * x is the beta score
    std::optional<double> k2;  // d log f / d phi, absent when dispersion is known
};

// Exponential-family conditional density f(y, x'beta, phi) with a canonical
// pairing of family and link. Two concrete instances are provided:
// Poisson counts with log link (phi = 1 known) and the normal linear model
// with identity link (phi unknown, variance phi^2).
class GlmModel {
public:
    static GlmModel poisson();
    static GlmModel normal_linear();

    Family family() const { return family_; }
    Support support() const { return support_; }
    Link link() const { return link_; }
    bool dispersion_known() const { return dispersion_known_; }
    double known_phi() const { return known_phi_; }

    // Resolves phi: the known value for Poisson, eta.phi otherwise.
    double effective_phi(const Eta& eta) const;

    bool in_support(double y) const;

    double mean(double linear_predictor) const;
    double variance(double linear_predictor, double phi) const;

    double log_density(double y, double linear_predictor, double phi) const;
    ScoreComponents score_components(double y, double linear_predictor, double phi) const;

private:
    GlmModel(Family f, Support s, Link l, bool known, double phi)
        : family_(f), support_(s), link_(l), dispersion_known_(known), known_phi_(phi) {}

    void check_args(double y, double phi) const;

    Family family_;
    Support support_;
    Link link_;
    bool dispersion_known_;
    double known_phi_;
};

} // namespace mdpde

#endif
