#include "mdpde/model.hpp"

#include <cmath>
#include <numbers>

namespace mdpde {

namespace {
constexpr double kMinPhi = 1e-12;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi_v<double>);
} // namespace

GlmModel GlmModel::poisson() {
    return GlmModel(Family::Poisson, Support::CountsNonNegativeIntegers, Link::Log, true, 1.0);
}

GlmModel GlmModel::normal_linear() {
    return GlmModel(Family::NormalLinear, Support::RealLine, Link::Identity, false, 0.0);
}

double GlmModel::effective_phi(const Eta& eta) const {
    if (dispersion_known_) return known_phi_;
    if (!eta.phi) throw DomainError("eta.phi required when dispersion is unknown");
    return *eta.phi;
}

bool GlmModel::in_support(double y) const {
    if (!std::isfinite(y)) return false;
    if (support_ == Support::CountsNonNegativeIntegers) {
        return y >= 0.0 && y == std::floor(y);
    }
    return true;
}

double GlmModel::mean(double lp) const {
    switch (family_) {
        case Family::Poisson: return std::exp(lp);
        case Family::NormalLinear: return lp;
    }
    throw DomainError("unknown family");
}

double GlmModel::variance(double lp, double phi) const {
    switch (family_) {
        case Family::Poisson: return std::exp(lp);
        case Family::NormalLinear: return phi * phi;
    }
    throw DomainError("unknown family");
}

void GlmModel::check_args(double y, double phi) const {
    if (!in_support(y)) throw DomainError("y outside the support of the family");
    if (!dispersion_known_ && !(phi >= kMinPhi)) {
        throw DomainError("phi must be positive");
    }
}

double GlmModel::log_density(double y, double lp, double phi) const {
    check_args(y, phi);
    switch (family_) {
        case Family::Poisson:
            // log f = y*lp - exp(lp) - log(y!)
            return y * lp - std::exp(lp) - std::lgamma(y + 1.0);
        case Family::NormalLinear: {
            double z = (y - lp) / phi;
            return -0.5 * z * z - std::log(phi) - kLogSqrt2Pi;
        }
    }
    throw DomainError("unknown family");
}

ScoreComponents GlmModel::score_components(double y, double lp, double phi) const {
    check_args(y, phi);
    switch (family_) {
        case Family::Poisson:
            // log link: K1 = y - mean
            return {y - std::exp(lp), std::nullopt};
        case Family::NormalLinear: {
            double r = y - lp;
            double k1 = r / (phi * phi);
            double k2 = r * r / (phi * phi * phi) - 1.0 / phi;
            return {k1, k2};
        }
    }
    throw DomainError("unknown family");
}

} // namespace mdpde
