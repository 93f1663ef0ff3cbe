#include "mdpde/rng.hpp"

#include <cmath>

#include "mdpde/errors.hpp"
#include "mdpde/numerics.hpp"

namespace mdpde {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key_ = mix64(mix64(seed) ^ mix64(stream * 0xda942042e4dd58b5ULL + 1));
}

std::uint64_t CounterRng::next_u64() {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
    return normal_quantile(next_uniform());
}

long CounterRng::next_poisson(double mu) {
    if (!(mu >= 0.0)) throw DomainError("next_poisson: need mu >= 0");
    if (mu == 0.0) return 0;
    if (mu < 10.0) {
        // sequential inversion
        double p = std::exp(-mu);
        double cdf = p;
        double u = next_uniform();
        long k = 0;
        while (u > cdf && k < 10000) {
            ++k;
            p *= mu / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    // Hormann's PTRS transformed rejection.
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mu = std::log(mu);
    for (int guard = 0; guard < 100000; ++guard) {
        double u = next_uniform() - 0.5;
        double v = next_uniform();
        double us = 0.5 - std::fabs(u);
        long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + mu + 0.43));
        if (us >= 0.07 && v <= v_r) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_mu - mu - std::lgamma(static_cast<double>(k) + 1.0);
        if (lhs <= rhs) return k;
    }
    throw NonConvergence("next_poisson: rejection loop did not terminate");
}

} // namespace mdpde
