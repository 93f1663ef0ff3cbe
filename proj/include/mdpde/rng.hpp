#ifndef MDPDE_RNG_HPP
#define MDPDE_RNG_HPP

#include <cstdint>

namespace mdpde {

// Counter-based generator: output i of stream (seed, stream) is a fixed
// bijective mix of the counter, so draws are reproducible regardless of
// scheduling and streams can be split per replicate.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_uniform();  // strictly inside (0,1)
    double next_normal();   // inverse-CDF transform
    // Inversion below mean 10, transformed rejection (PTRS) above.
    long next_poisson(double mu);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

} // namespace mdpde

#endif
