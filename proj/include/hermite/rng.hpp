#pragma once

#include <cstdint>
#include <random>

namespace hermite {

// Seed for one random stream. Same (seed, stream) plus the same draw sequence
// gives bit-identical output on every platform: the engine is mt19937_64
// (fully specified by the standard) and normals come from a deterministic
// inverse-CDF transform, never from std::normal_distribution.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Engine for (seed, stream) and a counter (e.g. replication index).
// Derivation is counter-based so workers can seed independently in any order.
std::mt19937_64 make_engine(RngSeed s, std::uint64_t counter = 0);

// Uniform on the open interval (0,1); 53-bit resolution.
double uniform_open(std::mt19937_64& eng);

// Standard normal via the AS241 inverse CDF (double precision).
double inverse_normal_cdf(double p);
double std_normal(std::mt19937_64& eng);

}  // namespace hermite
