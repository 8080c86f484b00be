#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hermite/rng.hpp"

namespace hermite {

// Stationary autocovariance with r(0) = 1. `key` must uniquely identify the
// function (it indexes the cached circulant spectra shared across calls).
struct AcvSpec {
    std::function<double(std::uint64_t)> r;
    std::string label;
    std::string key;
};

// Exact fGn autocovariance at index H: rho(k) = ((k+1)^2H - 2k^2H + (k-1)^2H)/2.
// Evaluated by a binomial series for k >= 4: the plain second difference loses
// ~12 digits at k ~ 2^21 for H near 1, enough to corrupt embedding eigenvalues.
double fgn_acv_value(double H, std::uint64_t k);
AcvSpec fgn_acv(double H);

// rho_H(k)^(1/q): the Hermite-rank input law under which the q-th Hermite
// partial sums have exactly the fBm-type grid covariance (q! sum (m-|k|) r^q
// = q! m^2H). Well-defined for H > 1/2 where rho_H > 0.
AcvSpec fgn_root_acv(double H, int q);

// Zero-mean unit-variance Gaussian vector with the prescribed autocovariance,
// exact in law, via circulant embedding (embedding doubled up to 3 times if
// the spectrum dips negative; hard error after that). Same (spec.key, m,
// seed) gives bit-identical output.
std::vector<double> stationary_gaussian_sample(const AcvSpec& spec, std::size_t m, RngSeed seed);

// Unit-variance fGn; partial sums scaled by m^{-H} are an exact discretized
// fBm on {i/m} with covariance (s^2H + t^2H - |t-s|^2H)/2.
std::vector<double> fgn_sample(double H, std::size_t m, RngSeed seed);

// Cached embedding spectrum management (exposed for tests and warm-up).
void clear_embedding_cache();

}  // namespace hermite
