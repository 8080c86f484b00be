#pragma once

#include <functional>
#include <string>
#include <utility>

#include "hermite/core.hpp"

namespace hermite {

// SDE dY = g(Y)dt + f(t)dZ. The solver does not (cannot) verify growth
// conditions on g; the caller attests to them via the two flags, and the
// solver refuses to run without both. Catalog drifts set them for you.
struct SdeSpec {
    std::function<double(double)> drift;
    IntensityFn intensity;
    double y0 = 0.0;
    bool locally_lipschitz = false;  // attested: g locally Lipschitz
    bool lyapunov = false;           // attested: y*g(y) <= C(1+y^2) outside a compact
    std::string drift_label;
};

// Named drift catalog for config files / CLI:
//   "zero"      g(y) = 0
//   "linear"    g(y) = -param * y
//   "cubic"     g(y) = -y^3 + param * y
//   "logistic"  g(y) = param * y * (1 - y)
// Attestation flags are pre-set (these are the supported, well-behaved drifts).
SdeSpec sde_from_catalog(const std::string& drift, double param,
                         const IntensityFn& f, double y0);

// Left-point Riemann sums of f against the increments of Z:
//   X_0 = 0,  X_{t_k} = sum_{i<k} f(t_i) (Z_{t_{i+1}} - Z_{t_i}).
// Rejects non-finite f samples. values shares Z's grid.
struct WienerIntegralPath {
    SamplePath noise;        // Z
    IntensityFn integrand;   // f
    SamplePath values;       // X
};

WienerIntegralPath wiener_integral(const IntensityFn& f, const SamplePath& Z);

// Inner product <f,g> = H(2H-1) int_0^T int_0^T f(u) g(v) |u-v|^{2H-2} du dv
// on the domain [0,T] carried by f (f.T must equal g.T). The |u-v|^{2H-2}
// singularity is removed analytically: substituting s = (u-v)^{2H-1} in the
// inner integral gives
//   <f,g> = H int_0^T [ f(u) G(u) + g(u) F(u) ] du,
//   G(u) = int_0^{u^{2H-1}} g(u - s^{1/(2H-1)}) ds   (F likewise from f),
// with smooth integrands away from the declared breakpoints; the remaining
// integrals split at breakpoints and use Gauss/tanh-sinh panels.
double dh_norm(const IntensityFn& f, const IntensityFn& g, double H);

// Closed-form check of the kernel normalization identity: for alpha in (0,1/2)
// and u != v, both positive,
//   (uv)^alpha int_0^{u^v} x^{-2alpha} (u-x)^{alpha-1} (v-x)^{alpha-1} dx
//     = Beta(alpha, 1-2alpha) |u-v|^{2alpha-1}.
// Returns {numerical lhs, closed-form rhs}. The integrable endpoint
// singularities at x=0 and x=min(u,v) are absorbed by exact power
// substitutions so plain Gauss panels converge fast.
std::pair<double, double> beta_identity_check(double alpha, double u, double v);

// Explicit Euler on Z's grid:
//   Y_{i+1} = Y_i + g(Y_i) delta + f(t_i) (Z_{t_{i+1}} - Z_{t_i}).
// Requires both attestation flags; aborts with the blow-up index in the
// exception message if |Y| exceeds 1e12.
SamplePath solve_sde(const SdeSpec& spec, const SamplePath& Z);

// Rough pathwise regularity probe: regression slope of log max-increment
// against log scale over dyadic lags. Needs n >= 16; returns +infinity for a
// constant path (every increment zero at every scale).
double holder_estimate(const SamplePath& path);

}  // namespace hermite
