#pragma once

#include <functional>
#include <vector>

namespace hermite {

// Gauss-Legendre nodes/weights on [-1,1], computed once per order and cached.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// \int_a^b fn dx with an npts-point Gauss-Legendre rule (smooth integrands).
double gl_integrate(const std::function<double(double)>& fn, double a, double b, int npts = 64);

// \int_a^b fn dx by tanh-sinh quadrature. Handles integrable endpoint
// singularities (x-a)^{p-1}, (b-x)^{p-1}, p > 0. max_level 10 reaches
// ~1e-13 relative accuracy on such integrands.
double tanh_sinh_integrate(const std::function<double(double)>& fn, double a, double b,
                           double rel_tol = 1e-12, int max_level = 10);

// Integral over [a,b] of a piecewise-smooth function with the given interior
// breakpoints: splits at the breakpoints and applies tanh-sinh per piece.
double integrate_piecewise(const std::function<double(double)>& fn, double a, double b,
                           const std::vector<double>& breakpoints, double rel_tol = 1e-12);

}  // namespace hermite
