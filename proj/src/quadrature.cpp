#include "hermite/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hermite {

namespace {

// Newton iteration on Legendre polynomials; standard construction.
GaussLegendre build_gauss_legendre(int order) {
    GaussLegendre r;
    r.nodes.resize(order);
    r.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[order - 1 - i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[order - 1 - i] = r.weights[i];
    }
    return r;
}

std::mutex gl_mutex;
std::map<int, GaussLegendre> gl_cache;

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    std::lock_guard<std::mutex> lock(gl_mutex);
    auto it = gl_cache.find(order);
    if (it == gl_cache.end()) it = gl_cache.emplace(order, build_gauss_legendre(order)).first;
    return it->second;
}

double gl_integrate(const std::function<double(double)>& fn, double a, double b, int npts) {
    const GaussLegendre& gl = gauss_legendre(npts);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < npts; ++i) acc += gl.weights[i] * fn(mid + half * gl.nodes[i]);
    return acc * half;
}

// Tanh-sinh: x = mid + half*tanh((pi/2) sinh t). Node offsets from the
// nearest endpoint are computed in exponential form so that bounded
// integrands with endpoint kinks (and mild integrable singularities)
// are resolved to near machine precision.
double tanh_sinh_integrate(const std::function<double(double)>& fn, double a, double b,
                           double rel_tol, int max_level) {
    if (!(b >= a)) throw std::invalid_argument("tanh_sinh_integrate: requires a <= b");
    if (a == b) return 0.0;
    const double half = 0.5 * (b - a);
    const double tmax = 3.8;  // offsets shrink to ~1e-30*(b-a); weights to ~1e-30

    auto eval = [&](double t) -> double {
        const double s = (std::numbers::pi / 2.0) * std::sinh(std::fabs(t));
        const double e = std::exp(-2.0 * s);
        const double off = half * 2.0 * e / (1.0 + e);              // distance to the near endpoint
        const double w = (std::numbers::pi / 2.0) * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
        const double x = (t >= 0.0) ? b - off : a + off;
        if (off <= 0.0) return 0.0;  // underflow into the endpoint
        const double v = fn(x);
        return std::isfinite(v) ? w * v : 0.0;
    };

    // level 0: trapezoid at integer t; level k adds odd multiples of h = 2^-k
    double sum = eval(0.0);
    for (double t = 1.0; t <= tmax; t += 1.0) sum += eval(t) + eval(-t);
    double h = 1.0;
    double prev = half * h * sum;
    double result = prev;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= tmax; t += 2.0 * h) add += eval(t) + eval(-t);
        sum += add;
        result = half * h * sum;
        if (level >= 4 && std::fabs(result - prev) <= rel_tol * std::fabs(result)) return result;
        prev = result;
    }
    return result;
}

double integrate_piecewise(const std::function<double(double)>& fn, double a, double b,
                           const std::vector<double>& breakpoints, double rel_tol) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) acc += tanh_sinh_integrate(fn, cuts[i], cuts[i + 1], rel_tol);
    return acc;
}

}  // namespace hermite
