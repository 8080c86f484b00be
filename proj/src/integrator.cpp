#include "hermite/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hermite/quadrature.hpp"

namespace hermite {

SdeSpec sde_from_catalog(const std::string& drift, double param,
                         const IntensityFn& f, double y0) {
    SdeSpec s;
    s.intensity = f;
    s.y0 = y0;
    s.locally_lipschitz = true;
    s.lyapunov = true;
    s.drift_label = drift;
    if (drift == "zero") {
        s.drift = [](double) { return 0.0; };
    } else if (drift == "linear") {
        s.drift = [param](double y) { return -param * y; };
    } else if (drift == "cubic") {
        s.drift = [param](double y) { return -y * y * y + param * y; };
    } else if (drift == "logistic") {
        s.drift = [param](double y) { return param * y * (1.0 - y); };
    } else {
        throw std::invalid_argument(
            "sde_from_catalog: unknown drift '" + drift +
            "' (expected zero|linear|cubic|logistic)");
    }
    return s;
}

WienerIntegralPath wiener_integral(const IntensityFn& f, const SamplePath& Z) {
    const GridSpec& g = Z.grid;
    const auto n = static_cast<std::size_t>(g.n);
    std::vector<double> x(n + 1);
    x[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = f(g.t(static_cast<std::int64_t>(i)));
        if (!std::isfinite(fi))
            throw std::invalid_argument(
                "wiener_integral: non-finite intensity sample at node " + std::to_string(i));
        x[i + 1] = x[i] + fi * (Z.values[i + 1] - Z.values[i]);
    }
    WienerIntegralPath out;
    out.noise = Z;
    out.integrand = f;
    out.values = make_path(g, std::move(x), Provenance::solved);
    return out;
}

namespace {

// sorted interior breakpoints of fn restricted to (0, T)
std::vector<double> interior_breaks(const IntensityFn& fn, double T) {
    std::vector<double> b;
    for (double v : fn.breakpoints)
        if (v > 0.0 && v < T) b.push_back(v);
    std::sort(b.begin(), b.end());
    return b;
}

// G(u) = int_0^{u^beta} g(u - s^{1/beta}) ds with beta = 2H-1.
// Piece boundaries in s at (u - b)^beta for breakpoints b < u; the integrand
// is smooth inside each piece (d/ds s^{1/beta} vanishes at s=0).
double inner_profile(const IntensityFn& g, const std::vector<double>& breaks,
                     double u, double beta) {
    if (u <= 0.0) return 0.0;
    std::vector<double> cuts{0.0};
    for (double b : breaks)
        if (b < u) cuts.push_back(std::pow(u - b, beta));
    cuts.push_back(std::pow(u, beta));
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double lo = cuts[p], hi = cuts[p + 1];
        if (hi - lo <= 0.0) continue;
        acc += gl_integrate(
            [&](double s) { return g(std::max(0.0, u - std::pow(s, 1.0 / beta))); },
            lo, hi, 32);
    }
    return acc;
}

}  // namespace

double dh_norm(const IntensityFn& f, const IntensityFn& g, double H) {
    if (!(H > 0.5 && H < 1.0))
        throw std::invalid_argument("dh_norm: H must lie in (1/2, 1)");
    const double T = f.T;
    if (!(T > 0.0) || std::fabs(g.T - T) > 1e-12 * std::max(1.0, T))
        throw std::invalid_argument("dh_norm: f and g must share a positive domain [0,T]");
    const double beta = 2.0 * H - 1.0;

    const auto fb = interior_breaks(f, T);
    const auto gb = interior_breaks(g, T);

    // outer integrand f(u) G(u) + g(u) F(u); kinks only at declared breakpoints
    auto outer = [&](double u) {
        return f(u) * inner_profile(g, gb, u, beta) +
               g(u) * inner_profile(f, fb, u, beta);
    };
    std::vector<double> cuts;
    cuts.insert(cuts.end(), fb.begin(), fb.end());
    cuts.insert(cuts.end(), gb.begin(), gb.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return H * integrate_piecewise(outer, 0.0, T, cuts, 1e-11);
}

std::pair<double, double> beta_identity_check(double alpha, double u, double v) {
    if (!(alpha > 0.0 && alpha < 0.5))
        throw std::invalid_argument("beta_identity_check: alpha must lie in (0, 1/2)");
    if (!(u > 0.0 && v > 0.0) || u == v)
        throw std::invalid_argument("beta_identity_check: need u, v > 0 and u != v");
    const double c = std::min(u, v);
    const double d = std::max(u, v);

    // x in (0, c/2]: substitute tau = x^{1-2a}, x^{-2a} dx = dtau / (1-2a)
    const double e = 1.0 - 2.0 * alpha;
    const double i1 = gl_integrate(
                          [&](double tau) {
                              const double x = std::pow(tau, 1.0 / e);
                              return std::pow(u - x, alpha - 1.0) * std::pow(v - x, alpha - 1.0);
                          },
                          0.0, std::pow(0.5 * c, e), 64) /
                      e;

    // x in [c/2, c): substitute sigma = (c-x)^a, (c-x)^{a-1} dx = dsigma / a
    const double i2 = gl_integrate(
                          [&](double sigma) {
                              const double x = c - std::pow(sigma, 1.0 / alpha);
                              return std::pow(x, -2.0 * alpha) * std::pow(d - x, alpha - 1.0);
                          },
                          0.0, std::pow(0.5 * c, alpha), 64) /
                      alpha;

    const double lhs = std::pow(u * v, alpha) * (i1 + i2);
    const double rhs = std::exp(log_beta(alpha, 1.0 - 2.0 * alpha)) *
                       std::pow(std::fabs(u - v), 2.0 * alpha - 1.0);
    return {lhs, rhs};
}

SamplePath solve_sde(const SdeSpec& spec, const SamplePath& Z) {
    if (!spec.locally_lipschitz || !spec.lyapunov)
        throw std::invalid_argument(
            "solve_sde: drift attestation flags (locally_lipschitz, lyapunov) must both be set");
    if (!spec.drift) throw std::invalid_argument("solve_sde: missing drift function");
    const GridSpec& g = Z.grid;
    const double delta = g.delta();
    const auto n = static_cast<std::size_t>(g.n);
    std::vector<double> y(n + 1);
    y[0] = spec.y0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = g.t(static_cast<std::int64_t>(i));
        y[i + 1] = y[i] + spec.drift(y[i]) * delta +
                   spec.intensity(t) * (Z.values[i + 1] - Z.values[i]);
        if (!(std::fabs(y[i + 1]) <= 1e12))
            throw std::runtime_error("solve_sde: trajectory blow-up at step " +
                                     std::to_string(i + 1) + " (|Y| > 1e12)");
    }
    return make_path(g, std::move(y), Provenance::solved);
}

double holder_estimate(const SamplePath& path) {
    const auto n = static_cast<std::size_t>(path.grid.n);
    if (n < 16) throw std::invalid_argument("holder_estimate: need at least 16 steps");
    std::vector<double> lx, ly;
    for (std::size_t lag = 1; lag * 8 <= n; lag *= 2) {
        double m = 0.0;
        for (std::size_t i = 0; i + lag <= n; ++i)
            m = std::max(m, std::fabs(path.values[i + lag] - path.values[i]));
        if (m == 0.0) return std::numeric_limits<double>::infinity();
        lx.push_back(std::log(static_cast<double>(lag) * path.grid.delta()));
        ly.push_back(std::log(m));
    }
    const auto k = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace hermite
