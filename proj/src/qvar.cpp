#include "hermite/qvar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "hermite/hermite_sim.hpp"
#include "hermite/quadrature.hpp"

namespace hermite {

namespace {

// map x to its grid node index, rejecting off-node values
std::int64_t node_index(const GridSpec& g, double x, const char* what) {
    const double delta = g.delta();
    const auto i = static_cast<std::int64_t>(std::llround(x / delta));
    if (i < 0 || i > g.n || std::fabs(x - static_cast<double>(i) * delta) > 1e-9 * std::max(g.T, 1.0))
        throw std::invalid_argument(std::string("qv: ") + what + " is not a grid node");
    return i;
}

// Neumaier-compensated sum of squared increments over node indices [lo, hi)
double sq_increment_sum(const SamplePath& p, std::int64_t lo, std::int64_t hi) {
    double sum = 0.0, comp = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double d = p.values[k + 1] - p.values[k];
        const double term = d * d;
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

// order-independent deterministic reduction for MC accumulators
double pairwise_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::size_t m = v.size();
    while (m > 1) {
        const std::size_t half = m / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (m % 2) v[half] = v[m - 1];
        m = half + m % 2;
    }
    return v[0];
}

}  // namespace

double qv(const SamplePath& path, double s, double t) {
    if (s > t) throw std::invalid_argument("qv: need s <= t");
    const std::int64_t lo = node_index(path.grid, s, "s");
    const std::int64_t hi = node_index(path.grid, t, "t");
    return sq_increment_sum(path, lo, hi);
}

QVReport qv_report(const SamplePath& path, double H) {
    const GridSpec& g = path.grid;
    QVReport rep;
    rep.grid = g;
    rep.H = H;
    const double norm = std::pow(g.delta(), 1.0 - 2.0 * H);
    const std::int64_t per = g.n / g.Kn;
    rep.block_raw.reserve(static_cast<std::size_t>(g.Kn));
    for (std::int64_t j = 0; j < g.Kn; ++j) {
        const double b = sq_increment_sum(path, j * per, (j + 1) * per);
        rep.block_raw.push_back(b);
        rep.block_normalized.push_back(norm * b);
        rep.global_raw += b;  // exact tiling: global is the sum of block values
    }
    rep.global_normalized = norm * rep.global_raw;
    return rep;
}

void write_qv_csv(const QVReport& rep, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_qv_csv: cannot open " + file);
    out << "block_index,T_left,T_right,qv_raw,qv_normalized\n" << std::setprecision(17);
    for (std::size_t j = 0; j < rep.block_raw.size(); ++j) {
        out << j << ',' << rep.grid.Tj(static_cast<std::int64_t>(j)) << ','
            << rep.grid.Tj(static_cast<std::int64_t>(j) + 1) << ',' << rep.block_raw[j] << ','
            << rep.block_normalized[j] << '\n';
    }
    if (!out) throw std::runtime_error("write_qv_csv: write failed on " + file);
}

double intensity_l2sq(const IntensityFn& f, double a, double b) {
    std::vector<double> cuts;
    for (double v : f.breakpoints)
        if (v > a && v < b) cuts.push_back(v);
    std::sort(cuts.begin(), cuts.end());
    return integrate_piecewise([&](double t) { const double v = f(t); return v * v; }, a, b,
                               cuts, 1e-11);
}

double weighted_qv_error(const WienerIntegralPath& path, const GridSpec& grid, double H) {
    const GridSpec& pg = path.values.grid;
    if (grid.n != pg.n || std::fabs(grid.T - pg.T) > 1e-12 * std::max(1.0, pg.T))
        throw std::invalid_argument("weighted_qv_error: grid does not match the path's mesh");
    const double norm = std::pow(grid.delta(), 1.0 - 2.0 * H);
    const std::int64_t per = grid.n / grid.Kn;
    double acc = 0.0;
    for (std::int64_t j = 0; j < grid.Kn; ++j) {
        const double block = norm * sq_increment_sum(path.values, j * per, (j + 1) * per);
        acc += std::fabs(block - intensity_l2sq(path.integrand, grid.Tj(j), grid.Tj(j + 1)));
    }
    return acc;
}

double qv_error(const WienerIntegralPath& path, double H) {
    const GridSpec& g = path.values.grid;
    return std::pow(g.delta(), 1.0 - 2.0 * H) * sq_increment_sum(path.values, 0, g.n) -
           intensity_l2sq(path.integrand, 0.0, g.T);
}

double qv_moment_bound_check(const IntensityFn& f, const HermiteParams& params,
                             const GridSpec& grid, int seeds, RngSeed base) {
    if (seeds < 100) throw std::invalid_argument("qv_moment_bound_check: need seeds >= 100");
    HermitePathRequest req;
    req.params = params;
    req.grid = grid;
    req.M = 8;
    std::vector<double> vals(static_cast<std::size_t>(seeds));
    for (int r = 0; r < seeds; ++r) {
        req.seed = RngSeed{base.seed + static_cast<std::uint64_t>(r), base.stream};
        const auto Z = simulate_hermite(req);
        const auto X = wiener_integral(f, Z);
        vals[static_cast<std::size_t>(r)] = sq_increment_sum(X.values, 0, grid.n);
    }
    const double mean = pairwise_sum(std::move(vals)) / seeds;
    const double bound = std::pow(grid.delta(), 2.0 * params.H - 1.0) * intensity_l2sq(f, 0.0, grid.T);
    return mean / bound;
}

}  // namespace hermite
