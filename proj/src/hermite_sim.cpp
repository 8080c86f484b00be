#include "hermite/hermite_sim.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "hermite/fgn.hpp"
#include "hermite/quadrature.hpp"

namespace hermite {

namespace {

double factorial(int q) {
    double f = 1.0;
    for (int i = 2; i <= q; ++i) f *= i;
    return f;
}

std::string cache_key(const HermiteParams& p, const GridSpec& g, int M) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.17g:%d:%lld:%d:%.17g", p.H, p.q, static_cast<long long>(g.n), M, g.T);
    return buf;
}

std::mutex kernel_mutex;
std::map<std::string, std::unique_ptr<const KernelMatrix>> kernel_cache;

template <class F>
double midpoint(const F& g, double lo, double hi, int P) {
    const double w = (hi - lo) / P;
    double s = 0.0;
    for (int p = 0; p < P; ++p) s += g(lo + (p + 0.5) * w);
    return s * w;
}

// Running values of int_0^{(t_k - w)^a} g(s) ds across output nodes k (0 where
// t_k <= w). g is the u-integrand after the substitution s = (u-w)^a, which
// removes the (u-w)^{a-1} endpoint singularity. 'layer' > 0 marks a boundary
// layer of that width in s just above 0 (near-diagonal pairs, where the second
// singular factor varies on the scale (y-x)^a); the first cell is then split
// so the midpoint panels resolve it.
template <class F>
void prefix_u_integral(const F& g, const GridSpec& grid, double w, double a, double layer, int P,
                       std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(grid.n) + 1, 0.0);
    double acc = 0.0, sig_lo = 0.0;
    bool first = true;
    for (std::int64_t k = 1; k <= grid.n; ++k) {
        const double tk = grid.t(k);
        if (tk <= w) continue;
        const double sig_hi = std::pow(tk - w, a);
        if (first && layer > 0.0 && layer < 0.5 * (sig_hi - sig_lo)) {
            acc += midpoint(g, sig_lo, sig_lo + layer, 12);
            acc += midpoint(g, sig_lo + layer, sig_hi, std::max(P, 12));
        } else {
            acc += midpoint(g, sig_lo, sig_hi, first ? std::max(P, 12) : P);
        }
        first = false;
        out[static_cast<std::size_t>(k)] = acc;
        sig_lo = sig_hi;
    }
}

// Wiener cells: the n*M uniform fine cells, with the first one subdivided
// geometrically (halving) until the L^2 kernel mass below the smallest edge,
// which scales like x_min^{1-2a}, is negligible. Piecewise constants on the
// geometric stack track the x^{-a} kernel edge to ~1%.
std::vector<double> cell_edges(double T, std::size_t NM, double a) {
    const double h = T / static_cast<double>(NM);
    int K = 96;
    const double e = 1.0 - 2.0 * a;
    if (e > 1e-3) {
        const double x_min = std::pow(1e-3, 1.0 / e) * T;  // mass below x_min < ~1e-3 of total
        if (x_min > 0.0 && std::isfinite(x_min))
            K = std::clamp(static_cast<int>(std::ceil(std::log2(h / x_min))), 0, 96);
    }
    std::vector<double> edges;
    edges.reserve(NM + K + 1);
    edges.push_back(0.0);
    for (int k = K; k >= 1; --k) edges.push_back(h * std::ldexp(1.0, -k));
    for (std::size_t j = 1; j <= NM; ++j) edges.push_back(h * static_cast<double>(j));
    return edges;
}

// Galerkin build: entries are kernel averages over Wiener cells (q=1) or cell
// pairs (q=2), not point samples. Point sampling loses the near-diagonal kernel
// mass L ~ |y-x|^{2a-1}, biasing the oracle variance low by O(h^{4a-1}); cell
// averages keep most of it, and the i=j cell averages (finite although the
// pointwise diagonal diverges) carry the rest via the compensated squares.
KernelMatrix build_kernel(const HermiteParams& p, const GridSpec& g, int M) {
    const std::size_t NM = static_cast<std::size_t>(g.n) * static_cast<std::size_t>(M);
    const double T = g.T;
    const double a = p.Hp - 0.5;
    const double inv_a = 1.0 / a;
    const double scale = p.c_Hq / a;  // c_Hq times the substitution Jacobian 1/a
    const int P = static_cast<int>(std::clamp<std::int64_t>(256 / g.n, 4, 16));

    const std::vector<double> edges = cell_edges(T, NM, a);
    const std::size_t NC = edges.size() - 1;

    KernelMatrix km;
    km.q = p.q;
    km.midpoints.resize(NC);
    km.widths.resize(NC);
    for (std::size_t i = 0; i < NC; ++i) {
        km.midpoints[i] = 0.5 * (edges[i] + edges[i + 1]);
        km.widths[i] = edges[i + 1] - edges[i];
    }
    km.at_node.assign(static_cast<std::size_t>(g.n) + 1, std::vector<double>(p.q == 1 ? NC : NC * NC, 0.0));

    const GaussLegendre& gl3 = gauss_legendre(3);
    const std::size_t nn = static_cast<std::size_t>(g.n);
    std::vector<double> pre;

    if (p.q == 1) {
        for (std::size_t i = 0; i < NC; ++i) {
            for (int px = 0; px < 3; ++px) {
                const double x = edges[i] + 0.5 * km.widths[i] * (gl3.nodes[px] + 1.0);
                const double wt = 0.5 * gl3.weights[px];  // weights normalized to sum 1
                prefix_u_integral([&](double sig) { return std::pow((x + std::pow(sig, inv_a)) / x, a); },
                                  g, x, a, 0.0, P, pre);
                for (std::size_t k = 1; k <= nn; ++k) km.at_node[k][i] += wt * scale * pre[k];
            }
        }
        return km;
    }

    // q = 2, off-diagonal cell pairs (i < j, so x < y and the u-integral starts at y)
    for (std::size_t i = 0; i + 1 < NC; ++i) {
        for (std::size_t j = i + 1; j < NC; ++j) {
            for (int px = 0; px < 3; ++px) {
                const double x = edges[i] + 0.5 * km.widths[i] * (gl3.nodes[px] + 1.0);
                for (int py = 0; py < 3; ++py) {
                    const double y = edges[j] + 0.5 * km.widths[j] * (gl3.nodes[py] + 1.0);
                    const double wt = 0.25 * gl3.weights[px] * gl3.weights[py];
                    const double layer = (j == i + 1) ? 4.0 * std::pow(y - x, a) : 0.0;
                    prefix_u_integral(
                        [&](double sig) {
                            const double u = y + std::pow(sig, inv_a);
                            return std::pow(u * u / (x * y), a) * std::pow(u - x, a - 1.0);
                        },
                        g, y, a, layer, P, pre);
                    for (std::size_t k = 1; k <= nn; ++k) km.at_node[k][i * NC + j] += wt * scale * pre[k];
                }
            }
            for (std::size_t k = 1; k <= nn; ++k) km.at_node[k][j * NC + i] = km.at_node[k][i * NC + j];
        }
    }

    // q = 2, diagonal cells: (1/w^2) int_{cell^2} L = (2/w^2) int_0^w (w-eps) avg_x L(x, x+eps) deps.
    // L ~ eps^{2a-1} as eps -> 0, so integrate in tau = eps^{2a} where the integrand is bounded.
    const GaussLegendre& gl8 = gauss_legendre(8);
    const GaussLegendre& gl2 = gauss_legendre(2);
    for (std::size_t i = 0; i < NC; ++i) {
        const double w = km.widths[i];
        const double tau_hi = std::pow(w, 2.0 * a);
        for (int pt = 0; pt < 8; ++pt) {
            const double tau = 0.5 * tau_hi * (gl8.nodes[pt] + 1.0);
            const double w_tau = 0.5 * tau_hi * gl8.weights[pt];
            const double eps = std::pow(tau, 0.5 * inv_a);
            const double jac = std::pow(eps, 1.0 - 2.0 * a) * 0.5 * inv_a;  // deps = jac * dtau
            for (int px = 0; px < 2; ++px) {
                const double x = edges[i] + 0.5 * (w - eps) * (gl2.nodes[px] + 1.0);
                const double y = x + eps;
                const double w_all = w_tau * jac * 0.5 * gl2.weights[px] * 2.0 * (w - eps) / (w * w);
                prefix_u_integral(
                    [&](double sig) {
                        const double u = y + std::pow(sig, inv_a);
                        return std::pow(u * u / (x * y), a) * std::pow(u - x, a - 1.0);
                    },
                    g, y, a, 4.0 * std::pow(eps, a), P, pre);
                for (std::size_t k = 1; k <= nn; ++k) km.at_node[k][i * NC + i] += w_all * scale * pre[k];
            }
        }
    }
    return km;
}

}  // namespace

double hermite_poly(int q, double x) {
    if (q < 0) throw std::invalid_argument("hermite_poly: q must be >= 0");
    if (q == 0) return 1.0;
    double hm = 1.0, hc = x;
    for (int k = 1; k < q; ++k) {
        const double hn = x * hc - k * hm;
        hm = hc;
        hc = hn;
    }
    return hc;
}

double hermite_covariance(double s, double t, double H) {
    const double a = 2.0 * H;
    return 0.5 * (std::pow(s, a) + std::pow(t, a) - std::pow(std::abs(t - s), a));
}

const KernelMatrix& kernel_matrices(const HermiteParams& params, const GridSpec& grid, int M) {
    if (params.q > 2) throw std::invalid_argument("kernel_matrices: only q <= 2 supported");
    if (M < 1) throw std::invalid_argument("kernel_matrices: M must be >= 1");
    if (grid.n * M > 512)
        throw std::invalid_argument("kernel_matrices: n*M > 512 rejected, cost is O((nM)^(q+1))");
    const std::string key = cache_key(params, grid, M);
    std::lock_guard<std::mutex> lock(kernel_mutex);
    auto it = kernel_cache.find(key);
    if (it == kernel_cache.end())
        it = kernel_cache.emplace(key, std::make_unique<const KernelMatrix>(build_kernel(params, grid, M))).first;
    return *it->second;
}

SamplePath kernel_oracle_path(const HermitePathRequest& req) {
    const KernelMatrix& km = kernel_matrices(req.params, req.grid, req.M);
    const std::size_t NC = km.midpoints.size();

    std::mt19937_64 eng = make_engine(req.seed);
    std::vector<double> dW(NC);
    for (std::size_t i = 0; i < NC; ++i) dW[i] = std::sqrt(km.widths[i]) * std_normal(eng);

    std::vector<double> z(static_cast<std::size_t>(req.grid.n) + 1, 0.0);
    for (std::size_t k = 1; k <= static_cast<std::size_t>(req.grid.n); ++k) {
        const std::vector<double>& A = km.at_node[k];
        double acc = 0.0;
        if (req.params.q == 1) {
            for (std::size_t i = 0; i < NC; ++i) acc += A[i] * dW[i];
        } else {
            // I2 of the projected kernel: full quadratic form minus the weighted trace,
            // so diagonal cells enter through their compensated squares dW_i^2 - w_i.
            double wtrace = 0.0;
            for (std::size_t i = 0; i < NC; ++i) {
                const double* row = A.data() + i * NC;
                double si = 0.0;
                for (std::size_t j = 0; j < NC; ++j) si += row[j] * dW[j];
                acc += dW[i] * si;
                wtrace += row[i] * km.widths[i];
            }
            acc -= wtrace;
        }
        z[k] = acc;
    }
    return make_path(req.grid, std::move(z), Provenance::simulated);
}

SamplePath simulate_hermite(const HermitePathRequest& req, std::vector<std::string>* warnings) {
    if (req.method == SimMethod::kernel_oracle) return kernel_oracle_path(req);
    if (req.M < 1) throw std::invalid_argument("simulate_hermite: M must be >= 1");
    const std::size_t n = static_cast<std::size_t>(req.grid.n);
    const std::size_t N = n * static_cast<std::size_t>(req.M);
    const int q = req.params.q;

    if (q >= 2 && req.M < 8 && warnings)
        warnings->push_back("simulate_hermite: M=" + std::to_string(req.M) +
                            " < 8; oversampling this small degrades the q>=2 marginal law");

    std::vector<double> x = stationary_gaussian_sample(fgn_root_acv(req.params.H, q), N, req.seed);
    if (q > 1)
        for (double& v : x) v = hermite_poly(q, v);

    const double scale = std::pow(req.grid.T, req.params.H) /
                         std::sqrt(factorial(q) * std::pow(static_cast<double>(N), 2.0 * req.params.H));
    std::vector<double> z(n + 1);
    z[0] = 0.0;
    double s = 0.0;
    std::size_t i = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t stop = k * static_cast<std::size_t>(req.M);
        for (; i < stop; ++i) s += x[i];
        z[k] = scale * s;
    }
    return make_path(req.grid, std::move(z), Provenance::simulated);
}

void clear_kernel_cache() {
    std::lock_guard<std::mutex> lock(kernel_mutex);
    kernel_cache.clear();
}

}  // namespace hermite
