#include "hermite/fgn.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace hermite {

namespace {

std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

// ---------------- FFTW plumbing ----------------
// One in-place c2c forward plan per transform size, planned on aligned scratch
// and executed on per-call aligned buffers (new-array execution). All plan
// creation/destruction is serialized; execution is thread-safe.

struct FftwBuf {
    fftw_complex* p = nullptr;
    explicit FftwBuf(std::size_t n) { p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)); }
    ~FftwBuf() { fftw_free(p); }
    FftwBuf(const FftwBuf&) = delete;
    FftwBuf& operator=(const FftwBuf&) = delete;
};

std::mutex plan_mutex;
std::map<std::size_t, fftw_plan> plan_cache;

fftw_plan forward_plan(std::size_t L) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plan_cache.find(L);
    if (it != plan_cache.end()) return it->second;
    FftwBuf scratch(L);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(L), scratch.p, scratch.p, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw plan creation failed at L=" + std::to_string(L));
    plan_cache.emplace(L, plan);
    return plan;
}

// ---------------- embedding spectra ----------------

std::mutex eig_mutex;
std::map<std::string, std::shared_ptr<const std::vector<double>>> eig_cache;

// Eigenvalues of the circulant embedding of r at size L (first row
// c_j = r(min(j, L-j))). Returns empty pointer if the spectrum dips below
// -tol * max (caller doubles and retries).
std::shared_ptr<const std::vector<double>> try_spectrum(const AcvSpec& spec, std::size_t L) {
    FftwBuf buf(L);
    for (std::size_t j = 0; j < L; ++j) {
        const std::uint64_t k = static_cast<std::uint64_t>(std::min(j, L - j));
        buf.p[j][0] = spec.r(k);
        buf.p[j][1] = 0.0;
    }
    fftw_execute_dft(forward_plan(L), buf.p, buf.p);
    auto eigs = std::make_shared<std::vector<double>>(L);
    double mx = 0.0, mn = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
        const double v = buf.p[j][0];
        (*eigs)[j] = v;
        mx = std::max(mx, v);
        mn = std::min(mn, v);
    }
    if (mn < -1e-10 * mx) return nullptr;
    for (double& v : *eigs) v = std::max(v, 0.0);
    return eigs;
}

std::shared_ptr<const std::vector<double>> embedding_spectrum(const AcvSpec& spec, std::size_t m) {
    const std::size_t L0 = next_pow2(2 * (m - 1));
    {
        std::lock_guard<std::mutex> lock(eig_mutex);
        auto it = eig_cache.find(spec.key + "@" + std::to_string(L0));
        if (it != eig_cache.end()) return it->second;
    }
    std::size_t L = L0;
    for (int doubling = 0; doubling <= 3; ++doubling, L *= 2) {
        auto eigs = try_spectrum(spec, L);
        if (eigs) {
            std::lock_guard<std::mutex> lock(eig_mutex);
            eig_cache.emplace(spec.key + "@" + std::to_string(L0), eigs);
            return eigs;
        }
    }
    throw std::runtime_error("circulant embedding of '" + spec.label + "' is not nonnegative-definite up to size " +
                             std::to_string(L / 2) + "; autocovariance is not a valid stationary model at this size");
}

}  // namespace

// ---------------- autocovariances ----------------

double fgn_acv_value(double H, std::uint64_t k) {
    const double a = 2.0 * H;
    if (k == 0) return 1.0;
    if (k < 4) {
        const double kd = static_cast<double>(k);
        return 0.5 * (std::pow(kd + 1.0, a) - 2.0 * std::pow(kd, a) + std::pow(kd - 1.0, a));
    }
    // rho(k) = k^2H * sum_{j>=1} C(2H,2j) k^{-2j}; 12 terms reach ~1e-15 rel. at k=4
    const double kd = static_cast<double>(k);
    const double k2inv = 1.0 / (kd * kd);
    double cam = 1.0;   // running binomial C(a, 2j)
    double kp = 1.0;    // running k^{-2j}
    double acc = 0.0;
    for (int j = 1; j <= 12; ++j) {
        cam *= (a - (2.0 * j - 2.0)) / (2.0 * j - 1.0);
        cam *= (a - (2.0 * j - 1.0)) / (2.0 * j);
        kp *= k2inv;
        acc += cam * kp;
    }
    return std::pow(kd, a) * acc;
}

AcvSpec fgn_acv(double H) {
    if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("fgn_acv: H must lie in (1/2,1)");
    AcvSpec s;
    s.r = [H](std::uint64_t k) { return fgn_acv_value(H, k); };
    s.label = "fGn(H=" + std::to_string(H) + ")";
    s.key = "fgn:" + std::to_string(H);
    return s;
}

AcvSpec fgn_root_acv(double H, int q) {
    if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("fgn_root_acv: H must lie in (1/2,1)");
    if (q < 1) throw std::invalid_argument("fgn_root_acv: q must be >= 1");
    if (q == 1) return fgn_acv(H);
    const double inv_q = 1.0 / static_cast<double>(q);
    AcvSpec s;
    s.r = [H, inv_q](std::uint64_t k) { return std::pow(fgn_acv_value(H, k), inv_q); };
    s.label = "fGn(H=" + std::to_string(H) + ")^(1/" + std::to_string(q) + ")";
    s.key = "fgnroot:" + std::to_string(H) + ":" + std::to_string(q);
    return s;
}

// ---------------- sampling ----------------

std::vector<double> stationary_gaussian_sample(const AcvSpec& spec, std::size_t m, RngSeed seed) {
    if (m == 0) return {};
    std::mt19937_64 eng = make_engine(seed);
    if (m == 1) return {std_normal(eng)};

    auto eigs = embedding_spectrum(spec, m);
    const std::size_t L = eigs->size();

    FftwBuf buf(L);
    const double invL = 1.0 / static_cast<double>(L);
    for (std::size_t j = 0; j < L; ++j) {
        const double s = std::sqrt((*eigs)[j] * invL);
        buf.p[j][0] = s * std_normal(eng);
        buf.p[j][1] = s * std_normal(eng);
    }
    fftw_execute_dft(forward_plan(L), buf.p, buf.p);

    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) out[k] = buf.p[k][0];
    return out;
}

std::vector<double> fgn_sample(double H, std::size_t m, RngSeed seed) {
    if (m < 2) throw std::invalid_argument("fgn_sample: m must be >= 2");
    return stationary_gaussian_sample(fgn_acv(H), m, seed);
}

void clear_embedding_cache() {
    std::lock_guard<std::mutex> lock(eig_mutex);
    eig_cache.clear();
}

}  // namespace hermite
