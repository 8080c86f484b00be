#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hermite/fgn.hpp"
#include "hermite/hermite_sim.hpp"

using namespace hermite;

TEST_CASE("Hermite polynomials") {
    CHECK(hermite_poly(0, 1.7) == doctest::Approx(1.0));
    CHECK(hermite_poly(1, 1.7) == doctest::Approx(1.7));
    for (double x : {-2.0, -0.3, 0.0, 1.1, 2.5}) {
        CHECK(hermite_poly(2, x) == doctest::Approx(x * x - 1.0).epsilon(1e-14));
        CHECK(hermite_poly(3, x) == doctest::Approx(x * x * x - 3.0 * x).epsilon(1e-13));
        CHECK(hermite_poly(4, x) ==
              doctest::Approx(x * x * x * x - 6.0 * x * x + 3.0).epsilon(1e-13));
    }
}

TEST_CASE("closed-form covariance") {
    CHECK(hermite_covariance(1.0, 1.0, 0.8) == doctest::Approx(1.0));
    CHECK(hermite_covariance(0.0, 0.7, 0.8) == doctest::Approx(0.0));
    CHECK(hermite_covariance(0.5, 1.0, 0.7) == doctest::Approx(0.5));  // s^2H terms cancel
}

TEST_CASE("q=1 equals the fGn partial-sum path exactly") {
    const double H = 0.72;
    const int n = 64, M = 4;
    HermitePathRequest req;
    req.params = derive_params(H, 1);
    req.grid = make_grid(1.0, n, 1);
    req.M = M;
    req.seed = RngSeed{5, 3};
    auto Z = simulate_hermite(req);

    auto x = fgn_sample(H, static_cast<std::size_t>(n) * M, RngSeed{5, 3});
    const double scale = 1.0 / std::pow(static_cast<double>(n) * M, H);
    double acc = 0.0;
    CHECK(Z.values[0] == 0.0);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < M; ++k) acc += x[static_cast<std::size_t>(i) * M + k];
        CHECK(Z.values[static_cast<std::size_t>(i) + 1] == doctest::Approx(acc * scale).epsilon(1e-13));
    }
}

TEST_CASE("determinism and warning channel") {
    HermitePathRequest req;
    req.params = derive_params(0.7, 2);
    req.grid = make_grid(1.0, 128, 1);
    req.M = 4;
    req.seed = RngSeed{11, 0};
    std::vector<std::string> w1, w2;
    auto a = simulate_hermite(req, &w1);
    auto b = simulate_hermite(req, &w2);
    CHECK(a.values == b.values);  // bit identical
    CHECK_FALSE(w1.empty());      // M < 8 at q >= 2 warns
    req.M = 8;
    std::vector<std::string> w3;
    simulate_hermite(req, &w3);
    CHECK(w3.empty());
}

// One pass of 5000 paths at q=2, H=0.7, n=2^10, M=16 feeds the marginal-law
// checks: variance, covariance, self-similarity, stationary increments, skew.
TEST_CASE("q=2 marginal law (MC)") {
    const double H = 0.7;
    const int n = 1 << 10, R = 5000;
    HermitePathRequest req;
    req.params = derive_params(H, 2);
    req.grid = make_grid(1.0, n, 1);
    req.M = 16;
    std::vector<double> z1;
    z1.reserve(R);
    double c = 0, v25 = 0, v5 = 0, v1 = 0, w1 = 0, w2 = 0, w3 = 0;
    for (int r = 0; r < R; ++r) {
        req.seed = RngSeed{1000 + static_cast<std::uint64_t>(r), 0};
        const auto Z = simulate_hermite(req);
        const auto& v = Z.values;
        z1.push_back(v[n]);
        c += v[n / 2] * v[n];
        v25 += v[n / 4] * v[n / 4];
        v5 += v[n / 2] * v[n / 2];
        v1 += v[n] * v[n];
        w1 += (v[n / 4] - v[0]) * (v[n / 4] - v[0]);
        w2 += (v[n / 2] - v[n / 4]) * (v[n / 2] - v[n / 4]);
        w3 += (v[n] - v[3 * n / 4]) * (v[n] - v[3 * n / 4]);
    }
    CHECK(v1 / R == doctest::Approx(1.0).epsilon(0.05));
    CHECK(c / R == doctest::Approx(0.5).scale(1.0).epsilon(0.06));  // +-0.03 absolute

    // self-similarity: Var(Z_t)/t^{2H} flat in t
    CHECK(v25 / R / std::pow(0.25, 2 * H) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(v5 / R / std::pow(0.5, 2 * H) == doctest::Approx(1.0).epsilon(0.05));

    // stationary increments: three disjoint windows of width 0.25 agree
    const double mean_w = (w1 + w2 + w3) / (3.0 * R);
    for (double w : {w1 / R, w2 / R, w3 / R})
        CHECK(w / mean_w == doctest::Approx(1.0).epsilon(0.12));

    // chaos parity: the q=2 marginal is positively skewed, far beyond MC noise
    double m = 0, s2 = 0, s3 = 0;
    for (double x : z1) m += x;
    m /= R;
    for (double x : z1) {
        s2 += (x - m) * (x - m);
        s3 += (x - m) * (x - m) * (x - m);
    }
    const double skew = (s3 / R) / std::pow(s2 / R, 1.5);
    CHECK(skew > 1.0);  // measured ~2.1; se(skew) ~ 0.03 here
}

TEST_CASE("kernel matrices: structure and exact second moment") {
    // Deterministic oracle fidelity: the variance of the discretized chaos
    // integral is computable from the kernel matrices alone and must sit just
    // below the exact t^{2H} (Galerkin projections only lose variance).
    SUBCASE("q=1") {
        auto& km = kernel_matrices(derive_params(0.75, 1), make_grid(1.0, 16, 1), 16);
        REQUIRE(km.q == 1);
        REQUIRE(km.at_node.size() == 17);
        const bool node0_silent = km.at_node[0].empty() ||
                                  *std::max_element(km.at_node[0].begin(), km.at_node[0].end()) == 0.0;
        CHECK(node0_silent);
        for (int node : {8, 16}) {
            double s2 = 0.0;
            const auto& row = km.at_node[static_cast<std::size_t>(node)];
            for (std::size_t i = 0; i < row.size(); ++i) s2 += row[i] * row[i] * km.widths[i];
            const double target = std::pow(node / 16.0, 1.5);
            CHECK(s2 / target > 0.98);
            CHECK(s2 / target < 1.005);
        }
    }
    SUBCASE("q=2") {
        auto& km = kernel_matrices(derive_params(0.7, 2), make_grid(1.0, 16, 1), 16);
        REQUIRE(km.q == 2);
        const std::size_t NC = km.widths.size();
        for (int node : {8, 16}) {
            const auto& A = km.at_node[static_cast<std::size_t>(node)];
            REQUIRE(A.size() == NC * NC);
            double s2 = 0.0;
            for (std::size_t i = 0; i < NC; ++i)
                for (std::size_t j = 0; j < NC; ++j)
                    s2 += 2.0 * A[i * NC + j] * A[i * NC + j] * km.widths[i] * km.widths[j];
            const double target = std::pow(node / 16.0, 1.4);
            CHECK(s2 / target > 0.94);
            CHECK(s2 / target < 1.005);
            // symmetry
            CHECK(A[3 * NC + 7] == doctest::Approx(A[7 * NC + 3]).epsilon(1e-13));
        }
        // entries vanish outside (0, t): cells beyond node 8 contribute nothing at t = 0.5
        const auto& A8 = km.at_node[8];
        double tail = 0.0;
        for (std::size_t i = 0; i < NC; ++i)
            for (std::size_t j = 0; j < NC; ++j)
                if (km.midpoints[i] > 0.5 || km.midpoints[j] > 0.5) tail += std::fabs(A8[i * NC + j]);
        CHECK(tail == 0.0);
    }
}

TEST_CASE("kernel oracle validation gates") {
    HermitePathRequest req;
    req.params = derive_params(0.7, 3);
    req.grid = make_grid(1.0, 16, 1);
    req.M = 16;
    req.method = SimMethod::kernel_oracle;
    CHECK_THROWS_AS(simulate_hermite(req), std::invalid_argument);  // q <= 2 only

    req.params = derive_params(0.7, 2);
    req.grid = make_grid(1.0, 128, 1);
    req.M = 8;  // n*M = 1024 > 512
    CHECK_THROWS_AS(simulate_hermite(req), std::invalid_argument);
}

TEST_CASE("oracle path starts at zero and is deterministic") {
    HermitePathRequest req;
    req.params = derive_params(0.7, 2);
    req.grid = make_grid(1.0, 16, 1);
    req.M = 8;
    req.seed = RngSeed{77, 0};
    req.method = SimMethod::kernel_oracle;
    auto a = simulate_hermite(req);
    auto b = simulate_hermite(req);
    CHECK(a.values[0] == 0.0);
    CHECK(a.values == b.values);
}

TEST_CASE("law agreement between generator and oracle (KS, q=2)") {
    const int R = 1000;
    HermitePathRequest rq;
    rq.params = derive_params(0.7, 2);
    rq.grid = make_grid(1.0, 16, 1);
    rq.M = 16;
    std::vector<double> a(R), b(R);
    for (int r = 0; r < R; ++r) {
        rq.method = SimMethod::hermite_rank;
        rq.seed = RngSeed{4000 + static_cast<std::uint64_t>(r), 0};
        a[static_cast<std::size_t>(r)] = simulate_hermite(rq).values.back();
        rq.method = SimMethod::kernel_oracle;
        rq.seed = RngSeed{9000 + static_cast<std::uint64_t>(r), 1};
        b[static_cast<std::size_t>(r)] = simulate_hermite(rq).values.back();
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        ks = std::max(ks, std::fabs(static_cast<double>(i) / R - static_cast<double>(j) / R));
    }
    CHECK(ks < 0.08);
}
