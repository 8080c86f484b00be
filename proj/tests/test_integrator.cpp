#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hermite/hermite_sim.hpp"
#include "hermite/integrator.hpp"

using namespace hermite;

TEST_CASE("beta identity") {
    for (double alpha : {0.1, 0.25, 0.4}) {
        auto [lhs, rhs] = beta_identity_check(alpha, 0.3, 1.7);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
    auto [lhs, rhs] = beta_identity_check(0.35, 2.0, 0.5);  // u > v branch
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));

    CHECK_THROWS_AS(beta_identity_check(0.5, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_identity_check(0.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_identity_check(0.3, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(beta_identity_check(0.3, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("dh_norm closed forms") {
    // constant c on [0,T]: <f,f> = c^2 T^{2H}
    for (double H : {0.6, 0.75, 0.9}) {
        auto f = constant_intensity(2.0, 1.5);
        CHECK(dh_norm(f, f, H) == doctest::Approx(4.0 * std::pow(1.5, 2.0 * H)).epsilon(1e-9));
    }
    // linear t on [0,1]: iterated Beta integrals give 1/(2H+2)
    {
        auto f = linear_intensity(1.0, 1.0);
        for (double H : {0.65, 0.8})
            CHECK(dh_norm(f, f, H) == doctest::Approx(1.0 / (2.0 * H + 2.0)).epsilon(1e-9));
    }
    // two-level step: rectangle sums of the |u-v|^{2H-2} antiderivative
    {
        const double H = 0.8;
        auto f = step_intensity(0.5, 2.0, 0.4, 1.0);
        auto phi = [&](double x) {
            return std::pow(std::fabs(x), 2.0 * H) / (2.0 * H * (2.0 * H - 1.0));
        };
        auto rect = [&](double a1, double b1, double a2, double b2) {
            return phi(b1 - a2) + phi(a1 - b2) - phi(a1 - a2) - phi(b1 - b2);
        };
        const double II = 0.25 * rect(0, .4, 0, .4) + 4.0 * rect(.4, 1, .4, 1) +
                          2.0 * rect(0, .4, .4, 1);
        CHECK(dh_norm(f, f, H) == doctest::Approx(H * (2.0 * H - 1.0) * II).epsilon(1e-9));
    }
}

TEST_CASE("dh_norm symmetry and bilinearity") {
    auto f = step_intensity(1.0, 3.0, 0.3, 1.0);
    auto g = linear_intensity(2.0, 1.0);
    const double H = 0.7;
    CHECK(dh_norm(f, g, H) == doctest::Approx(dh_norm(g, f, H)).epsilon(1e-12));

    auto f2 = step_intensity(2.0, 6.0, 0.3, 1.0);
    CHECK(dh_norm(f2, g, H) == doctest::Approx(2.0 * dh_norm(f, g, H)).epsilon(1e-9));

    CHECK_THROWS_AS(dh_norm(f, f, 0.4), std::invalid_argument);
    auto h = constant_intensity(1.0, 2.0);  // mismatched domain
    CHECK_THROWS_AS(dh_norm(f, h, 0.7), std::invalid_argument);
}

TEST_CASE("wiener integral: left-point sums") {
    auto grid = make_grid(1.0, 8, 1);
    std::vector<double> z{0, 1, -1, 2, 2, 3, 1, 0, 4};
    auto Z = make_path(grid, z, Provenance::simulated);

    auto one = constant_intensity(1.0, 1.0);
    auto X = wiener_integral(one, Z);
    CHECK(X.values.values == z);  // f == 1 reproduces Z
    CHECK(X.values.values[0] == 0.0);

    // linearity in f
    auto f1 = step_intensity(1.0, 2.0, 0.5, 1.0);
    auto f2 = linear_intensity(1.0, 1.0);
    IntensityFn fsum;
    fsum.f = [&](double t) { return f1(t) + f2(t); };
    fsum.breakpoints = f1.breakpoints;
    fsum.T = 1.0;
    auto a = wiener_integral(f1, Z).values.values;
    auto b = wiener_integral(f2, Z).values.values;
    auto s = wiener_integral(fsum, Z).values.values;
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(s[i] == doctest::Approx(a[i] + b[i]).epsilon(1e-13));

    // non-finite integrand sample is rejected
    IntensityFn bad;
    bad.f = [](double t) { return t < 0.5 ? 1.0 : std::nan(""); };
    bad.T = 1.0;
    CHECK_THROWS_AS(wiener_integral(bad, Z), std::invalid_argument);
}

TEST_CASE("sde solver") {
    auto grid = make_grid(1.0, 1024, 1);
    std::vector<double> zeros(1025, 0.0);
    auto Z0 = make_path(grid, zeros, Provenance::simulated);

    SUBCASE("attestation is required") {
        SdeSpec s;
        s.drift = [](double) { return 0.0; };
        s.intensity = constant_intensity(1.0, 1.0);
        CHECK_THROWS_AS(solve_sde(s, Z0), std::invalid_argument);
        s.locally_lipschitz = true;
        CHECK_THROWS_AS(solve_sde(s, Z0), std::invalid_argument);
        s.lyapunov = true;
        CHECK_NOTHROW(solve_sde(s, Z0));
    }

    SUBCASE("zero noise, linear drift matches the Euler product") {
        auto s = sde_from_catalog("linear", 2.0, constant_intensity(1.0, 1.0), 1.0);
        auto Y = solve_sde(s, Z0);
        CHECK(Y.values.back() ==
              doctest::Approx(std::pow(1.0 - 2.0 / 1024.0, 1024.0)).epsilon(1e-12));
    }

    SUBCASE("zero drift reduces to y0 + wiener integral") {
        HermitePathRequest req;
        req.params = derive_params(0.7, 1);
        req.grid = grid;
        req.M = 1;
        req.seed = RngSeed{4, 0};
        auto Z = simulate_hermite(req);
        auto f = linear_intensity(2.0, 1.0);
        auto Y = solve_sde(sde_from_catalog("zero", 0.0, f, 0.25), Z);
        auto X = wiener_integral(f, Z);
        for (std::size_t i = 0; i < Y.values.size(); ++i)
            CHECK(Y.values[i] == doctest::Approx(0.25 + X.values.values[i]).epsilon(1e-12));
    }

    SUBCASE("blow-up aborts with the step index") {
        // unstable linear drift +60y grows deterministically past 1e12
        auto s = sde_from_catalog("linear", -60.0, constant_intensity(0.0, 1.0), 1.0);
        CHECK_THROWS_WITH_AS(solve_sde(s, Z0),
                             doctest::Contains("blow-up at step"), std::runtime_error);
    }

    SUBCASE("catalog") {
        CHECK_THROWS_AS(sde_from_catalog("banana", 1.0, constant_intensity(1.0, 1.0), 0.0),
                        std::invalid_argument);
        CHECK(sde_from_catalog("cubic", 2.0, constant_intensity(1.0, 1.0), 0.0).drift(3.0) ==
              doctest::Approx(-27.0 + 6.0));
        CHECK(sde_from_catalog("logistic", 2.0, constant_intensity(1.0, 1.0), 0.0).drift(0.25) ==
              doctest::Approx(2.0 * 0.25 * 0.75));
    }
}

TEST_CASE("holder estimate") {
    auto grid = make_grid(1.0, 1 << 12, 1);
    const auto n = static_cast<std::size_t>(grid.n);

    std::vector<double> lin(n + 1);
    for (std::size_t i = 0; i <= n; ++i) lin[i] = 3.0 * grid.t(static_cast<std::int64_t>(i));
    CHECK(holder_estimate(make_path(grid, lin, Provenance::ingested)) ==
          doctest::Approx(1.0).epsilon(1e-10));

    std::vector<double> cst(n + 1, 2.0);
    CHECK(std::isinf(holder_estimate(make_path(grid, cst, Provenance::ingested))));

    auto tiny = make_grid(1.0, 8, 1);
    CHECK_THROWS_AS(holder_estimate(make_path(tiny, std::vector<double>(9, 0.0), Provenance::ingested)),
                    std::invalid_argument);

    // rough path: estimates land below H (max-increment bias) but in (0.4, H+0.1)
    HermitePathRequest req;
    req.params = derive_params(0.7, 1);
    req.grid = grid;
    req.M = 1;
    double mean = 0.0;
    for (int r = 0; r < 10; ++r) {
        req.seed = RngSeed{100 + static_cast<std::uint64_t>(r), 0};
        mean += holder_estimate(simulate_hermite(req));
    }
    mean /= 10.0;
    CHECK(mean > 0.4);
    CHECK(mean < 0.8);
}

TEST_CASE("MC isometry: Var of the integral matches dh_norm (q=1)") {
    const double H = 0.7;
    auto f = step_intensity(1.0, 3.0, 0.5, 1.0);
    HermitePathRequest req;
    req.params = derive_params(H, 1);
    req.grid = make_grid(1.0, 1 << 10, 1);
    req.M = 1;
    const int R = 1500;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < R; ++r) {
        req.seed = RngSeed{static_cast<std::uint64_t>(r), 2};
        const double xT = wiener_integral(f, simulate_hermite(req)).values.values.back();
        s += xT;
        s2 += xT * xT;
    }
    const double var = (s2 - s * s / R) / (R - 1);
    CHECK(var == doctest::Approx(dh_norm(f, f, H)).epsilon(0.08));
}
