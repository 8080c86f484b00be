#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hermite/estimators.hpp"
#include "hermite/hermite_sim.hpp"
#include "hermite/qvar.hpp"
#include "json.hpp"

using namespace hermite;

namespace {

// Deterministic path with alternating increments a*delta^H, b*delta^H chosen
// so that V^2_n = n delta^{2H} and V^2_{n/2} = (n/2)(2 delta)^{2H} hold with
// equality: a + b = 2^H and a^2 + b^2 = 2. The scale log-ratio then recovers
// H exactly, sigma2 comes out as sqrt(T), and every block intensity is 1.
SamplePath exact_scaling_path(double H, const GridSpec& g) {
    const double s = std::pow(2.0, H);
    const double disc = std::sqrt(4.0 - std::pow(2.0, 2.0 * H));
    const double a = 0.5 * (s + disc), b = 0.5 * (s - disc);
    const double dH = std::pow(g.delta(), H);
    std::vector<double> v(static_cast<std::size_t>(g.n) + 1, 0.0);
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] + (i % 2 ? a : b) * dH;
    return make_path(g, std::move(v), Provenance::ingested);
}

}  // namespace

TEST_CASE("decimate keeps even-index nodes") {
    auto g = make_grid(2.0, 8, 4);
    std::vector<double> v{0, 1, 2, 3, 4, 5, 6, 7, 8};
    auto half = decimate(make_path(g, v, Provenance::ingested));
    CHECK(half.grid.n == 4);
    CHECK(half.grid.Kn == 1);
    CHECK(half.grid.T == 2.0);
    CHECK(half.values == std::vector<double>{0, 2, 4, 6, 8});

    auto godd = make_grid(1.0, 7, 1);
    CHECK_THROWS_AS(decimate(make_path(godd, std::vector<double>(8, 0.0), Provenance::ingested)),
                    std::invalid_argument);
}

TEST_CASE("exact-scaling path recovers H, sigma2 and f exactly") {
    for (double H : {0.6, 0.7, 0.85}) {
        auto g = make_grid(1.0, 1024, 8);
        auto p = exact_scaling_path(H, g);
        CHECK(estimate_H(p) == doctest::Approx(H).epsilon(1e-10));
        CHECK(estimate_sigma2(p, estimate_H(p)) == doctest::Approx(1.0).epsilon(1e-9));
        for (double fj : estimate_intensity_fn(p, estimate_H(p), g))
            CHECK(fj == doctest::Approx(1.0).epsilon(1e-9));
    }
    // T != 1: sigma2 targets sqrt(int_0^T f^2) = sqrt(T) for unit intensity
    auto g = make_grid(4.0, 1024, 8);
    auto p = exact_scaling_path(0.7, g);
    CHECK(estimate_H(p) == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(estimate_sigma2(p, estimate_H(p)) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("estimate_H invariances and rejections") {
    auto g = make_grid(1.0, 512, 4);
    auto p = exact_scaling_path(0.7, g);

    auto scaled = p;
    for (auto& v : scaled.values) v *= 3.0;
    CHECK(std::fabs(estimate_H(scaled) - estimate_H(p)) < 1e-12);

    const double v2 = qv(p, 0.0, 1.0);
    CHECK(estimate_sigma2(p, 0.7) ==
          doctest::Approx(std::sqrt(std::pow(g.delta(), 1.0 - 2.0 * 0.7) * v2)).epsilon(1e-13));

    auto zeros = make_path(g, std::vector<double>(513, 5.0), Provenance::ingested);
    CHECK_THROWS_AS(estimate_H(zeros), std::invalid_argument);
    CHECK_THROWS_AS(estimate_sigma2(zeros, 0.7), std::invalid_argument);

    auto godd = make_grid(1.0, 9, 1);
    CHECK_THROWS_AS(estimate_H(make_path(godd, std::vector<double>(10, 0.0), Provenance::ingested)),
                    std::invalid_argument);
}

TEST_CASE("order estimator input validation") {
    auto g6 = make_grid(1.0, 6, 1);
    auto p6 = exact_scaling_path(0.7, g6);
    CHECK_THROWS_AS(estimate_order_known_sigma(p6, 1.0, 1.0), std::invalid_argument);

    auto g = make_grid(1.0, 64, 4);
    auto p = exact_scaling_path(0.7, g);
    CHECK_THROWS_AS(estimate_order_known_sigma(p, 0.0, 1.0), std::invalid_argument);

    CHECK_THROWS_AS(estimate_order_unknown_sigma(p, make_grid(1.0, 32, 4), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_order_unknown_sigma(p, g, -1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_order_unknown_sigma(p, g, 4), std::invalid_argument);

    // Kn must divide the decimated length n/2
    auto g4 = make_grid(1.0, 4, 4);
    auto p4 = exact_scaling_path(0.7, g4);
    CHECK_THROWS_AS(estimate_order_unknown_sigma(p4, g4, 0), std::invalid_argument);
}

TEST_CASE("order estimation on simulated noise, q = 1") {
    HermitePathRequest req;
    req.params = derive_params(0.85, 1);
    req.grid = make_grid(1.0, 1 << 16, 16);
    req.M = 1;
    int known_ok = 0, unknown_ok = 0;
    for (int r = 0; r < 20; ++r) {
        req.seed = RngSeed{static_cast<std::uint64_t>(300 + r), 0};
        auto Z = simulate_hermite(req);
        auto k = estimate_order_known_sigma(Z, 1.0, 1.0);
        if (k.defined && k.q_hat == 1) ++known_ok;
        auto u = estimate_order_unknown_sigma(Z, req.grid, 0);
        if (u.defined && u.q_hat == 1) ++unknown_ok;
    }
    // deterministic seeds: observed 13 and 15; keep slack for platform drift
    CHECK(known_ok >= 11);
    CHECK(unknown_ok >= 11);
}

TEST_CASE("resolution hypothesis warning at coarse block counts") {
    HermitePathRequest req;
    req.params = derive_params(0.7, 1);
    req.grid = make_grid(1.0, 1 << 12, 4);
    req.M = 1;
    req.seed = RngSeed{42, 0};
    auto o = estimate_order_unknown_sigma(simulate_hermite(req), req.grid, 1);
    REQUIRE(o.defined);
    REQUIRE(o.warnings.size() == 1);
    CHECK(o.warnings[0].find("resolution hypothesis weak") != std::string::npos);
}

TEST_CASE("H estimate is consistent on Rosenblatt-type noise") {
    HermitePathRequest req;
    req.params = derive_params(0.7, 2);
    req.grid = make_grid(1.0, 1 << 14, 16);
    req.M = 8;
    double mean = 0.0;
    for (int r = 0; r < 10; ++r) {
        req.seed = RngSeed{static_cast<std::uint64_t>(500 + r), 0};
        mean += estimate_H(simulate_hermite(req));
    }
    mean /= 10.0;
    CHECK(mean == doctest::Approx(0.7).epsilon(0.07));
}

TEST_CASE("report assembly, JSON and CSV") {
    auto g = make_grid(1.0, 256, 4);
    auto p = exact_scaling_path(0.7, g);
    auto rep = estimate_path(p, g);
    CHECK(rep.H_hat == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(rep.v2_full == qv(p, 0.0, 1.0));
    CHECK(rep.f_hat.size() == 4);
    CHECK(std::isnan(rep.Hp_hat));

    auto j0 = nlohmann::json::parse(report_json(rep));
    CHECK(j0["Hp_hat"].is_null());  // NaN serializes as null
    CHECK(j0["grid"]["n"] == 256);
    CHECK(j0["q_defined"] == false);
    CHECK(j0["H_hat"].get<double>() == doctest::Approx(0.7).epsilon(1e-10));
    CHECK(j0["f_hat"].size() == 4);

    OrderEstimate o;
    o.Hp_hat = 0.85;
    o.q_raw = 2.02;
    o.q_hat = 2;
    o.defined = true;
    apply_order(rep, o);
    CHECK(rep.q_defined);
    auto j1 = nlohmann::json::parse(report_json(rep));
    CHECK(j1["q_hat"] == 2);
    CHECK(j1["Hp_hat"].get<double>() == doctest::Approx(0.85));

    CHECK(report_csv_header() == "n,Kn,H_hat,sigma2_hat,Hp_hat,q_raw,q_hat,status");
    const std::string row = report_csv_row(rep);
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
    CHECK(row.substr(row.rfind(',') + 1) == "ok");
}
