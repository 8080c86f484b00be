#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hermite/core.hpp"
#include "hermite/estimators.hpp"
#include "hermite/harness.hpp"
#include "hermite/hermite_sim.hpp"
#include "hermite/integrator.hpp"
#include "hermite/rng.hpp"
#include "json.hpp"

namespace {

int cmd_simulate(double H, int q, std::int64_t n, std::int64_t Kn, double T,
                 std::uint64_t seed, std::uint64_t stream, int M, const std::string& method,
                 const std::string& model, double sigma, const std::string& drift,
                 double drift_param, double y0, const std::string& out) {
    using namespace hermite;
    HermitePathRequest req;
    req.params = derive_params(H, q);
    req.grid = make_grid(T, n, Kn);
    req.M = M;
    req.seed = RngSeed{seed, stream};
    req.method = method == "oracle" ? SimMethod::kernel_oracle : SimMethod::hermite_rank;
    std::vector<std::string> warnings;
    SamplePath Z = simulate_hermite(req, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    SamplePath path;
    if (model == "hermite") {
        std::vector<double> v = Z.values;
        for (double& x : v) x *= sigma;
        path = make_path(req.grid, std::move(v), Provenance::simulated);
    } else {
        auto spec = sde_from_catalog(drift, drift_param, constant_intensity(sigma, T), y0);
        path = solve_sde(spec, Z);
    }
    write_path_csv(path, out);
    std::cerr << "wrote " << out << " (n=" << n << ", T=" << T << ")\n";
    return 0;
}

int cmd_estimate(const std::string& in, const std::string& which, double sigma, bool have_sigma,
                 double alpha, bool have_alpha, std::int64_t Kn, int block) {
    using namespace hermite;
    SamplePath path = read_path_csv(in);
    const std::int64_t n = path.grid.n;
    if (have_alpha) {
        // block length Delta = delta^alpha  =>  Kn ~ n^alpha (T=1 scale), snapped
        // to a power of two so it divides n and n/2 for dyadic n
        const auto k = static_cast<std::int64_t>(1)
                       << std::llround(alpha * std::log2(static_cast<double>(n)));
        Kn = std::max<std::int64_t>(1, k);
    }
    while (Kn > 1 && (n % Kn != 0 || (n / 2) % Kn != 0)) Kn /= 2;
    const GridSpec grid = make_grid(path.grid.T, n, Kn);
    path.grid = grid;

    nlohmann::json out;
    const double H_hat = estimate_H(path);
    out["H_hat"] = H_hat;
    if (which == "sigma2" || which == "f") out["sigma2_hat"] = estimate_sigma2(path, H_hat);
    if (which == "f") {
        out["Kn"] = Kn;
        out["f_hat"] = estimate_intensity_fn(path, H_hat, grid);
    }
    if (which == "order") {
        const OrderEstimate o = have_sigma ? estimate_order_known_sigma(path, sigma, grid.T)
                                           : estimate_order_unknown_sigma(path, grid, block);
        out["variant"] = have_sigma ? "known_sigma" : "unknown_sigma";
        if (!have_sigma) {
            out["Kn"] = Kn;
            out["block"] = block;
        }
        out["Hp_hat"] = o.Hp_hat;
        out["q_raw"] = o.q_raw;
        out["q_hat"] = o.q_hat;
        out["q_defined"] = o.defined;
        out["warnings"] = o.warnings;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_mc(const std::string& config, const std::string& out_dir) {
    using namespace hermite;
    ExperimentConfig cfg = load_config(config);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    auto sums = run_experiment(cfg, nullptr);
    for (const auto& s : sums) {
        std::cerr << "n=" << s.n << " Kn=" << s.Kn << ": ok=" << s.ok_count
                  << " rejected=" << s.rejection_count << " H_hat mean=" << s.H_hat.mean
                  << " sd=" << s.H_hat.sd << " (" << s.wall_clock_sec << "s)\n";
        for (const auto& w : s.warnings) std::cerr << "  warning: " << w << '\n';
    }
    if (!cfg.out_dir.empty()) std::cerr << "wrote " << cfg.out_dir << "/{replications,summary}.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hermite-noise SDE simulation and inference toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "synthesize a path and write it as CSV");
    std::string model = "hermite", method = "rank", drift = "zero", out = "path.csv";
    double H = 0.7, T = 1.0, sigma = 1.0, drift_param = 0.0, y0 = 0.0;
    int q = 1, M = 16;
    std::int64_t n = 4096, Kn = 1;
    std::uint64_t seed = 0, stream = 0;
    sim->add_option("--model", model, "hermite | sde")->check(CLI::IsMember({"hermite", "sde"}));
    sim->add_option("--H", H, "Hurst index in (1/2,1)")->required();
    sim->add_option("--q", q, "Hermite order >= 1")->required();
    sim->add_option("--n", n, "number of grid steps")->required();
    sim->add_option("--Kn", Kn, "number of blocks (must divide n)");
    sim->add_option("--T", T, "horizon");
    sim->add_option("--seed", seed, "base seed");
    sim->add_option("--stream", stream, "seed stream");
    sim->add_option("--M", M, "generator refinement factor");
    sim->add_option("--method", method, "rank | oracle (oracle needs n*M <= 512)")
        ->check(CLI::IsMember({"rank", "oracle"}));
    sim->add_option("--sigma", sigma, "noise scale (hermite: path scale; sde: intensity)");
    sim->add_option("--drift", drift, "sde drift: zero|linear|cubic|logistic");
    sim->add_option("--drift-param", drift_param, "sde drift parameter");
    sim->add_option("--y0", y0, "sde initial value");
    sim->add_option("--out", out, "output CSV path");

    // estimate
    auto* est = app.add_subcommand("estimate", "run estimators on a CSV path, JSON to stdout");
    std::string in, which = "H";
    double est_sigma = 0.0, alpha = 0.0;
    std::int64_t est_Kn = 8;
    int block = 0;
    est->add_option("--in", in, "input CSV (t,value)")->required();
    est->add_option("--which", which, "H | sigma2 | f | order")
        ->check(CLI::IsMember({"H", "sigma2", "f", "order"}));
    auto* sig_opt = est->add_option("--sigma", est_sigma, "known noise scale (order variant)");
    auto* alpha_opt =
        est->add_option("--alpha", alpha, "block exponent: Delta = delta^alpha chooses Kn");
    est->add_option("--Kn", est_Kn, "blocks for f / unknown-sigma order");
    est->add_option("--block", block, "block index for unknown-sigma order");

    // mc
    auto* mc = app.add_subcommand("mc", "run a Monte Carlo experiment from a JSON config");
    std::string config, mc_out;
    mc->add_option("--config", config, "experiment JSON")->required();
    mc->add_option("--out", mc_out, "output directory (overrides config out_dir)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (sim->parsed())
            return cmd_simulate(H, q, n, Kn, T, seed, stream, M, method, model, sigma, drift,
                                drift_param, y0, out);
        if (est->parsed())
            return cmd_estimate(in, which, est_sigma, sig_opt->count() > 0, alpha,
                                alpha_opt->count() > 0, est_Kn, block);
        if (mc->parsed()) return cmd_mc(config, mc_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
