#include "hermite/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hermite/hermite_sim.hpp"
#include "hermite/qvar.hpp"
#include "hermite/rng.hpp"
#include "json.hpp"

namespace hermite {

namespace {

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

double nearest_rank(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto idx = static_cast<std::size_t>(
        std::llround(p * static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

SummaryStat stat_of(std::vector<double> vals) {
    SummaryStat s;
    vals.erase(std::remove_if(vals.begin(), vals.end(), [](double v) { return !std::isfinite(v); }),
               vals.end());
    if (vals.empty()) return s;
    const auto m = static_cast<double>(vals.size());
    s.mean = pairwise_sum(vals) / m;
    if (vals.size() > 1) {
        std::vector<double> sq(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = (vals[i] - s.mean) * (vals[i] - s.mean);
        s.sd = std::sqrt(pairwise_sum(std::move(sq)) / (m - 1.0));
    }
    std::sort(vals.begin(), vals.end());
    s.q05 = nearest_rank(vals, 0.05);
    s.q50 = nearest_rank(vals, 0.50);
    s.q95 = nearest_rank(vals, 0.95);
    return s;
}

IntensityFn intensity_from_json(const nlohmann::json& j, double T) {
    const std::string kind = j.value("kind", "constant");
    if (kind == "constant") return constant_intensity(j.value("value", 1.0), T);
    if (kind == "linear") return linear_intensity(j.value("slope", 1.0), T);
    if (kind == "step")
        return step_intensity(j.value("lo", 1.0), j.value("hi", 2.0), j.value("split", T / 2.0), T);
    throw std::invalid_argument("config: unknown intensity kind '" + kind +
                                "' (expected constant|linear|step)");
}

ReplicationRow run_one(const ExperimentConfig& cfg, const GridSpec& grid, int r) {
    ReplicationRow row;
    row.n = grid.n;
    row.Kn = grid.Kn;
    row.seed = static_cast<std::uint64_t>(r);
    try {
        HermitePathRequest req;
        req.params = derive_params(cfg.H, cfg.q);
        req.grid = grid;
        req.M = cfg.M;
        req.seed = RngSeed{cfg.base_seed, static_cast<std::uint64_t>(r)};
        SamplePath Z = simulate_hermite(req);

        SamplePath path;
        if (cfg.model == "hermite") {
            std::vector<double> v = Z.values;
            for (double& x : v) x *= cfg.sigma;
            path = make_path(grid, std::move(v), Provenance::simulated);
        } else if (cfg.model == "wiener-integral") {
            path = wiener_integral(cfg.intensity, Z).values;
        } else {  // sde (validated at config load)
            auto spec = sde_from_catalog(cfg.drift, cfg.drift_param, cfg.intensity, cfg.y0);
            path = solve_sde(spec, Z);
        }

        row.H_hat = estimate_H(path);
        row.sigma2_hat = estimate_sigma2(path, row.H_hat);
        try {
            const OrderEstimate o =
                cfg.model == "hermite"
                    ? estimate_order_known_sigma(path, cfg.sigma, grid.T)
                    : estimate_order_unknown_sigma(path, grid, 0);
            row.Hp_hat = o.Hp_hat;
            row.q_raw = o.q_raw;
            row.q_hat = o.q_hat;
            if (!o.defined)
                row.status = "warn:order_undefined";
            else if (!o.warnings.empty())
                row.status = "warn:resolution_hypothesis";
        } catch (const std::exception& ex) {
            row.status = std::string("warn:order:") + ex.what();
        }
    } catch (const std::exception& ex) {
        row.status = std::string("rejected:") + ex.what();
    }
    return row;
}

std::string csv_field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_replications_csv(const std::string& file, const std::vector<ReplicationRow>& rows) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file);
    out << "n,Kn,seed,H_hat,sigma2_hat,Hp_hat,q_raw,q_hat,status\n";
    for (const auto& r : rows)
        out << r.n << ',' << r.Kn << ',' << r.seed << ',' << csv_field(r.H_hat) << ','
            << csv_field(r.sigma2_hat) << ',' << csv_field(r.Hp_hat) << ',' << csv_field(r.q_raw)
            << ',' << r.q_hat << ',' << r.status << '\n';
    if (!out) throw std::runtime_error("write failed on " + file);
}

void append_stat_csv(std::ostream& out, const SummaryStat& s) {
    out << ',' << csv_field(s.mean) << ',' << csv_field(s.sd) << ',' << csv_field(s.q05) << ','
        << csv_field(s.q50) << ',' << csv_field(s.q95);
}

nlohmann::json stat_json(const SummaryStat& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95}};
}

}  // namespace

ExperimentConfig config_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    ExperimentConfig cfg;
    cfg.schema_version = j.value("schema_version", 0);
    if (cfg.schema_version != 1)
        throw std::invalid_argument("config: schema_version must be 1");
    cfg.model = j.at("model").get<std::string>();
    if (cfg.model != "hermite" && cfg.model != "wiener-integral" && cfg.model != "sde")
        throw std::invalid_argument("config: model must be hermite|wiener-integral|sde");
    cfg.H = j.at("H").get<double>();
    cfg.q = j.at("q").get<int>();
    cfg.sigma = j.value("sigma", 1.0);
    cfg.T = j.value("T", 1.0);
    cfg.intensity = j.contains("intensity") ? intensity_from_json(j["intensity"], cfg.T)
                                            : constant_intensity(1.0, cfg.T);
    if (j.contains("drift")) {
        cfg.drift = j["drift"].value("name", "zero");
        cfg.drift_param = j["drift"].value("param", 0.0);
        cfg.y0 = j["drift"].value("y0", 0.0);
    }
    if (cfg.model == "sde")
        sde_from_catalog(cfg.drift, cfg.drift_param, cfg.intensity, cfg.y0);  // validate name
    for (const auto& g : j.at("grids"))
        cfg.grids.push_back(make_grid(cfg.T, g.at("n").get<std::int64_t>(),
                                      g.value("Kn", static_cast<std::int64_t>(1))));
    if (cfg.grids.empty()) throw std::invalid_argument("config: grids must be nonempty");
    for (std::size_t i = 1; i < cfg.grids.size(); ++i)
        if (cfg.grids[i].n <= cfg.grids[i - 1].n)
            throw std::invalid_argument("config: grid sequence must be strictly increasing in n");
    cfg.replications = j.at("replications").get<int>();
    if (cfg.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    cfg.base_seed = j.value("base_seed", static_cast<std::uint64_t>(0));
    cfg.M = j.value("M", 8);
    cfg.workers = j.value("workers", 0);
    cfg.out_dir = j.value("out_dir", std::string{});
    return cfg;
}

ExperimentConfig load_config(const std::string& json_file) {
    std::ifstream in(json_file);
    if (!in) throw std::runtime_error("load_config: cannot open " + json_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

McSummary aggregate_rows(const std::vector<ReplicationRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate_rows: empty row set");
    McSummary s;
    s.n = rows.front().n;
    s.Kn = rows.front().Kn;
    s.replications = static_cast<int>(rows.size());
    std::vector<double> h, s2, hp, qr, qh;
    for (const auto& r : rows) {
        if (r.n != s.n || r.Kn != s.Kn)
            throw std::invalid_argument("aggregate_rows: rows span multiple grids");
        if (r.status.rfind("rejected", 0) == 0) {
            ++s.rejection_count;
            continue;
        }
        ++s.ok_count;
        h.push_back(r.H_hat);
        s2.push_back(r.sigma2_hat);
        hp.push_back(r.Hp_hat);
        qr.push_back(r.q_raw);
        qh.push_back(static_cast<double>(r.q_hat));
    }
    s.H_hat = stat_of(std::move(h));
    s.sigma2_hat = stat_of(std::move(s2));
    s.Hp_hat = stat_of(std::move(hp));
    s.q_raw = stat_of(std::move(qr));
    s.q_hat_mean = stat_of(std::move(qh)).mean;
    return s;
}

std::vector<McSummary> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<ReplicationRow>* rows_out) {
    const auto params = derive_params(cfg.H, cfg.q);
    std::vector<McSummary> summaries;
    std::vector<ReplicationRow> all_rows;
    for (const auto& grid : cfg.grids) {
        const auto t0 = std::chrono::steady_clock::now();
        const int R = cfg.replications;
        std::vector<ReplicationRow> rows(static_cast<std::size_t>(R));
        unsigned W = cfg.workers > 0
                         ? static_cast<unsigned>(cfg.workers)
                         : std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
        W = std::min<unsigned>(W, static_cast<unsigned>(R));
        std::atomic<int> next{0};
        auto work = [&] {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= R) break;
                rows[static_cast<std::size_t>(r)] = run_one(cfg, grid, r);
            }
        };
        if (W <= 1) {
            work();
        } else {
            std::vector<std::thread> ts;
            for (unsigned w = 0; w < W; ++w) ts.emplace_back(work);
            for (auto& t : ts) t.join();
        }
        McSummary s = aggregate_rows(rows);
        s.wall_clock_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!params.limit_theorem_regime)
            s.warnings.push_back("outside the limit-theorem regime (q = 1 requires H > 3/4)");
        summaries.push_back(std::move(s));
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
    }

    if (!cfg.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        write_replications_csv(cfg.out_dir + "/replications.csv", all_rows);

        std::ofstream sc(cfg.out_dir + "/summary.csv");
        if (!sc) throw std::runtime_error("cannot open " + cfg.out_dir + "/summary.csv");
        sc << "n,Kn,replications,ok,rejections"
              ",H_mean,H_sd,H_q05,H_q50,H_q95"
              ",sigma2_mean,sigma2_sd,sigma2_q05,sigma2_q50,sigma2_q95"
              ",Hp_mean,Hp_sd,Hp_q05,Hp_q50,Hp_q95"
              ",q_raw_mean,q_raw_sd,q_raw_q05,q_raw_q50,q_raw_q95"
              ",q_hat_mean,wall_clock_sec\n";
        for (const auto& s : summaries) {
            sc << s.n << ',' << s.Kn << ',' << s.replications << ',' << s.ok_count << ','
               << s.rejection_count;
            append_stat_csv(sc, s.H_hat);
            append_stat_csv(sc, s.sigma2_hat);
            append_stat_csv(sc, s.Hp_hat);
            append_stat_csv(sc, s.q_raw);
            sc << ',' << csv_field(s.q_hat_mean) << ',' << csv_field(s.wall_clock_sec) << '\n';
        }

        nlohmann::json out = nlohmann::json::array();
        for (const auto& s : summaries) {
            out.push_back({{"n", s.n},
                           {"Kn", s.Kn},
                           {"replications", s.replications},
                           {"ok", s.ok_count},
                           {"rejections", s.rejection_count},
                           {"H_hat", stat_json(s.H_hat)},
                           {"sigma2_hat", stat_json(s.sigma2_hat)},
                           {"Hp_hat", stat_json(s.Hp_hat)},
                           {"q_raw", stat_json(s.q_raw)},
                           {"q_hat_mean", s.q_hat_mean},
                           {"wall_clock_sec", s.wall_clock_sec},
                           {"warnings", s.warnings}});
        }
        std::ofstream sj(cfg.out_dir + "/summary.json");
        sj << out.dump(2) << '\n';
    }

    if (rows_out) *rows_out = std::move(all_rows);
    return summaries;
}

std::vector<ReplicationRow> read_replications_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_replications_csv: cannot open " + file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,Kn,seed", 0) != 0)
        throw std::runtime_error("read_replications_csv: bad header in " + file);
    std::vector<ReplicationRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        ReplicationRow r;
        auto next_tok = [&] {
            if (!std::getline(ls, tok, ',')) throw std::runtime_error("short row in " + file);
            return tok;
        };
        r.n = std::stoll(next_tok());
        r.Kn = std::stoll(next_tok());
        r.seed = std::stoull(next_tok());
        r.H_hat = std::strtod(next_tok().c_str(), nullptr);
        r.sigma2_hat = std::strtod(next_tok().c_str(), nullptr);
        r.Hp_hat = std::strtod(next_tok().c_str(), nullptr);
        r.q_raw = std::strtod(next_tok().c_str(), nullptr);
        r.q_hat = std::stoi(next_tok());
        std::getline(ls, r.status);  // status may contain commas
        rows.push_back(std::move(r));
    }
    return rows;
}

DeltaMethodReport delta_method_check(const std::vector<double>& samples_x, const std::string& g,
                                     double theta, double a_n) {
    std::function<double(double)> fn, dfn;
    if (g == "identity") {
        fn = [](double x) { return x; };
        dfn = [](double) { return 1.0; };
    } else if (g == "log") {
        if (!(theta > 0.0)) throw std::invalid_argument("delta_method_check: log needs theta > 0");
        fn = [](double x) { return std::log(x); };
        dfn = [](double x) { return 1.0 / x; };
    } else if (g == "exp_half") {
        fn = [](double x) { return std::exp(0.5 * x); };
        dfn = [](double x) { return 0.5 * std::exp(0.5 * x); };
    } else {
        throw std::invalid_argument("delta_method_check: g must be identity|log|exp_half");
    }
    std::vector<double> dev;
    dev.reserve(samples_x.size());
    for (double x : samples_x)
        dev.push_back(std::fabs(a_n * (fn(x) - fn(theta)) - dfn(theta) * a_n * (x - theta)));
    std::sort(dev.begin(), dev.end());
    DeltaMethodReport rep;
    if (!dev.empty()) {
        rep.q50 = nearest_rank(dev, 0.50);
        rep.q95 = nearest_rank(dev, 0.95);
        rep.max = dev.back();
    }
    return rep;
}

LimitLawReport limit_law_check(const ExperimentConfig& cfg) {
    const auto params = derive_params(cfg.H, cfg.q);
    if (!params.limit_theorem_regime)
        throw std::invalid_argument(
            "limit_law_check: configuration is outside the limit-theorem regime");
    const GridSpec grid = cfg.grids.back();
    const int R = cfg.replications;
    const double norm = std::pow(grid.delta(), 2.0 * params.Hp - 2.0);
    const double shift = std::pow(grid.delta(), 0.1);  // exponent perturbation factor

    std::vector<double> stat(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        HermitePathRequest req;
        req.params = params;
        req.grid = grid;
        req.M = cfg.M;
        req.seed = RngSeed{cfg.base_seed, static_cast<std::uint64_t>(r)};
        const auto Z = simulate_hermite(req);
        const auto X = wiener_integral(cfg.intensity, Z);
        stat[static_cast<std::size_t>(r)] = norm * qv_error(X, cfg.H);
    }

    // independent second-chaos limit sample: d * int f^2 dZ at Hurst 2H'-1
    IntensityFn fsq;
    {
        const IntensityFn& f = cfg.intensity;
        fsq.f = [g = f.f](double t) { const double v = g(t); return v * v; };
        fsq.alpha = f.alpha;
        fsq.breakpoints = f.breakpoints;
        fsq.bound = f.bound * f.bound;
        fsq.T = f.T;
        fsq.label = f.label + "^2";
    }
    const auto limit_params = derive_params(2.0 * params.Hp - 1.0, 2);
    const GridSpec limit_grid = make_grid(grid.T, 1024, 1);
    std::vector<double> lim(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        HermitePathRequest req;
        req.params = limit_params;
        req.grid = limit_grid;
        req.M = 16;
        req.seed = RngSeed{cfg.base_seed, static_cast<std::uint64_t>(R + r)};
        const auto Z = simulate_hermite(req);
        lim[static_cast<std::size_t>(r)] = params.d * wiener_integral(fsq, Z).values.values.back();
    }

    auto m2 = [&](const std::vector<double>& v) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
        return pairwise_sum(std::move(sq)) / static_cast<double>(v.size());
    };
    const double m2s = m2(stat), m2l = m2(lim);

    LimitLawReport rep;
    rep.n = grid.n;
    rep.replications = R;
    rep.moment_ratio = m2l > 0.0 ? m2s / m2l : (m2s > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.moment_ratio_plus = rep.moment_ratio * shift * shift;
    rep.moment_ratio_minus = rep.moment_ratio / (shift * shift);

    // two-sample Kolmogorov-Smirnov distance; ties advance both sides together
    std::vector<double> a = stat, b = lim;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    const auto na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        ks = std::max(ks, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    ks = std::max(ks, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    rep.ks = ks;
    return rep;
}

}  // namespace hermite
