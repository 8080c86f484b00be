#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hermite/core.hpp"
#include "hermite/estimators.hpp"
#include "hermite/integrator.hpp"

namespace hermite {

// One Monte Carlo experiment: a model, its parameters, a strictly increasing
// grid sweep, and replication/seed bookkeeping. Loaded from a versioned JSON
// document (schema_version 1).
struct ExperimentConfig {
    int schema_version = 1;
    std::string model;           // "hermite" | "wiener-integral" | "sde"
    double H = 0.7;
    int q = 1;
    double sigma = 1.0;          // hermite: path scale; also the known-sigma order input
    IntensityFn intensity;       // wiener-integral / sde; defaults to constant 1
    std::string drift = "zero";  // sde drift catalog name
    double drift_param = 0.0;
    double y0 = 0.0;
    double T = 1.0;
    std::vector<GridSpec> grids;  // strictly increasing n
    int replications = 1;
    std::uint64_t base_seed = 0;
    int M = 8;        // generator refinement
    int workers = 0;  // 0 = min(8, hardware)
    std::string out_dir;
};

ExperimentConfig config_from_json(const std::string& json_text);
ExperimentConfig load_config(const std::string& json_file);

// One replications.csv row. Failures never abort the sweep: the row carries
// NaNs and a rejected status instead.
struct ReplicationRow {
    std::int64_t n = 0;
    std::int64_t Kn = 0;
    std::uint64_t seed = 0;  // replication index (stream id under the base seed)
    double H_hat = std::numeric_limits<double>::quiet_NaN();
    double sigma2_hat = std::numeric_limits<double>::quiet_NaN();
    double Hp_hat = std::numeric_limits<double>::quiet_NaN();
    double q_raw = std::numeric_limits<double>::quiet_NaN();
    int q_hat = 0;
    std::string status = "ok";  // ok | warn:... | rejected:...
};

struct SummaryStat {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    double q05 = std::numeric_limits<double>::quiet_NaN();
    double q50 = std::numeric_limits<double>::quiet_NaN();
    double q95 = std::numeric_limits<double>::quiet_NaN();
};

struct McSummary {
    std::int64_t n = 0;
    std::int64_t Kn = 0;
    int replications = 0;
    int ok_count = 0;
    int rejection_count = 0;
    SummaryStat H_hat, sigma2_hat, Hp_hat, q_raw;
    double q_hat_mean = std::numeric_limits<double>::quiet_NaN();
    double wall_clock_sec = 0.0;  // not part of the row-derived state
    std::vector<std::string> warnings;
};

// Statistical fields of the summary as a pure function of the rows, so the
// summary can be reproduced exactly from replications.csv.
McSummary aggregate_rows(const std::vector<ReplicationRow>& rows);

// Runs the sweep: for each grid, `replications` independent paths (replication
// r uses stream r under the base seed, so results are order- and
// worker-count-independent), the estimator suite on each, aggregation, and —
// when cfg.out_dir is set — replications.csv, summary.csv, summary.json.
std::vector<McSummary> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<ReplicationRow>* rows_out = nullptr);

std::vector<ReplicationRow> read_replications_csv(const std::string& file);

// Pairwise comparison of the delta-method linearization: per sample x,
//   dev = | a_n (g(x) - g(theta)) - g'(theta) a_n (x - theta) |.
// g is one of "identity", "log", "exp_half" (exp(x/2)). Reports deviation
// quantiles; the identity map gives exactly 0.
struct DeltaMethodReport {
    double q50 = 0.0;
    double q95 = 0.0;
    double max = 0.0;
};

DeltaMethodReport delta_method_check(const std::vector<double>& samples_x,
                                     const std::string& g, double theta, double a_n);

// Distributional check of the normalized QV error against an independently
// simulated second-chaos limit d * int_0^T f^2 dZ at Hurst 2H'-1:
// two-sample Kolmogorov-Smirnov distance and the second-moment ratio
// (statistic over limit), plus the same ratio with the normalization
// exponent perturbed by +-0.1 (the true exponent is the unique stable one).
struct LimitLawReport {
    std::int64_t n = 0;
    int replications = 0;
    double ks = 0.0;
    double moment_ratio = 0.0;
    double moment_ratio_plus = 0.0;   // exponent + 0.1
    double moment_ratio_minus = 0.0;  // exponent - 0.1
};

LimitLawReport limit_law_check(const ExperimentConfig& cfg);

}  // namespace hermite
