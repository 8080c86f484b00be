#pragma once

#include <limits>
#include <string>
#include <vector>

#include "hermite/core.hpp"

namespace hermite {

// Hurst-order estimate (H', q) from the second-order fluctuation statistics.
// q is defined only when the estimated H' lies below 1; `defined` records
// that, with q_raw always kept as computed.
struct OrderEstimate {
    double Hp_hat = 0.0;
    double q_raw = 0.0;
    int q_hat = 0;
    bool defined = false;
    std::vector<std::string> warnings;
};

// Aggregated per-path estimation output. Hp/q fields are NaN/0 until an
// order estimate is merged in.
struct EstimationReport {
    GridSpec grid;
    double H_hat = 0.0;
    double sigma2_hat = 0.0;            // estimates sqrt(int_0^T f^2)
    std::vector<double> f_hat;          // per-block |f| estimates
    double Hp_hat = std::numeric_limits<double>::quiet_NaN();  // NaN until merged
    double q_raw = std::numeric_limits<double>::quiet_NaN();   // NaN until merged
    int q_hat = 0;
    bool q_defined = false;
    double v2_full = 0.0;               // V^2 on the full grid (inputs echo)
    double v2_half = 0.0;               // V^2 on the even-index decimation
    std::vector<std::string> warnings;
};

// Every-second-node subsample (t_0, t_2, ...): the n/2 grid statistic.
// Kn collapses to 1 in the copy.
SamplePath decimate(const SamplePath& path);

// H estimate from the QV log-ratio between the full grid and its
// even-index decimation:
//   1/2 - [log V^2_n - log V^2_{n/2}] / (2 log 2).
// n must be even; a path with vanishing QV at either scale is rejected.
double estimate_H(const SamplePath& path);

// sigma_2 estimate exp[(H_hat - 1/2) log(1/delta) + (1/2) log V^2_n];
// targets sqrt(int_0^T f^2).
double estimate_sigma2(const SamplePath& path, double H_hat);

// Per-block |f| estimates sqrt(delta^{1-2H_hat} V^2_block / Delta) on the
// grid's Kn blocks. Zero-QV blocks yield 0.
std::vector<double> estimate_intensity_fn(const SamplePath& path, double H_hat,
                                          const GridSpec& grid);

// H' and q from the fluctuation statistic with the noise scale known:
//   F_m = (2 H_hat_n - 1) log(1/delta_m) + log V^2_m - log(T sigma^2),  m = n, n/2
//   H'_hat = 1 + [loglog(1/(2 delta_n)) - loglog(1/delta_n)
//                 + log|F_n| - log|F_{n/2}|] / (2 log 2)
//   q_raw = (H_hat - 1) / (H'_hat - 1),  q_hat = round(q_raw) when H'_hat < 1.
// n must be divisible by 4 (the half statistic needs its own decimation).
OrderEstimate estimate_order_known_sigma(const SamplePath& path, double sigma, double T);

// Unknown-sigma variant on a single block j of the grid's Kn-tiling:
//   F_{m,j} = (2 H_hat_m - 1) log(1/delta_m) + log V^2_{m,block j}
//             - log(Delta sigma2_hat_m^2 / T),  m = n, n/2
//   H'_hat = 1 + [log|F_{n,j}| - log|F_{n/2,j}|] / (2 log 2)   (no loglog term)
// Valid for drift-free scaled noise paths. Emits a warning when the
// resolution hypothesis Delta^{2-2H'} log(1/delta) <= 0.5 fails at the
// estimated H'. Block estimates are reported per block, never averaged.
OrderEstimate estimate_order_unknown_sigma(const SamplePath& path, const GridSpec& grid,
                                           int block);

// H_hat, sigma2_hat and the per-block intensity estimates in one report.
EstimationReport estimate_path(const SamplePath& path, const GridSpec& grid);

// Merge an order estimate into a report (fills Hp/q fields and warnings).
void apply_order(EstimationReport& report, const OrderEstimate& order);

// JSON document with all report fields; flat CSV row for MC aggregation.
std::string report_json(const EstimationReport& report);
std::string report_csv_header();
std::string report_csv_row(const EstimationReport& report);

}  // namespace hermite
