#pragma once

#include <string>
#include <vector>

#include "hermite/core.hpp"
#include "hermite/integrator.hpp"
#include "hermite/rng.hpp"

namespace hermite {

// Per-block and global quadratic variation of a path, raw and normalized by
// delta^{1-2H}. Blocks are the grid's Kn-tiling of [0,T); global values are
// the exact sum of the block values.
struct QVReport {
    GridSpec grid;
    double H = 0.0;  // normalization exponent used (true or estimated)
    std::vector<double> block_raw;
    std::vector<double> block_normalized;
    double global_raw = 0.0;
    double global_normalized = 0.0;
};

// V^2_{n,[s,t]} = sum of squared increments whose LEFT endpoint lies in
// [s, t). s and t must be grid nodes (s <= t); single pass, compensated
// summation (squared increments at n ~ 2^18 are too small for naive
// accumulation).
double qv(const SamplePath& path, double s, double t);

QVReport qv_report(const SamplePath& path, double H);

// CSV rows: block_index,T_left,T_right,qv_raw,qv_normalized
void write_qv_csv(const QVReport& report, const std::string& file);

// Block-wise L1 discrepancy between normalized QV and the integrated squared
// intensity:
//   sum_j | delta^{1-2H} V^2_{n,[T_j,T_{j+1}]} - int_{T_j}^{T_{j+1}} f^2 |
// over grid.Kn blocks. grid must describe the same [0,T] mesh as the path.
double weighted_qv_error(const WienerIntegralPath& path, const GridSpec& grid, double H);

// Signed global error  delta^{1-2H} V^2_{n,[0,T]} - int_0^T f^2.
double qv_error(const WienerIntegralPath& path, double H);

// MC oracle for the second-moment bound E V^2 <~ delta^{2H-1} ||f||^2_{L2}:
// returns (MC mean of V^2 over `seeds` independent paths) divided by
// delta^{2H-1} ||f||^2. Stays bounded (about 1) across n for the toolkit's
// generators. seeds >= 100.
double qv_moment_bound_check(const IntensityFn& f, const HermiteParams& params,
                             const GridSpec& grid, int seeds,
                             RngSeed base = RngSeed{7777, 0});

// int_0^T f^2 via quadrature split at f's declared breakpoints.
double intensity_l2sq(const IntensityFn& f, double a, double b);

}  // namespace hermite
