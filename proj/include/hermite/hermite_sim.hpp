#pragma once

#include <string>
#include <vector>

#include "hermite/core.hpp"
#include "hermite/rng.hpp"

namespace hermite {

enum class SimMethod { hermite_rank, kernel_oracle };

// Request for one Hermite-process path on grid nodes t_0..t_n, horizon T.
// M fine steps per output step: N = n*M internal Gaussians are drawn.
struct HermitePathRequest {
    HermiteParams params;
    GridSpec grid;
    int M = 16;  // oversampling factor
    RngSeed seed;
    SimMethod method = SimMethod::hermite_rank;
};

// Probabilists' Hermite polynomial H_q(x): H_0=1, H_1=x, H_{k+1}=x H_k - k H_{k-1}.
double hermite_poly(int q, double x);

// Closed-form covariance of the Hermite process (any order): (s^2H + t^2H - |t-s|^2H)/2.
double hermite_covariance(double s, double t, double H);

// Production generator (method hermite_rank lane): draw N = n*M stationary Gaussians
// whose autocovariance is the q-th root of the unit-variance fGn autocovariance at H
// (long memory with exponent 1+(H-1)/q), apply H_q pointwise, take partial sums, and
// scale by T^H / sqrt(q! N^{2H}). The diagram formula gives Var(sum_{i<=m} H_q(X_i))
// = q! sum_{i,j<=m} r(i-j)^q = q! m^{2H} exactly for this input family, so the grid
// covariance of the output matches hermite_covariance exactly (no empirical rescaling)
// and q=1 reduces to the fGn partial-sum fBm path.
// Appends to *warnings (if given) instead of failing on soft issues (e.g. small M at q>=2).
// method == kernel_oracle dispatches to kernel_oracle_path.
SamplePath simulate_hermite(const HermitePathRequest& req, std::vector<std::string>* warnings = nullptr);

// Galerkin-discretized kernel L_t(x_1..x_q) of the Wiener-Ito representation: entries
// are kernel averages over products of Wiener cells, for every output node t_k. Entries
// vanish outside (0,t)^q. The cells are the n*M uniform fine cells with the first one
// subdivided geometrically toward 0, because the kernel carries an x^{-(H'-1/2)} edge
// and piecewise constants on a uniform grid lose that mass (badly for H' near 1). For
// q=2 the diagonal-cell averages are finite (the pointwise diagonal diverges) and enter
// the simulation through compensated squares dW_i^2 - w_i. The u-integral behind every
// entry uses the change of variables s = (u - max x_i)^{H'-1/2} that removes the
// integrable endpoint singularity, integrated cell by cell across output nodes.
struct KernelMatrix {
    int q = 1;
    std::vector<double> midpoints;             // Wiener cell centers in (0,T), non-uniform near 0
    std::vector<double> widths;                // cell widths w_i (dW_i ~ N(0, w_i))
    std::vector<std::vector<double>> at_node;  // per output node k=0..n: q=1 length-NC vector,
                                               // q=2 row-major NC x NC symmetric matrix
};

// Kernel matrices for (params, grid, M); cached, since oracle draws reuse them.
const KernelMatrix& kernel_matrices(const HermiteParams& params, const GridSpec& grid, int M);

// Small-grid validation oracle (q <= 2, n*M <= 512): i.i.d. N(0,h) increments on fine
// midpoints, then the q-fold off-diagonal sum against the kernel matrices. O((nM)^{q+1}).
SamplePath kernel_oracle_path(const HermitePathRequest& req);

void clear_kernel_cache();

}  // namespace hermite
