#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hermite {

// Nested equidistant partitions of [0,T]: fine grid {t_i = T i/n, i=0..n} and
// coarse blocks {T_j = T j/K_n, j=0..K_n}. K_n | n so the blocks are a
// sub-grid of the fine grid and block sums tile the fine-grid sums exactly.
struct GridSpec {
    double T = 1.0;
    std::int64_t n = 0;
    std::int64_t Kn = 1;

    double delta() const { return T / static_cast<double>(n); }    // fine mesh
    double Delta() const { return T / static_cast<double>(Kn); }   // block length
    std::int64_t D() const { return n / Kn; }                      // fine steps per block
    double t(std::int64_t i) const { return T * static_cast<double>(i) / static_cast<double>(n); }
    double Tj(std::int64_t j) const { return T * static_cast<double>(j) / static_cast<double>(Kn); }
};

GridSpec make_grid(double T, std::int64_t n, std::int64_t Kn);

// (H, q) plus the derived exponent H' = 1 + (H-1)/q and the constants
// attached to the quadratic-variation limit theorem. Outside the theorem's
// regime (q = 1 with H <= 3/4) d and d_tilde are NaN and the flag is false;
// simulation and the H/sigma estimators remain valid there.
struct HermiteParams {
    double H = 0.0;
    int q = 1;
    double Hp = 0.0;       // H' = 1 + (H-1)/q
    double c_Hq = 0.0;     // kernel normalization, from the Beta function
    double d = 0.0;        // limit scale d_{H',q}
    double d_tilde = 0.0;  // second-moment constant d~_{H',q} = d^2 (2H'-1)(4H'-3)
    bool limit_theorem_regime = false;  // q >= 2, or q = 1 with H > 3/4
};

HermiteParams derive_params(double H, int q);

// log Beta via log-Gamma differences; safe for small arguments.
double log_beta(double a, double b);

enum class Provenance { simulated, solved, ingested };

// Values of a process on the fine grid, immutable by convention after
// construction. values[i] sits at t_i; length is n+1.
struct SamplePath {
    GridSpec grid;
    std::vector<double> values;
    Provenance provenance = Provenance::simulated;
};

SamplePath make_path(GridSpec grid, std::vector<double> values, Provenance prov);

// Deterministic noise intensity f on [0,T] with declared piecewise regularity.
// Breakpoints list the interior discontinuities/kinks; between them f is
// alpha-Hoelder with |f| <= bound. T is the domain end (norms integrate to T).
struct IntensityFn {
    std::function<double(double)> f;
    double alpha = 1.0;
    std::vector<double> breakpoints;
    double bound = 0.0;
    double T = 1.0;
    std::string label;

    double operator()(double t) const { return f(t); }
};

IntensityFn constant_intensity(double c, double T = 1.0);
IntensityFn linear_intensity(double slope, double T);                             // f(t) = slope * t
IntensityFn step_intensity(double lo, double hi, double split, double T = 1.0);   // lo before split, hi after

// CSV round trip: header "t,value", one row per grid node, 17 significant digits.
// Readers accept any uniform grid starting at 0 (1e-9 relative node tolerance) and
// tag the result Provenance::ingested with Kn = 1; re-block via make_grid as needed.
void write_path_csv(const SamplePath& path, const std::string& file);
SamplePath read_path_csv(const std::string& file);

}  // namespace hermite
