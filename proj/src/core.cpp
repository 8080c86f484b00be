#include "hermite/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

namespace hermite {

GridSpec make_grid(double T, std::int64_t n, std::int64_t Kn) {
    if (!(T > 0.0)) throw std::invalid_argument("make_grid: T must be positive");
    if (n <= 0) throw std::invalid_argument("make_grid: n must be positive");
    if (Kn <= 0) throw std::invalid_argument("make_grid: K_n must be positive");
    if (n % Kn != 0)
        throw std::invalid_argument("make_grid: K_n = " + std::to_string(Kn) + " does not divide n = " +
                                    std::to_string(n));
    return GridSpec{T, n, Kn};
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

HermiteParams derive_params(double H, int q) {
    if (!(H > 0.5 && H < 1.0)) throw std::invalid_argument("derive_params: H must lie in (1/2,1)");
    if (q < 1) throw std::invalid_argument("derive_params: q must be a positive integer");

    HermiteParams p;
    p.H = H;
    p.q = q;
    p.Hp = 1.0 + (H - 1.0) / static_cast<double>(q);

    // c_{H,q}^2 = H(2H-1) / (q! B(H'-1/2, 2-2H')^q)
    double log_qfact = std::lgamma(static_cast<double>(q) + 1.0);
    double lb = log_beta(p.Hp - 0.5, 2.0 - 2.0 * p.Hp);
    p.c_Hq = std::exp(0.5 * (std::log(H * (2.0 * H - 1.0)) - log_qfact - static_cast<double>(q) * lb));

    p.limit_theorem_regime = (q >= 2) || (H > 0.75);
    if (p.limit_theorem_regime) {
        const double Hp = p.Hp;
        const double qd = static_cast<double>(q);
        const double num = std::sqrt(2.0) * qd * ((2.0 * Hp - 2.0) * qd + 1.0) * ((Hp - 1.0) * qd + 1.0);
        const double den = std::sqrt((4.0 * Hp - 3.0) * (2.0 * Hp - 1.0)) *
                           ((2.0 * Hp - 2.0) * (qd - 1.0) + 1.0) * ((Hp - 1.0) * (qd - 1.0) + 1.0);
        p.d = num / den;
        p.d_tilde = p.d * p.d * (2.0 * Hp - 1.0) * (4.0 * Hp - 3.0);
    } else {
        p.d = std::numeric_limits<double>::quiet_NaN();
        p.d_tilde = std::numeric_limits<double>::quiet_NaN();
    }
    return p;
}

SamplePath make_path(GridSpec grid, std::vector<double> values, Provenance prov) {
    if (static_cast<std::int64_t>(values.size()) != grid.n + 1)
        throw std::invalid_argument("make_path: values length must be n+1");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_path: non-finite path value");
    return SamplePath{grid, std::move(values), prov};
}

IntensityFn constant_intensity(double c, double T) {
    IntensityFn f;
    f.f = [c](double) { return c; };
    f.alpha = 1.0;
    f.bound = std::fabs(c);
    f.T = T;
    f.label = "constant(" + std::to_string(c) + ")";
    return f;
}

IntensityFn linear_intensity(double slope, double T) {
    IntensityFn f;
    f.f = [slope](double t) { return slope * t; };
    f.alpha = 1.0;
    f.bound = std::fabs(slope) * T;
    f.T = T;
    f.label = "linear(" + std::to_string(slope) + ")";
    return f;
}

IntensityFn step_intensity(double lo, double hi, double split, double T) {
    IntensityFn f;
    f.f = [lo, hi, split](double t) { return t < split ? lo : hi; };
    f.alpha = 1.0;
    f.breakpoints = {split};
    f.bound = std::max(std::fabs(lo), std::fabs(hi));
    f.T = T;
    f.label = "step(" + std::to_string(lo) + "," + std::to_string(hi) + "@" + std::to_string(split) + ")";
    return f;
}

void write_path_csv(const SamplePath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("write_path_csv: cannot open " + file);
    out << "t,value\n" << std::setprecision(17);
    for (std::int64_t i = 0; i <= path.grid.n; ++i)
        out << path.grid.t(i) << ',' << path.values[static_cast<std::size_t>(i)] << '\n';
    if (!out) throw std::runtime_error("write_path_csv: write failed on " + file);
}

SamplePath read_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_path_csv: cannot open " + file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,value", 0) != 0)
        throw std::runtime_error("read_path_csv: missing 't,value' header in " + file);
    std::vector<double> t, v;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double ti, vi;
        if (std::sscanf(line.c_str(), "%lf,%lf", &ti, &vi) != 2)
            throw std::runtime_error("read_path_csv: bad row at line " + std::to_string(lineno) + " of " + file);
        t.push_back(ti);
        v.push_back(vi);
    }
    if (t.size() < 2) throw std::runtime_error("read_path_csv: need at least 2 rows in " + file);
    const std::int64_t n = static_cast<std::int64_t>(t.size()) - 1;
    const double T = t.back();
    if (!(T > 0.0) || std::fabs(t.front()) > 1e-9 * T)
        throw std::runtime_error("read_path_csv: grid must start at 0 with T > 0 in " + file);
    for (std::int64_t i = 0; i <= n; ++i) {
        const double want = T * static_cast<double>(i) / static_cast<double>(n);
        if (std::fabs(t[static_cast<std::size_t>(i)] - want) > 1e-9 * T)
            throw std::runtime_error("read_path_csv: non-uniform grid at row " + std::to_string(i + 2) + " of " + file);
    }
    return make_path(make_grid(T, n, 1), std::move(v), Provenance::ingested);
}

}  // namespace hermite
