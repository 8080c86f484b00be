#include "hermite/estimators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hermite/qvar.hpp"
#include "json.hpp"

namespace hermite {

SamplePath decimate(const SamplePath& path) {
    const GridSpec& g = path.grid;
    if (g.n % 2 != 0) throw std::invalid_argument("decimate: n must be even");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(g.n / 2) + 1);
    for (std::int64_t i = 0; i <= g.n; i += 2) v.push_back(path.values[static_cast<std::size_t>(i)]);
    return make_path(make_grid(g.T, g.n / 2, 1), std::move(v), path.provenance);
}

double estimate_H(const SamplePath& path) {
    if (path.grid.n % 2 != 0) throw std::invalid_argument("estimate_H: n must be even");
    const double v2 = qv(path, 0.0, path.grid.T);
    const double v2h = qv(decimate(path), 0.0, path.grid.T);
    if (!(v2 > 0.0) || !(v2h > 0.0))
        throw std::invalid_argument("estimate_H: degenerate path (zero quadratic variation)");
    return 0.5 - (std::log(v2) - std::log(v2h)) / (2.0 * std::log(2.0));
}

double estimate_sigma2(const SamplePath& path, double H_hat) {
    const double v2 = qv(path, 0.0, path.grid.T);
    if (!(v2 > 0.0))
        throw std::invalid_argument("estimate_sigma2: degenerate path (zero quadratic variation)");
    return std::exp((H_hat - 0.5) * std::log(1.0 / path.grid.delta()) + 0.5 * std::log(v2));
}

std::vector<double> estimate_intensity_fn(const SamplePath& path, double H_hat,
                                          const GridSpec& grid) {
    if (grid.n != path.grid.n || std::fabs(grid.T - path.grid.T) > 1e-12 * std::max(1.0, grid.T))
        throw std::invalid_argument("estimate_intensity_fn: grid does not match the path's mesh");
    const double norm = std::pow(grid.delta(), 1.0 - 2.0 * H_hat);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(grid.Kn));
    for (std::int64_t j = 0; j < grid.Kn; ++j)
        out.push_back(std::sqrt(norm * qv(path, grid.Tj(j), grid.Tj(j + 1)) / grid.Delta()));
    return out;
}

namespace {

int round_order(double q_raw) {
    const auto r = static_cast<int>(std::lround(q_raw));
    return r < 1 ? 1 : r;
}

}  // namespace

OrderEstimate estimate_order_known_sigma(const SamplePath& path, double sigma, double T) {
    const GridSpec& g = path.grid;
    if (g.n % 4 != 0) throw std::invalid_argument("estimate_order_known_sigma: n must be divisible by 4");
    if (!(sigma != 0.0)) throw std::invalid_argument("estimate_order_known_sigma: sigma must be nonzero");
    const SamplePath half = decimate(path);
    const double delta_n = g.delta();
    if (!(2.0 * delta_n < 1.0))
        throw std::invalid_argument("estimate_order_known_sigma: needs 2*delta < 1 for the log-log terms");

    auto F = [&](const SamplePath& p) {
        const double v2 = qv(p, 0.0, p.grid.T);
        if (!(v2 > 0.0)) throw std::invalid_argument("estimate_order_known_sigma: degenerate path");
        return (2.0 * estimate_H(p) - 1.0) * std::log(1.0 / p.grid.delta()) + std::log(v2) -
               std::log(T * sigma * sigma);
    };
    const double Fn = F(path);
    const double Fh = F(half);
    if (Fn == 0.0 || Fh == 0.0)
        throw std::invalid_argument("estimate_order_known_sigma: vanishing fluctuation statistic");

    OrderEstimate o;
    o.Hp_hat = 1.0 + (std::log(std::log(1.0 / (2.0 * delta_n))) - std::log(std::log(1.0 / delta_n)) +
                      std::log(std::fabs(Fn)) - std::log(std::fabs(Fh))) /
                         (2.0 * std::log(2.0));
    const double H_hat = estimate_H(path);
    o.q_raw = (H_hat - 1.0) / (o.Hp_hat - 1.0);
    o.defined = o.Hp_hat < 1.0;
    if (o.defined) {
        o.q_hat = round_order(o.q_raw);
    } else {
        o.warnings.push_back("order undefined: estimated H' >= 1");
    }
    return o;
}

OrderEstimate estimate_order_unknown_sigma(const SamplePath& path, const GridSpec& grid,
                                           int block) {
    const GridSpec& pg = path.grid;
    if (grid.n != pg.n || std::fabs(grid.T - pg.T) > 1e-12 * std::max(1.0, pg.T))
        throw std::invalid_argument("estimate_order_unknown_sigma: grid does not match the path's mesh");
    if (pg.n % 4 != 0)
        throw std::invalid_argument("estimate_order_unknown_sigma: n must be divisible by 4");
    if ((pg.n / 2) % grid.Kn != 0)
        throw std::invalid_argument("estimate_order_unknown_sigma: Kn must divide n/2");
    if (block < 0 || block >= grid.Kn)
        throw std::invalid_argument("estimate_order_unknown_sigma: block index out of range");

    auto F = [&](const SamplePath& p) {
        const double H_hat = estimate_H(p);
        const double s2 = estimate_sigma2(p, H_hat);
        const double v2b = qv(p, grid.Tj(block), grid.Tj(block + 1));
        if (!(v2b > 0.0))
            throw std::invalid_argument("estimate_order_unknown_sigma: zero block quadratic variation");
        return (2.0 * H_hat - 1.0) * std::log(1.0 / p.grid.delta()) + std::log(v2b) -
               std::log(grid.Delta() * s2 * s2 / grid.T);
    };
    const double Fn = F(path);
    const double Fh = F(decimate(path));
    if (Fn == 0.0 || Fh == 0.0)
        throw std::invalid_argument("estimate_order_unknown_sigma: vanishing fluctuation statistic");

    OrderEstimate o;
    o.Hp_hat = 1.0 + (std::log(std::fabs(Fn)) - std::log(std::fabs(Fh))) / (2.0 * std::log(2.0));
    const double H_hat = estimate_H(path);
    o.q_raw = (H_hat - 1.0) / (o.Hp_hat - 1.0);
    o.defined = o.Hp_hat < 1.0;
    if (o.defined) {
        o.q_hat = round_order(o.q_raw);
        const double hyp = std::pow(grid.Delta(), 2.0 - 2.0 * o.Hp_hat) * std::log(1.0 / pg.delta());
        if (hyp > 0.5)
            o.warnings.push_back("resolution hypothesis weak: Delta^{2-2H'} log(1/delta) = " +
                                 std::to_string(hyp) + " > 0.5 at the estimated H'");
    } else {
        o.warnings.push_back("order undefined: estimated H' >= 1");
    }
    return o;
}

EstimationReport estimate_path(const SamplePath& path, const GridSpec& grid) {
    EstimationReport rep;
    rep.grid = grid;
    rep.H_hat = estimate_H(path);
    rep.sigma2_hat = estimate_sigma2(path, rep.H_hat);
    rep.f_hat = estimate_intensity_fn(path, rep.H_hat, grid);
    rep.v2_full = qv(path, 0.0, grid.T);
    rep.v2_half = qv(decimate(path), 0.0, grid.T);
    return rep;
}

void apply_order(EstimationReport& report, const OrderEstimate& order) {
    report.Hp_hat = order.Hp_hat;
    report.q_raw = order.q_raw;
    report.q_hat = order.q_hat;
    report.q_defined = order.defined;
    report.warnings.insert(report.warnings.end(), order.warnings.begin(), order.warnings.end());
}

std::string report_json(const EstimationReport& rep) {
    nlohmann::json j;
    j["grid"] = {{"T", rep.grid.T}, {"n", rep.grid.n}, {"Kn", rep.grid.Kn}};
    j["H_hat"] = rep.H_hat;
    j["sigma2_hat"] = rep.sigma2_hat;
    j["f_hat"] = rep.f_hat;
    j["Hp_hat"] = rep.Hp_hat;
    j["q_raw"] = rep.q_raw;
    j["q_hat"] = rep.q_hat;
    j["q_defined"] = rep.q_defined;
    j["v2_full"] = rep.v2_full;
    j["v2_half"] = rep.v2_half;
    j["warnings"] = rep.warnings;
    return j.dump(2);
}

std::string report_csv_header() { return "n,Kn,H_hat,sigma2_hat,Hp_hat,q_raw,q_hat,status"; }

std::string report_csv_row(const EstimationReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << rep.grid.n << ',' << rep.grid.Kn << ',' << rep.H_hat << ',' << rep.sigma2_hat << ','
       << rep.Hp_hat << ',' << rep.q_raw << ',' << rep.q_hat << ','
       << (rep.warnings.empty() ? "ok" : (rep.q_defined ? "warn" : "q_undefined"));
    return os.str();
}

}  // namespace hermite
