#include "casimir/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "casimir/error.hpp"

namespace casimir {

void median_indices(int n, double t_beta, int& i, int& j) {
    if (n < 4) throw ConfigError("median: need n >= 4");
    if (!(t_beta > 0)) throw ConfigError("median: t_beta must be > 0");
    double h = t_beta * std::sqrt(static_cast<double>(n));
    i = static_cast<int>(std::floor((n + 1 - h) / 2.0));
    j = 1 + static_cast<int>(std::floor((n + 1 + h) / 2.0));
    if (i < 1 || j > n) throw ConfigError("median: n=" + std::to_string(n) + " too small for this confidence level");
}

MedianEstimate median_estimate(const RunSeries& s, double t_beta) {
    const int n = static_cast<int>(s.samples.size());
    for (double v : s.samples)
        if (!std::isfinite(v)) throw ConfigError("median: non-finite sample");
    MedianEstimate e;
    e.z = s.z;
    median_indices(n, t_beta, e.i, e.j);
    std::vector<double> x = s.samples;
    std::sort(x.begin(), x.end());
    e.value = n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
    e.lo = x[e.i - 1];
    e.hi = x[e.j - 1];
    e.random_error = 0.5 * (e.hi - e.lo);
    return e;
}

NormalEstimate normal_estimate(const std::vector<double>& samples, double t_beta) {
    const size_t n = samples.size();
    if (n < 2) throw ConfigError("normal_estimate: need n >= 2");
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    double half = t_beta * std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    return {mean, mean - half, mean + half, half};
}

double combine_errors(const std::vector<double>& components, double k_beta) {
    if (components.empty()) throw ConfigError("combine_errors: empty component list");
    if (!(k_beta > 0)) throw ConfigError("combine_errors: k_beta must be > 0");
    double sum = 0.0, sq = 0.0;
    for (double c : components) {
        if (!(c >= 0)) throw ConfigError("combine_errors: components must be >= 0");
        sum += c;
        sq += c * c;
    }
    return std::min(sum, k_beta * std::sqrt(sq));
}

double total_error(double random, double systematic) {
    if (!(random >= 0) || !(systematic >= 0)) throw ConfigError("total_error: errors must be >= 0");
    return random + systematic;
}

ComparisonCross build_cross(const MedianEstimate& est, double systematic, double patch, double dz) {
    if (!(systematic >= 0) || !(patch >= 0) || !(dz >= 0))
        throw ConfigError("build_cross: systematic, patch and dz must be >= 0");
    ComparisonCross c;
    c.z = est.z;
    c.center = -est.value;
    c.upper = -est.lo + systematic + patch;
    c.lower = -est.hi - systematic;
    c.half_width_z = dz;
    return c;
}

std::vector<BandRow> difference_band(const std::vector<TheoryPoint>& theory, const std::vector<ExperimentPoint>& expt,
                                     const std::vector<double>& patch) {
    if (theory.size() != expt.size() || (!patch.empty() && patch.size() != theory.size()))
        throw ConfigError("difference_band: misaligned grids");
    std::vector<BandRow> out;
    for (size_t k = 0; k < theory.size(); ++k) {
        const auto& t = theory[k];
        const auto& e = expt[k];
        if (std::abs(t.z - e.z) > 1e-9 * std::max(std::abs(t.z), std::abs(e.z)))
            throw ConfigError("difference_band: misaligned grids at row " + std::to_string(k + 1));
        if (!(t.dF >= 0) || !(e.dF >= 0)) throw ConfigError("difference_band: errors must be >= 0");
        double p = patch.empty() ? 0.0 : std::abs(patch[k]);
        BandRow r;
        r.z = t.z;
        r.F_th = t.F;
        r.F_expt = e.F;
        r.diff = t.F - e.F;
        double half = t.dF + e.dF;
        r.band_lo = -half;
        r.band_hi = half + p;
        r.band_hi_no_patch = half;
        r.outside = r.diff < r.band_lo || r.diff > r.band_hi;
        out.push_back(r);
    }
    return out;
}

std::vector<RunSeries> load_runs(std::istream& in) {
    std::vector<RunSeries> runs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        RunSeries r;
        if (!(ss >> r.z)) throw ConfigError("runs line " + std::to_string(lineno) + ": expected 'z_m samples...'");
        double v;
        while (ss >> v) r.samples.push_back(v);
        if (!ss.eof()) throw ConfigError("runs line " + std::to_string(lineno) + ": bad number");
        if (r.samples.size() < 4) throw ConfigError("runs line " + std::to_string(lineno) + ": need >= 4 samples");
        runs.push_back(std::move(r));
    }
    return runs;
}

}  // namespace casimir
