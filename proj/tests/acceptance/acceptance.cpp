// One PASS/FAIL line per acceptance criterion. Optional args select criteria by number.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/edge_fit.hpp"
#include "casimir/engine.hpp"
#include "casimir/experiment.hpp"
#include "casimir/kernels.hpp"
#include "casimir/spectrum.hpp"
#include "casimir/stats.hpp"

using namespace casimir;
using constants::pi;

namespace {

const double R0 = 149.7e-6;
const double wp = 1.3673407039285594e16, gam = 5.3174360708332875e13;  // 9 eV, 35 meV
const MaterialModel drude = MaterialModel::drude(wp, gam);
const MaterialModel plasma = MaterialModel::plasma(wp);
const ThermalSpec thermal{};

double now() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void note(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
    std::fprintf(stderr, fmt, a, b, c, d);
    std::fflush(stderr);
}

// exact engine runs, shared between criteria
struct Key {
    int model;  // 0 drude, 1 plasma
    double R, z;
    LFilter f;
    bool operator<(const Key& o) const {
        return std::tie(model, R, z, f) < std::tie(o.model, o.R, o.z, o.f);
    }
};
std::map<Key, ForceResult> cache;

const ForceResult& exact(int model, double R, double z, LFilter f = LFilter::All) {
    Key k{model, R, z, f};
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const MaterialModel& m = model ? plasma : drude;
    EngineOptions o;
    o.filter = f;
    double t = now();
    auto r = casimir_force({R, z}, {m, m}, thermal, o);
    note("  exact R=%.1f um z=%.2f um filter=%.0f: %.1f s\n", R * 1e6, z * 1e6, static_cast<int>(f), now() - t);
    return cache.emplace(k, r).first->second;
}

double pfa(int model, double R, double z, LFilter f) {
    const MaterialModel& m = model ? plasma : drude;
    return pfa_force({R, z}, {m, m}, thermal, f);
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Outcome c1_de_cross_validation() {
    // theta from exact/PFA at 2R, applied to the DE at R, compared with the exact force at R
    double worst = 0.0;
    std::string rows;
    for (int model : {0, 1})
        for (double z : {0.5e-6, 1e-6, 2e-6, 4e-6}) {
            const auto& e2 = exact(model, 2 * R0, z, LFilter::NonZeroOnly);
            double theta = theta_from_forces(e2.force, pfa(model, 2 * R0, z, LFilter::NonZeroOnly), 2 * R0, z);
            const MaterialModel& m = model ? plasma : drude;
            double F_de = de_force({R0, z}, {m, m}, thermal, theta).force;
            double F = exact(model, R0, z).force;
            double eta = std::abs(F - F_de) / std::abs(F);
            worst = std::max(worst, eta);
            rows += std::string(model ? " plasma" : " drude") + fmt("@%.1fum=%.2e", z * 1e6, eta);
        }
    return {worst < 1e-5, fmt("max eta = %.3e (limit 1e-5);", worst) + rows};
}

Outcome c2_energy_force() {
    double worst = 0.0;
    std::string rows;
    for (double z : {1e-6, 2e-6, 4e-6}) {
        const double h = 1e-4 * z;
        EngineOptions o;
        o.quad = auto_quadrature(R0, z);
        auto F = casimir_force({R0, z}, {drude, drude}, thermal, o).force;
        double Ep = casimir_free_energy({R0, z + h}, {drude, drude}, thermal, o);
        double Em = casimir_free_energy({R0, z - h}, {drude, drude}, thermal, o);
        double fd = -(Ep - Em) / (2 * h);
        double rel = std::abs(F / fd - 1);
        worst = std::max(worst, rel);
        rows += fmt(" z=%.0fum:%.2e", z * 1e6, rel);
    }
    return {worst < 1e-6, fmt("max |F_trace/F_fd - 1| = %.3e (limit 1e-6);", worst) + rows};
}

Outcome c3_zero_frequency() {
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> U(0.01, 3.0), P(0.0, 2 * pi);
    const double R = 2e-6;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        double k = U(rng) / R, kp = U(rng) / R, dphi = P(rng);
        double arg = 2 * R * R * (k * kp * std::cos(dphi) + k * kp);
        double s = 0.0, pw = 1.0;
        for (int l = 1; l <= 80; ++l) {
            pw *= arg / ((2.0 * l - 1) * (2.0 * l));
            s += pw;
        }
        double series = 2 * pi * R / kp * s;
        double closed = zero_frequency_kernel(drude, k, kp, dphi, R, Pol::TM, Pol::TM);
        if (series != 0.0) worst = std::max(worst, std::abs(closed / series - 1));
    }
    return {worst < 1e-12, fmt("max rel diff cosh form vs l-series = %.2e over 100 samples (limit 1e-12)", worst)};
}

double term_logdet(double R, double z, int N, int M) {
    double K = matsubara_frequency(thermal, 1) / constants::c;
    KernelContext ctx{K, R, z, drude, drude};
    QuadratureSpec q{N, M, std::max(1.0 / z, std::sqrt(K / z))};
    return RoundTripOperator(ctx, q).evaluate(false).logdet;
}

Outcome c4_quadrature() {
    const double z = 1e-6;
    auto base = auto_quadrature(R0, z);
    EngineOptions o1, o2;
    o1.quad = base;
    o2.quad = QuadratureSpec{2 * base.N, 2 * base.M, base.a};
    double t = now();
    double F1 = casimir_force({R0, z}, {drude, drude}, thermal, o1).force;
    double F2 = casimir_force({R0, z}, {drude, drude}, thermal, o2).force;
    note("  doubling run: %.1f s\n", now() - t);
    double dbl = std::abs(F1 / F2 - 1);

    // minimal N for 1e-6 on the first Matsubara term, R/z from 30 to 750
    std::vector<double> ratios = {30, 75, 150, 300, 750};
    std::vector<double> nmin;
    std::string rows;
    for (double rz : ratios) {
        double zz = R0 / rz;
        int Nref = static_cast<int>(std::ceil(8 * std::sqrt(rz))) + 60;
        double ref = term_logdet(R0, zz, Nref, 2 * Nref);
        auto ok = [&](int N) { return std::abs(term_logdet(R0, zz, N, 2 * N) / ref - 1) < 1e-6; };
        int lo = 4, hi = Nref;  // ok(hi) assumed, bisect for the smallest passing N
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (ok(mid) ? hi : lo) = mid;
        }
        nmin.push_back(hi);
        rows += fmt(" R/z=%.0f:N=%.0f", rz, hi);
    }
    // growth exponent from a least-squares fit of log N_min against log(R/z)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < ratios.size(); ++i) {
        double x = std::log(ratios[i]), y = std::log(nmin[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    double n = ratios.size();
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    // no faster than sqrt: the exponent stays near 1/2 and N_min/sqrt(R/z) does not
    // keep rising at the top of the range; auto N must cover N_min everywhere
    double cmax = 0;
    bool covered = true;
    for (size_t i = 0; i < ratios.size(); ++i) {
        cmax = std::max(cmax, nmin[i] / std::sqrt(ratios[i]));
        covered = covered && auto_quadrature(R0, R0 / ratios[i]).N >= nmin[i];
    }
    double c_last = nmin.back() / std::sqrt(ratios.back());
    bool scaling = slope <= 0.6 && c_last <= cmax && covered;

    // first Matsubara term at the reference point, N and M doubled
    double ld1 = term_logdet(R0, z, base.N, base.M), ld2 = term_logdet(R0, z, 2 * base.N, 2 * base.M);
    double dld = std::abs(ld1 / ld2 - 1);
    return {dbl < 1e-8 && dld < 1e-8 && scaling,
            fmt("doubling (N,M) changes F by %.2e and logdet(l=1) by %.2e (limit 1e-8); ", dbl, dld) +
                fmt("N_min ~ (R/z)^%.3f (limit 0.6), N_min/sqrt(R/z) max %.2f last %.2f, auto N covers: ", slope, cmax,
                    c_last) +
                (covered ? "yes;" : "no;") + rows};
}

Outcome c5_pfa_limit() {
    std::vector<double> zs = {0.2e-6, 0.5e-6, 1e-6, 2e-6};
    std::vector<double> dev;
    std::string rows;
    for (double z : zs) {
        double F = exact(0, R0, z).force;
        double P = pfa(0, R0, z, LFilter::All);
        dev.push_back(std::abs(F / P - 1));
        rows += fmt(" z=%.1fum:%.3e", z * 1e6, dev.back());
    }
    bool mono = true;
    for (size_t i = 1; i < dev.size(); ++i) mono = mono && dev[i] > dev[i - 1];
    // theta > 0 and equal at R and 2R within 2%
    bool theta_ok = true;
    for (int model : {0, 1})
        for (double z : {0.5e-6, 1e-6}) {
            const auto& eR = exact(model, R0, z);  // l > 0 part of the cached full run
            double tR = theta_from_forces(eR.force - eR.force_l0(),
                                          pfa(model, R0, z, LFilter::NonZeroOnly), R0, z);
            double t2 = theta_from_forces(exact(model, 2 * R0, z, LFilter::NonZeroOnly).force,
                                          pfa(model, 2 * R0, z, LFilter::NonZeroOnly), 2 * R0, z);
            theta_ok = theta_ok && tR > 0 && t2 > 0 && std::abs(tR / t2 - 1) < 0.02;
            rows += std::string(model ? " theta(plasma," : " theta(drude,") + fmt("%.1fum)=%.4f/%.4f", z * 1e6, tR, t2);
        }
    return {dev[0] < 0.01 && mono && theta_ok,
            fmt("|F/F_PFA-1| at 0.2um = %.3e (limit 1e-2);", dev[0]) + " monotone=" + (mono ? "yes" : "no") +
                " theta R vs 2R within 2%: " + (theta_ok ? "yes;" : "no;") +
                rows};
}

Outcome c6_model_discrimination() {
    bool all = true;
    double best = 0.0, best_z = 0.0;
    std::string rows;
    for (double z : {0.5e-6, 1e-6, 2e-6, 3e-6, 4e-6, 5e-6, 6e-6, 8e-6}) {
        double d = exact(0, R0, z).force, p = exact(1, R0, z).force;
        double r = p / d;
        all = all && std::abs(p) > std::abs(d);
        if (z >= 3e-6 && z <= 8e-6 && r > best) best = r, best_z = z;
        rows += fmt(" %.1fum:%.3f", z * 1e6, r);
    }
    return {all && best > 1.1, fmt("|F_plasma|>|F_drude| everywhere; max ratio in [3,8] um = %.3f at z=%.1f um;", best,
                                   best_z * 1e6) + rows};
}

Outcome c7_min_force() {
    OscillatorParams p{1.07e-9, 4850, 306.45, 239e-6, 295.25, 0.0};
    double f = min_detectable_force(p) * 1e15;
    return {f >= 5.7 && f <= 5.9, fmt("F_min = %.3f fN/sqrt(Hz) (window 5.7-5.9)", f)};
}

Outcome c8_electrostatic() {
    double R = R0, z = 1e-3 * R, V = 0.1, V0 = 0.02;
    double F = electrostatic_force(z, R, V, V0);
    double A = -pi * constants::eps0 * R * (V - V0) * (V - V0) / z;
    double rel = std::abs(F / A - 1);
    return {rel < 0.01, fmt("series/asymptote - 1 = %.3e at z/R = 1e-3 (limit 1e-2)", rel)};
}

Outcome c9_median() {
    int i, j;
    median_indices(30, 1.96, i, j);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> G(0.0, 1.0);
    int cover = 0;
    for (int t = 0; t < 10000; ++t) {
        RunSeries s{1e-6, std::vector<double>(30)};
        for (auto& x : s.samples) x = G(rng);
        auto e = median_estimate(s);
        cover += e.lo <= 0.0 && 0.0 <= e.hi;
    }
    double cov = cover / 1e4;
    // synthetic samples (fN) matching the reported order statistics
    std::vector<double> z5 = {
        -1670.639, -1670.179, -1669.719, -1669.259, -1668.799, -1668.339, -1667.880, -1667.420, -1666.960, -1666.500,
        -1666.500, -1666.500, -1666.500, -1666.500, -1666.500, -1666.500, -1662.000, -1662.000, -1662.000, -1662.000,
        -1658.850, -1658.063, -1657.277, -1656.490, -1655.704, -1654.917, -1654.131, -1653.344, -1652.558, -1651.771};
    std::vector<double> z21 = {
        -55.733, -55.407, -55.081, -54.755, -54.430, -54.104, -53.778, -53.452, -53.126, -52.800,
        -52.576, -52.352, -52.128, -51.904, -51.680, -51.660, -51.300, -51.300, -51.300, -51.300,
        -50.970, -50.544, -50.118, -49.692, -49.266, -48.840, -48.415, -47.989, -47.563, -47.137};
    auto m5 = median_estimate({0.6e-6, z5});
    auto n5 = normal_estimate(z5);
    auto m21 = median_estimate({2.2e-6, z21});
    auto n21 = normal_estimate(z21);
    // quoted values are rounded: allow half a unit in the last digit
    auto near = [](double a, double b, double tol) { return std::abs(a - b) <= tol + 1e-9; };
    bool ex = near(m5.value, -1666.5, 0.005) && near(m5.random_error, 3.8, 0.05) && near(n5.mean, -1662.86, 0.005) &&
              near(n5.half_width, 2.1, 0.06) && near(m21.value, -51.67, 0.005) && near(m21.lo, -52.80, 0.005) &&
              near(m21.hi, -50.97, 0.005) && near(m21.random_error, 0.92, 0.005) && near(n21.mean, -51.69, 0.005) &&
              near(n21.half_width, 0.85, 0.006);
    return {i == 10 && j == 21 && cov >= 0.93 && cov <= 0.97 && ex,
            fmt("(i,j)=(%.0f,%.0f); coverage %.4f on 1e4 trials (window 0.93-0.97); ", i, j, cov) +
                fmt("z5: median %.2f err %.3f, normal %.2f +- %.3f; ", m5.value, m5.random_error, n5.mean,
                    n5.half_width) +
                fmt("z21: median %.2f err %.3f, normal %.2f +- %.3f; ", m21.value, m21.random_error, n21.mean,
                    n21.half_width) +
                (ex ? "worked examples reproduced" : "worked examples NOT reproduced")};
}

Outcome c10_edge_fit() {
    const EdgeParams truth{3.5675e-11, 6.013e-13, 6.01e-15, 1.03e-16, -2e-4};
    const double hw[4] = {3e-15, 1e-15, 6e-17, 1e-17};  // quoted half-widths of F, f0, f1, f2
    int within[4] = {0, 0, 0, 0}, own = 0, hier = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        auto h = synthesize_harmonics(truth, 21, 0.6e-15, 7000 + t);
        auto r = fit_harmonics(h, 0.99);
        double est[4] = {r.F_abs, r.f0, r.f1, r.f2}, tv[4] = {truth.F_abs, truth.f0, truth.f1, truth.f2};
        for (int k = 0; k < 4; ++k) within[k] += std::abs(est[k] - tv[k]) <= hw[k];
        own += std::abs(r.delta - truth.delta) <= r.ci_delta;
        double bo = 0, ce = 0, be = 0, co = 0;
        for (const auto& [m, x] : h) {
            if (m % 2) {
                bo = std::max(bo, std::abs(x.b));
                co = std::max(co, std::abs(x.c));
            } else {
                ce = std::max(ce, std::abs(x.c));
                be = std::max(be, std::abs(x.b));
            }
        }
        double r_bc = bo / ce, r_cb = ce / std::max(be, co), r_eo = be / co;
        hier += r_bc >= 10 && r_cb >= 10 && r_eo > 0.1 && r_eo < 10;
    }
    bool ok = hier == trials && own >= 0.95 * trials;
    for (int k = 0; k < 4; ++k) ok = ok && within[k] >= 0.95 * trials;
    return {ok, fmt("within quoted CI: F %.1f%%, f0 %.1f%%, f1 %.1f%%, f2 %.1f%%; ", within[0] / 5.0, within[1] / 5.0,
                    within[2] / 5.0, within[3] / 5.0) +
                    fmt("delta within own 99%% CI %.1f%%; hierarchy held in %.0f/500", own / 5.0, hier)};
}

Outcome c11_error_combination() {
    double a = combine_errors({0.2e-15, 0.6e-15, 85e-15}) * 1e15;
    double b = combine_errors({0.2e-15, 0.6e-15, 0.5e-15}) * 1e15;
    double dz = combine_errors({0.6e-9, 0.2e-9, 1.2e-9}) * 1e9;
    bool lin = std::abs(a - 85.8) < 1e-9;
    bool quad = std::abs(b - 0.9) < 0.01;
    return {lin && quad && std::abs(dz - 1.5) < 0.05,
            fmt("short z %.4f fN (85.8), long z %.4f fN (~0.9), dz %.3f nm (~1.5)", a, b, dz)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    std::string summary_path;  // --summary FILE: also write the summary there
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--summary" && i + 1 < argc)
            summary_path = argv[++i];
        else
            only.insert(std::atoi(argv[i]));
    }
    struct Crit {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    // cheap first so the quick answers show up early
    std::vector<Crit> crits = {
        {3, "zero-frequency identity", c3_zero_frequency},
        {7, "minimum detectable force", c7_min_force},
        {8, "electrostatic oracle", c8_electrostatic},
        {9, "median method", c9_median},
        {10, "edge-fit recovery", c10_edge_fit},
        {11, "error combination", c11_error_combination},
        {2, "energy-force consistency", c2_energy_force},
        {6, "model discrimination", c6_model_discrimination},
        {1, "DE/scattering cross-validation", c1_de_cross_validation},
        {5, "PFA limit", c5_pfa_limit},
        {4, "quadrature scaling", c4_quadrature},
    };
    std::map<int, std::string> lines;
    int failed = 0;
    for (const auto& c : crits) {
        if (!only.empty() && !only.count(c.id)) continue;
        double t = now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        char head[160];
        std::snprintf(head, sizeof head, "%s criterion %2d: %s [%.1f s] ", o.pass ? "PASS" : "FAIL", c.id, c.name,
                      now() - t);
        lines[c.id] = head + o.detail;
        std::fprintf(stderr, "%s\n", lines[c.id].c_str());
        failed += !o.pass;
    }
    std::string text = "acceptance summary\n";
    for (const auto& [id, line] : lines) text += line + "\n";
    text += std::to_string(failed) + " of " + std::to_string(lines.size()) + " criteria failed\n";
    std::fputs(text.c_str(), stdout);
    if (!summary_path.empty()) {
        if (FILE* f = std::fopen(summary_path.c_str(), "w")) {
            std::fputs(text.c_str(), f);
            std::fclose(f);
        }
    }
    return failed ? 1 : 0;
}
