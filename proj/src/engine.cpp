#include "casimir/engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"
#include "casimir/kernels.hpp"
#include "casimir/spectrum.hpp"

namespace casimir {

using constants::c;
using constants::kB;
using constants::pi;

void validate(const Geometry& g) {
    if (!(g.R > 0) || !(g.z > 0)) throw ConfigError("geometry: need R > 0 and z > 0");
}

double ForceResult::force_l0() const {
    for (const auto& t : per_l)
        if (t.l == 0) return t.force;
    return 0.0;
}

QuadratureSpec quadrature_for(const Geometry& g, const EngineOptions& opt, double K) {
    QuadratureSpec q = opt.quad ? *opt.quad : auto_quadrature(g.R, g.z);
    if (opt.per_l_scale && K > 0) q.a = std::max(q.a, std::sqrt(q.a * K));
    validate(q);
    return q;
}

TermValue matsubara_term(const Geometry& g, const Materials& mat, double K, const EngineOptions& opt) {
    KernelContext ctx;
    ctx.K = K;
    ctx.R = g.R;
    ctx.z = g.z;
    ctx.sphere = mat.sphere;
    ctx.plate = mat.plate;
    ctx.term_tol = opt.term_tol;
    RoundTripOperator op(ctx, quadrature_for(g, opt, K), opt.cut);
    auto ev = op.evaluate(opt.with_force, true, opt.m_tol);
    return {ev.logdet, ev.trace};
}

ForceResult casimir_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, const EngineOptions& opt) {
    validate(g);
    if (!(th.T > 0) || !(th.rel_tol > 0 && th.rel_tol < 1) || th.l_max_cap < 1)
        throw ConfigError("thermal: need T > 0, 0 < rel_tol < 1, l_max_cap >= 1");
    ForceResult res;
    res.quad = opt.quad ? *opt.quad : auto_quadrature(g.R, g.z);
    const double kT = kB * th.T;
    int l = opt.filter == LFilter::NonZeroOnly ? 1 : 0;
    int quiet = 0;
    for (;; ++l) {
        double xi = matsubara_frequency(th, l);
        TermValue tv = matsubara_term(g, mat, xi / c, opt);
        double w = l == 0 ? 0.5 : 1.0;
        MatsubaraTerm t{l, xi, kT * w * tv.logdet, kT * w * tv.trace};
        res.per_l.push_back(t);
        res.free_energy += t.energy;
        res.force += t.force;
        res.l_used = l;
        if (opt.filter == LFilter::ZeroOnly) {
            res.converged = true;
            break;
        }
        if (opt.fixed_l_max >= 0) {
            if (l >= opt.fixed_l_max) {
                res.converged = true;
                break;
            }
            continue;
        }
        bool small = std::abs(t.energy) <= th.rel_tol * std::abs(res.free_energy) &&
                     (!opt.with_force || std::abs(t.force) <= th.rel_tol * std::abs(res.force));
        quiet = small ? quiet + 1 : 0;
        if (quiet >= 3) {
            res.converged = true;
            break;
        }
        if (l >= th.l_max_cap)
            throw NonConvergence("Matsubara sum not converged within l_max_cap=" + std::to_string(th.l_max_cap));
    }
    return res;
}

double casimir_free_energy(const Geometry& g, const Materials& mat, const ThermalSpec& th, EngineOptions opt) {
    opt.with_force = false;
    return casimir_force(g, mat, th, opt).free_energy;
}

double classical_force_term(const Geometry& g, const Materials& mat, const ThermalSpec& th, EngineOptions opt,
                            bool tm_only) {
    opt.filter = LFilter::ZeroOnly;
    opt.with_force = true;
    Materials m = mat;
    // At xi = 0 only the zero-frequency kind matters; a Drude plate has r_TE = 0
    // and leaves the TM channel untouched.
    if (tm_only && m.plate.zero_frequency_kind() != ZeroFrequencyKind::Vacuum) m.plate = MaterialModel::drude(1.0, 0.0);
    return casimir_force(g, m, th, opt).force;
}

double pfa_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, LFilter filter, const PfaOptions& opt) {
    validate(g);
    const double kT = kB * th.T;
    const double z = g.z;
    double sum = 0.0;
    int quiet = 0;
    int l = filter == LFilter::NonZeroOnly ? 1 : 0;
    for (;; ++l) {
        double K = matsubara_frequency(th, l) / c;
        QuadratureSpec qs{opt.N, 2, 1.0 / z};
        if (K > 0) qs.a = std::max(qs.a, std::sqrt(qs.a * K));
        Quadrature q = build_quadrature(qs);
        double integral = 0.0;
        for (int i = opt.N - 1; i >= 0; --i) {
            double k = q.k[i];
            FresnelPair r = K > 0 ? fresnel(mat.plate, K, k) : zero_frequency_fresnel(mat.plate, k);
            FresnelPair s = K > 0 ? fresnel(mat.sphere, K, k) : zero_frequency_fresnel(mat.sphere, k);
            double kappa = std::sqrt(K * K + k * k);
            double e = std::exp(-2.0 * kappa * z);
            double v = std::log1p(-r.te * s.te * e) + std::log1p(-r.tm * s.tm * e);
            integral += k * q.w[i] * v;
        }
        double term = (l == 0 ? 0.5 : 1.0) * kT * integral / (2.0 * pi);
        sum += term;
        if (filter == LFilter::ZeroOnly) break;
        if (opt.fixed_l_max >= 0) {
            if (l >= opt.fixed_l_max) break;
            continue;
        }
        quiet = std::abs(term) <= th.rel_tol * std::abs(sum) ? quiet + 1 : 0;
        if (quiet >= 3) break;
        if (l >= th.l_max_cap) throw NonConvergence("PFA Matsubara sum not converged within l_max_cap");
    }
    return 2.0 * pi * g.R * sum;
}

ThetaTable::ThetaTable(std::vector<ThetaRow> rows) : rows_(std::move(rows)) {
    for (size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!(r.z > 0) || !std::isfinite(r.theta_drude) || !std::isfinite(r.theta_plasma))
            throw ConfigError("theta table: row " + std::to_string(i + 1) + " invalid");
        if (i > 0 && !(r.z > rows_[i - 1].z)) throw ConfigError("theta table: z column must increase");
    }
}

ThetaTable ThetaTable::load(std::istream& in) {
    std::vector<ThetaRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        ThetaRow r;
        std::string extra;
        if (!(ss >> r.z >> r.theta_drude >> r.theta_plasma) || (ss >> extra))
            throw ConfigError("theta table line " + std::to_string(lineno) + ": expected 'z_m theta_drude theta_plasma'");
        rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("theta table: no rows");
    return ThetaTable(std::move(rows));
}

void ThetaTable::save(std::ostream& out) const {
    char buf[128];
    for (const auto& r : rows_) {
        std::snprintf(buf, sizeof buf, "%.17e %.17e %.17e\n", r.z, r.theta_drude, r.theta_plasma);
        out << buf;
    }
}

double ThetaTable::theta(double z, ZeroFrequencyKind kind) const {
    if (rows_.empty()) throw ConfigError("theta table: empty");
    auto pick = [kind](const ThetaRow& r) { return kind == ZeroFrequencyKind::Plasma ? r.theta_plasma : r.theta_drude; };
    const double tol = 1e-9 * z;
    if (z < rows_.front().z - tol || z > rows_.back().z + tol)
        throw ConfigError("theta table: z=" + std::to_string(z) + " outside the tabulated range");
    if (rows_.size() == 1 || z <= rows_.front().z) return pick(rows_.front());
    if (z >= rows_.back().z) return pick(rows_.back());
    auto it = std::upper_bound(rows_.begin(), rows_.end(), z, [](double v, const ThetaRow& r) { return v < r.z; });
    const ThetaRow& hi = *it;
    const ThetaRow& lo = *(it - 1);
    double s = (z - lo.z) / (hi.z - lo.z);
    return pick(lo) + s * (pick(hi) - pick(lo));
}

DEResult de_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, double theta, const EngineOptions& opt,
                  const PfaOptions& popt) {
    validate(g);
    if (!std::isfinite(theta)) throw ConfigError("de_force: theta must be finite");
    DEResult r;
    r.theta = theta;
    r.classical = classical_force_term(g, mat, th, opt);
    r.pfa_nonzero = pfa_force(g, mat, th, LFilter::NonZeroOnly, popt);
    r.force = r.classical + r.pfa_nonzero * (1.0 - theta * g.z / g.R);
    return r;
}

double theta_from_forces(double exact_nonzero, double pfa_nonzero, double R, double z) {
    return (1.0 - exact_nonzero / pfa_nonzero) * R / z;
}

std::vector<ThetaPoint> derive_theta(double R, const std::vector<double>& zs, const Materials& mat,
                                     const ThermalSpec& th, const EngineOptions& opt, bool check_2R,
                                     const PfaOptions& popt) {
    std::vector<ThetaPoint> out;
    EngineOptions o = opt;
    o.filter = LFilter::NonZeroOnly;
    for (double z : zs) {
        ThetaPoint p;
        p.z = z;
        Geometry g{R, z};
        p.exact_nonzero = casimir_force(g, mat, th, o).force;
        p.pfa_nonzero = pfa_force(g, mat, th, LFilter::NonZeroOnly, popt);
        p.theta = theta_from_forces(p.exact_nonzero, p.pfa_nonzero, R, z);
        p.theta_2R = std::numeric_limits<double>::quiet_NaN();
        if (check_2R) {
            Geometry g2{2.0 * R, z};
            double e2 = casimir_force(g2, mat, th, o).force;
            double p2 = pfa_force(g2, mat, th, LFilter::NonZeroOnly, popt);
            p.theta_2R = theta_from_forces(e2, p2, 2.0 * R, z);
            if (std::abs(p.theta_2R / p.theta - 1.0) > 0.05)
                throw NumericalFault("derive_theta: z=" + std::to_string(z) +
                                     " outside the asymptotic regime (theta at R and 2R differ by >5%)");
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace casimir
