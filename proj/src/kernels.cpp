#include "casimir/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

using constants::pi;

FresnelPair fresnel(const MaterialModel& m, double K, double k) {
    if (!(K > 0)) throw ConfigError("fresnel: K must be > 0 (use zero_frequency_fresnel)");
    if (m.is_vacuum()) return {0.0, 0.0};
    double eps = m.permittivity(K * constants::c);
    double kappa = std::sqrt(K * K + k * k);
    double root = std::sqrt((eps - 1.0) * K * K + kappa * kappa);
    return {(kappa - root) / (kappa + root), (eps * kappa - root) / (eps * kappa + root)};
}

FresnelPair zero_frequency_fresnel(const MaterialModel& m, double k) {
    switch (m.zero_frequency_kind()) {
    case ZeroFrequencyKind::Vacuum:
        return {0.0, 0.0};
    case ZeroFrequencyKind::Drude:
        return {0.0, 1.0};
    case ZeroFrequencyKind::Plasma: {
        double Kp = m.plasma_wavenumber();
        double root = std::sqrt(Kp * Kp + k * k);
        // (k - root)/(k + root) without cancellation at large k
        return {-Kp * Kp / ((k + root) * (k + root)), 1.0};
    }
    }
    return {0.0, 0.0};
}

namespace {

struct RotationGeometry {
    double kappa, kappap, Q, P, c, s, onepc, g1, g2;
};

RotationGeometry rotation_geometry(double k, double kp, double dphi, double K) {
    RotationGeometry g;
    g.kappa = std::sqrt(K * K + k * k);
    g.kappap = std::sqrt(K * K + kp * kp);
    g.Q = k * kp;
    g.P = g.kappa * g.kappap;
    g.c = std::cos(dphi);
    g.s = std::sin(dphi);
    double ch = std::cos(0.5 * dphi);
    g.onepc = 2.0 * ch * ch;
    double dk = k - kp;
    // K^2 - P - Q cos = -g1, K^2 + P + Q cos = g2
    g.g1 = K * K * dk * dk / (g.P + g.Q + K * K) + g.Q * g.onepc;
    g.g2 = K * K + g.Q * g.c + g.P;
    return g;
}

Rotation rotation_from(const RotationGeometry& g, double k, double kp, double K) {
    double den = g.g1 * g.g2;  // = -(K^4 - (Q cos + P)^2)
    double s2 = g.s * g.s;
    Rotation r;
    r.A = g.c + (g.P + g.Q * g.c) * g.Q * s2 / den;
    r.B = K * K * g.Q * s2 / den;
    r.C = -K * g.s * (g.Q * g.kappa * g.c + k * k * g.kappap) / den;
    r.D = K * g.s * (g.Q * g.kappap * g.c + kp * kp * g.kappa) / den;
    return r;
}

}  // namespace

Rotation polarization_rotation(double k, double kp, double dphi, double K) {
    if (!(K > 0)) return {1.0, 0.0, 0.0, 0.0};
    RotationGeometry g = rotation_geometry(k, kp, dphi, K);
    if (!(g.g1 > 0)) throw RemovableSingularity("polarization_rotation: backscattering point k=k', dphi=pi");
    return rotation_from(g, k, kp, K);
}

PiTau angular_functions(double mu, int l) {
    if (l < 1) throw ConfigError("angular_functions: l must be >= 1");
    double pm2 = 0.0, pm1 = 1.0;  // pi_0, pi_1
    for (int j = 2; j <= l; ++j) {
        double p = ((2.0 * j - 1.0) * mu * pm1 - j * pm2) / (j - 1.0);
        pm2 = pm1;
        pm1 = p;
    }
    return {pm1, l * mu * pm1 - (l + 1.0) * pm2};
}

SphereScatterer::SphereScatterer(double K, double R, const MaterialModel& sphere, int l_cap, double term_tol,
                                 bool truncate_at_cap)
    : K_(K), R_(R), tol_(term_tol), truncate_at_cap_(truncate_at_cap) {
    if (!(K > 0) || !(R > 0)) throw ConfigError("SphereScatterer: need K > 0 and R > 0");
    double x = K * R;
    int cap = l_cap > 0 ? l_cap : std::max(10000, 20 * static_cast<int>(std::ceil(x)));
    double eps = sphere.permittivity(K * constants::c);
    if (sphere.is_vacuum() || eps <= 1.0) {
        vacuum_ = true;
        mie_.lmax = cap;
        return;
    }
    mie_ = MieSeries::compute(std::sqrt(eps), x, cap);
    gain_.assign(cap + 1, 0.0);
    alpha_.assign(cap + 1, 0.0);
    betar_.assign(cap + 1, 0.0);
    for (int l = 1; l <= cap; ++l) {
        gain_[l] = (2.0 * l + 1.0) / (l * (l + 1.0)) * mie_.sign[l];
        if (l >= 2) {
            alpha_[l] = (2.0 * l - 1.0) / (l - 1.0);
            betar_[l] = double(l) / (l - 1.0);
        }
    }
}

double SphereScatterer::peak_l(double y) const { return R_ * K_ * std::sqrt(0.5 * (1.0 + y)); }

Amplitudes SphereScatterer::amplitudes_scaled(double ym1, double lp) const {
    if (vacuum_) return {0.0, 0.0};
    constexpr double BIG = 1e150;
    constexpr double SMALL = 1e-150;
    const double LBIG = std::log(BIG);

    const double y = 1.0 + ym1;
    const double sq = std::sqrt(ym1 * (y + 1.0));
    const double chi = std::log1p(ym1 + sq);
    const double ech = y + sq;
    const double w = 1.0 / ech;
    const double w2 = w * w;
    const double h = 0.5 * (1.0 + w2);

    double logE = mie_.log_abs_a1 + chi + lp;
    int sc = static_cast<int>(std::floor(logE / LBIG));
    double E = std::exp(logE - sc * LBIG);

    double S1 = 0.0, S2 = 0.0;
    double pm2 = 0.0, pm1 = 0.0, p = w;  // scaled pi_{l-2}, pi_{l-1}, pi_l
    double prev = 0.0;
    int quiet = 0;
    const int L = mie_.lmax;
    int l = 1;
    for (;; ++l) {
        if (l >= 2) {
            pm2 = pm1;
            pm1 = p;
            p = alpha_[l] * h * pm1 - betar_[l] * w2 * pm2;
            E *= mie_.step[l] * ech;
        }
        double tau = l * y * p - (l + 1.0) * w * pm1;
        double g = gain_[l] * E;
        double be = mie_.beta[l];
        double t1 = g * (be * tau - p);
        double t2 = g * (tau - be * p);
        S1 += t1;
        S2 += t2;
        double mag = std::abs(t1) + std::abs(t2);
        if (mag < prev && std::abs(t1) <= tol_ * std::abs(S1) && std::abs(t2) <= tol_ * std::abs(S2)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        prev = mag;
        if (E > BIG) {
            E *= SMALL;
            S1 *= SMALL;
            S2 *= SMALL;
            prev *= SMALL;
            ++sc;
        } else if (E < SMALL && std::abs(S1) + std::abs(S2) < 1.0) {
            E *= BIG;
            S1 *= BIG;
            S2 *= BIG;
            prev *= BIG;
            --sc;
        }
        if (l >= L) {
            if (truncate_at_cap_) break;
            throw NonConvergence("scattering amplitudes: l_cap=" + std::to_string(L) + " reached (y=" +
                                 std::to_string(y) + ")");
        }
    }
    if (sc != 0) {
        double f = std::exp(sc * LBIG);
        S1 *= f;
        S2 *= f;
    }
    return {S1, S2};
}

Amplitudes SphereScatterer::amplitudes(double cos_theta) const {
    if (!(cos_theta <= -1.0)) throw ConfigError("amplitudes: cos(Theta) must be <= -1 on the imaginary axis");
    return amplitudes_scaled(-cos_theta - 1.0, 0.0);
}

SphereScatterer::Block SphereScatterer::reflection(double k, double kp, double dphi, double lp) const {
    if (vacuum_) return {0.0, 0.0, 0.0, 0.0};
    RotationGeometry g = rotation_geometry(k, kp, dphi, K_);
    double pref = lp + std::log(2.0 * pi / (K_ * g.kappap));
    if (!(g.g1 > 0)) {
        Amplitudes S = amplitudes_scaled(0.0, pref);
        return {-S.S2, -S.S1, 0.0, 0.0};
    }
    Rotation r = rotation_from(g, k, kp, K_);
    Amplitudes S = amplitudes_scaled(g.g1 / (K_ * K_), pref);
    return {r.A * S.S2 + r.B * S.S1, r.A * S.S1 + r.B * S.S2, -(r.C * S.S1 + r.D * S.S2), r.C * S.S2 + r.D * S.S1};
}

void SphereScatterer::reflection_pair(double k, double kp, double dphi, double lp, Block& fwd, Block& bwd) const {
    if (vacuum_) {
        fwd = bwd = {0.0, 0.0, 0.0, 0.0};
        return;
    }
    RotationGeometry g = rotation_geometry(k, kp, dphi, K_);
    double base = lp + std::log(2.0 * pi / K_);
    if (!(g.g1 > 0)) {
        Amplitudes S = amplitudes_scaled(0.0, base);
        fwd = {-S.S2 / g.kappap, -S.S1 / g.kappap, 0.0, 0.0};
        bwd = {-S.S2 / g.kappa, -S.S1 / g.kappa, 0.0, 0.0};
        return;
    }
    Rotation r = rotation_from(g, k, kp, K_);
    Amplitudes S = amplitudes_scaled(g.g1 / (K_ * K_), base);
    double like_tm = r.A * S.S2 + r.B * S.S1;
    double like_te = r.A * S.S1 + r.B * S.S2;
    double f = 1.0 / g.kappap, b = 1.0 / g.kappa;
    fwd = {f * like_tm, f * like_te, -f * (r.C * S.S1 + r.D * S.S2), f * (r.C * S.S2 + r.D * S.S1)};
    // swapping k and kp: C -> -D, D -> -C
    bwd = {b * like_tm, b * like_te, b * (r.D * S.S1 + r.C * S.S2), -b * (r.D * S.S2 + r.C * S.S1)};
}

double roundtrip_kernel(const KernelContext& ctx, const PlaneWaveLabel& in, const PlaneWaveLabel& out) {
    if (!(ctx.K > 0)) throw ConfigError("roundtrip_kernel: K must be > 0");
    SphereScatterer sc(ctx.K, ctx.R, ctx.sphere, ctx.l_cap, ctx.term_tol);
    FresnelPair rp = fresnel(ctx.plate, ctx.K, in.k);
    double kappa = std::sqrt(ctx.K * ctx.K + in.k * in.k);
    double kappap = std::sqrt(ctx.K * ctx.K + out.k * out.k);
    double lp = -(kappa + kappap) * (ctx.z + ctx.R);
    auto b = sc.reflection(in.k, out.k, out.phi - in.phi, lp);
    double r = in.pol == Pol::TE ? rp.te : rp.tm;
    if (out.pol == Pol::TM) return r * (in.pol == Pol::TM ? b.tmtm : b.tmte);
    return r * (in.pol == Pol::TE ? b.tete : b.tetm);
}

namespace {

// dphi folded into [0, pi]
double fold_angle(double dphi) {
    double t = std::fmod(std::abs(dphi), 2.0 * pi);
    return t > pi ? 2.0 * pi - t : t;
}

// sum_{l>=1} B_l u^{2l}/(2l)! * exp(lp), summed outward from the peak.
double te_series(const std::vector<double>& B, double u, double lp) {
    if (u <= 0.0) return 0.0;
    const int L = static_cast<int>(B.size()) - 1;
    int l0 = std::max(1, static_cast<int>(std::lround(0.5 * u)));
    if (l0 > L) throw NonConvergence("zero-frequency TE series: cap exceeded");
    const double lu = std::log(u);
    double t0 = std::exp(2.0 * l0 * lu - std::lgamma(2.0 * l0 + 1.0) + lp);
    double sum = B[l0] * t0;
    double t = t0;
    for (int l = l0 + 1;; ++l) {
        t *= u * u / ((2.0 * l) * (2.0 * l - 1.0));
        if (l > L) {
            if (t == 0.0 || t < 1e-17 * std::abs(sum)) break;
            throw NonConvergence("zero-frequency TE series: cap exceeded");
        }
        double term = B[l] * t;
        sum += term;
        if (t == 0.0 || std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    t = t0;
    for (int l = l0 - 1; l >= 1; --l) {
        t *= (2.0 * (l + 1)) * (2.0 * (l + 1) - 1.0) / (u * u);
        double term = B[l] * t;
        sum += term;
        if (t == 0.0 || std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

double zero_frequency_kernel(const MaterialModel& m, double k, double kp, double dphi, double R, Pol out, Pol in) {
    if (out != in) return 0.0;
    if (m.zero_frequency_kind() == ZeroFrequencyKind::Vacuum) return 0.0;
    double th = fold_angle(dphi);
    double u = 2.0 * R * std::sqrt(k * kp) * std::cos(0.5 * th);
    if (out == Pol::TM) return 2.0 * pi * R / kp * (std::cosh(u) - 1.0);
    if (m.zero_frequency_kind() != ZeroFrequencyKind::Plasma) return 0.0;
    int L = static_cast<int>(0.5 * u + 20.0 * std::sqrt(u + 1.0) + 60.0);
    auto B = plasma_B(m.plasma_wavenumber() * R, L);
    return 2.0 * pi * R / kp * te_series(B, u, 0.0);
}

ZeroFrequencyKernel::ZeroFrequencyKernel(const MaterialModel& sphere, const MaterialModel& plate, double R, double z,
                                         int lmax_hint)
    : plate_(plate), R_(R), z_(z) {
    sphere_ok_ = sphere.zero_frequency_kind() != ZeroFrequencyKind::Vacuum &&
                 plate.zero_frequency_kind() != ZeroFrequencyKind::Vacuum;
    te_ = sphere_ok_ && sphere.zero_frequency_kind() == ZeroFrequencyKind::Plasma &&
          plate.zero_frequency_kind() == ZeroFrequencyKind::Plasma;
    if (te_) {
        KpR_ = sphere.plasma_wavenumber() * R;
        B_ = plasma_B(KpR_, std::max(lmax_hint, 100));
    }
}

double ZeroFrequencyKernel::tmtm(double k, double kp, double dphi, double lp) const {
    if (!sphere_ok_) return 0.0;
    double th = fold_angle(dphi);
    double sk = std::sqrt(k), skp = std::sqrt(kp);
    double u = 2.0 * R_ * sk * skp * std::cos(0.5 * th);
    double s4 = std::sin(0.25 * th);
    double E = -(k + kp) * z_ - R_ * (sk - skp) * (sk - skp) - 4.0 * R_ * sk * skp * s4 * s4;
    double em = -std::expm1(-u);
    return 2.0 * pi * R_ / kp * std::exp(E + lp) * 0.5 * em * em;
}

double ZeroFrequencyKernel::tete(double k, double kp, double dphi, double lp) const {
    if (!te_) return 0.0;
    double th = fold_angle(dphi);
    double u = 2.0 * R_ * std::sqrt(k * kp) * std::cos(0.5 * th);
    double rte = zero_frequency_fresnel(plate_, k).te;
    return rte * 2.0 * pi * R_ / kp * te_series(B_, u, -(k + kp) * (z_ + R_) + lp);
}

}  // namespace casimir
