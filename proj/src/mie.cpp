#include "casimir/mie.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

// I_{nu}(x)/I_{nu-1}(x) = 1/(2nu/x + 1/(2(nu+1)/x + ...)), modified Lentz.
double bessel_i_cf(double nu, double x) {
    const double tiny = 1e-300;
    const double eps = 1e-16;
    const int maxit = 100000 + 20 * static_cast<int>(x);
    double f = 2.0 * nu / x;
    if (f == 0) f = tiny;
    double C = f, D = 0.0;
    for (int j = 1; j < maxit; ++j) {
        double b = 2.0 * (nu + j) / x;
        D = b + D;
        if (D == 0) D = tiny;
        C = b + 1.0 / C;
        if (C == 0) C = tiny;
        D = 1.0 / D;
        double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) return 1.0 / f;
    }
    throw NonConvergence("bessel continued fraction did not converge (x=" + std::to_string(x) + ")");
}

double log_sinh(double x) {
    if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

}  // namespace

std::vector<double> bessel_i_ratios(double x, int lmax) {
    if (!(x > 0)) throw ConfigError("bessel_i_ratios: x must be > 0");
    std::vector<double> r(lmax + 1);
    r[lmax] = bessel_i_cf(lmax + 0.5, x);
    for (int l = lmax - 1; l >= 0; --l) r[l] = 1.0 / ((2.0 * l + 1.0) / x + r[l + 1]);
    return r;
}

MieSeries MieSeries::compute(double n, double x, int lmax) {
    if (!(x > 0) || !(n > 1.0) || lmax < 1) throw ConfigError("mie: need x > 0, n > 1, lmax >= 1");
    MieSeries m;
    m.n = n;
    m.x = x;
    m.lmax = lmax;
    m.step.assign(lmax + 1, 0.0);
    m.sign.assign(lmax + 1, 0.0);
    m.beta.assign(lmax + 1, 0.0);

    const double nx = n * x;
    std::vector<double> r = bessel_i_ratios(x, lmax);
    std::vector<double> rho = bessel_i_ratios(nx, lmax);

    double q = 1.0 + 1.0 / x;  // K_{3/2}/K_{1/2}
    double Fprev = 0.0, rq_prev = 0.0;
    for (int l = 1; l <= lmax; ++l) {
        double rl = r[l], pl = rho[l];
        double t = nx - l * pl;
        double Na = n * n * pl * (x - l * rl) - rl * t;
        double Da = n * n * pl * (x + l * q) + q * t;
        double Nb = x * (n * rl - pl);
        double Db = pl * (x + l * q) + q * t;
        double Fa = Na / Da;
        double Fb = Nb / Db;
        if (!std::isfinite(Fa) || !std::isfinite(Fb) || Fa == 0.0)
            throw NumericalFault("mie: lost significance at l=" + std::to_string(l));
        m.sign[l] = Fa > 0 ? 1.0 : -1.0;
        m.beta[l] = -Fb / Fa;
        if (l == 1) {
            // L_1 = ln(I_{1/2}(x)/K_{1/2}(x))
            long double L1 = (long double)log_sinh(x) + 0.5L * std::log(2.0L / (constants::pi * x)) -
                             (0.5L * std::log((long double)constants::pi / (2.0L * x)) - x);
            m.log_abs_a1 = (double)(L1 + std::log((long double)constants::pi / 2.0L) + std::log(std::abs((long double)Fa)));
        } else {
            m.step[l] = rq_prev * std::abs(Fa / Fprev);
        }
        Fprev = Fa;
        rq_prev = rl / q;
        q = 1.0 / q + (2.0 * l + 1.0) / x;
    }
    return m;
}

double MieSeries::log_abs_a(int l) const {
    long double s = log_abs_a1;
    for (int k = 2; k <= l; ++k) s += std::log((long double)step[k]);
    return (double)s;
}

MieCoefficients mie_coefficients(double n, double x, int l) {
    if (l < 1) throw ConfigError("mie_coefficients: l must be >= 1");
    MieSeries m = MieSeries::compute(n, x, l);
    double at = m.sign[l] * std::exp(m.log_abs_a(l));
    double a = (l % 2 == 0) ? at : -at;
    return {a, a * m.beta[l]};
}

std::vector<double> plasma_B(double KpR, int lmax) {
    std::vector<double> B(lmax + 1, 0.0);
    std::vector<double> r = bessel_i_ratios(KpR, lmax);
    for (int l = 1; l <= lmax; ++l)
        B[l] = -double(l) / (l + 1.0) * (1.0 - (2.0 * l + 1.0) / KpR * r[l]);
    return B;
}

}  // namespace casimir
