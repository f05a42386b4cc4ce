#include "casimir/experiment.hpp"

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

using constants::pi;

double electrostatic_force(double z, double R, double V, double V0) {
    if (!(z > 0) || !(R > 0)) throw ConfigError("electrostatic_force: need z > 0 and R > 0");
    const double dV = V - V0;
    if (dV == 0.0) return 0.0;
    // cosh u = 1 + z/R
    const double u = std::acosh(1.0 + z / R);
    const double cu = 1.0 / std::tanh(u);
    double sum = 0.0;
    for (int n = 1;; ++n) {
        double nu = n * u;
        if (nu > 700.0) break;
        double term = (cu - n / std::tanh(nu)) / std::sinh(nu);
        sum += term;
        if (std::abs(term) < 1e-12 * std::abs(sum)) break;
        if (n > 100000000) throw NonConvergence("electrostatic_force: series did not converge");
    }
    return 2.0 * pi * constants::eps0 * dV * dV * sum;
}

double separation(double z_meas, const CalibrationState& cal, double alpha) {
    if (!(std::abs(alpha) < 1e-4)) throw ConfigError("separation: |alpha| must be < 1e-4 rad");
    if (!(cal.D1_plus_D2 > 0)) throw ConfigError("separation: D1+D2 must be > 0");
    double z = z_meas - cal.D1_plus_D2 - cal.b * alpha;
    if (!(z > 0)) throw GeometryFault("separation: reconstructed z is not positive");
    return z;
}

PatchForce patch_force(double z, double R, double V_rms, double l_bar) {
    if (!(z > 0)) throw ConfigError("patch_force: z must be > 0");
    double F = -pi * constants::zeta3 * R * constants::eps0 * V_rms * V_rms * l_bar * l_bar / (2.0 * z * z * z);
    return {F, z < 7e-6};
}

double oscillator_psd(const OscillatorParams& p, double f) {
    if (!(f > 0)) throw ConfigError("oscillator_psd: f must be > 0");
    const double fr2 = p.f_r * p.f_r;
    const double d = fr2 - f * f;
    const double lor = fr2 * fr2 / (d * d + f * f * fr2 / (p.Q * p.Q));
    return 2.0 * constants::kB * p.T / (pi * p.kappa * p.Q * p.f_r) * lor + p.S_elec;
}

double min_detectable_force(const OscillatorParams& p) {
    if (!(p.kappa > 0) || !(p.Q > 0) || !(p.f_r > 0) || !(p.b > 0) || !(p.T > 0))
        throw ConfigError("min_detectable_force: parameters must be positive");
    return std::sqrt(2.0 * p.kappa * constants::kB * p.T / (pi * p.Q * p.f_r)) / p.b;
}

double rotation_frequency(double f_r, int n_tr, int m) {
    if (n_tr < 1 || m < 1) throw ConfigError("rotation_frequency: need n_tr >= 1 and m >= 1");
    return 2.0 * pi * f_r / (static_cast<double>(m) * n_tr);
}

}  // namespace casimir
