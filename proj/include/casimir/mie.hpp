#pragma once

#include <vector>

namespace casimir {

// r[l] = I_{l+1/2}(x) / I_{l-1/2}(x) for l = 0..lmax.
std::vector<double> bessel_i_ratios(double x, int lmax);

struct MieCoefficients {
    double a;
    double b;
};

// Sphere Mie coefficients on the imaginary axis, plain (unscaled) values.
// Underflows to 0 for l far beyond x; use MieSeries for scaled access.
MieCoefficients mie_coefficients(double n, double x, int l);

// Scaled Mie data for l = 1..lmax at fixed (n, x), with at = (-1)^l a:
//   |at_1|            = exp(log_abs_a1)
//   |at_l / at_{l-1}| = step[l]
//   sign(at_l)        = sign[l]
//   b_l / a_l         = beta[l]
struct MieSeries {
    double n = 1.0;
    double x = 0.0;
    int lmax = 0;
    double log_abs_a1 = 0.0;
    std::vector<double> step;
    std::vector<double> sign;
    std::vector<double> beta;

    static MieSeries compute(double n, double x, int lmax);
    double log_abs_a(int l) const;
};

// Low-frequency magnetic coefficient of the plasma model, l = 0..lmax (index 0 unused).
std::vector<double> plasma_B(double KpR, int lmax);

}  // namespace casimir
