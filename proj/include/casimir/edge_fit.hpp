#pragma once

#include <cstdint>
#include <istream>
#include <map>

namespace casimir {

struct Harmonic {
    double b;  // sine coefficient, N
    double c;  // cosine coefficient, N
};

// m -> (b_m, c_m), m contiguous from 1.
using HarmonicSet = std::map<int, Harmonic>;

struct EdgeParams {
    double F_abs;  // N
    double f0, f1, f2;
    double delta;  // rad
};

HarmonicSet synthesize_harmonics(const EdgeParams& p, int m_max, double sigma, std::uint64_t seed);

struct EdgeFitResult {
    double F_abs, f0, f1, f2, delta;
    double sigma;
    double confidence;
    int dof;
    // CI half-widths at `confidence`
    double ci_F, ci_f0, ci_f1, ci_f2, ci_delta;
    // validation data, not fitted
    double b_even_rms_residual;
    double c_odd_slope, c_odd_slope_se;
    int n_odd_sines, n_even_cosines;
};

EdgeFitResult fit_harmonics(const HarmonicSet& data, double confidence = 0.99);

// pi/4 rule for a Heaviside signal.
double harmonic_to_force(double first_harmonic_amplitude);

// Rows `m b_m c_m`, '#' comments.
HarmonicSet load_harmonics(std::istream& in);

}  // namespace casimir
