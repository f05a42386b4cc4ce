#pragma once

#include <istream>
#include <vector>

namespace casimir {

struct RunSeries {
    double z = 0.0;               // m
    std::vector<double> samples;  // N
};

struct MedianEstimate {
    double z = 0.0;
    double value = 0.0;
    double lo = 0.0, hi = 0.0;  // order-statistic interval (F_(i), F_(j))
    double random_error = 0.0;
    int i = 0, j = 0;           // 1-based order indices
};

// Order indices for sample size n and coefficient t_beta.
void median_indices(int n, double t_beta, int& i, int& j);
MedianEstimate median_estimate(const RunSeries& s, double t_beta = 1.96);

struct NormalEstimate {
    double mean, lo, hi, half_width;
};
// Mean with t_beta * s / sqrt(n) half-width.
NormalEstimate normal_estimate(const std::vector<double>& samples, double t_beta = 1.96);

// min(sum, k_beta * sqrt(sum of squares))
double combine_errors(const std::vector<double>& components, double k_beta = 1.11);
double total_error(double random, double systematic);

// Cross arms in attraction-magnitude units (-F): the lower signed order
// statistic F_(i) is the larger magnitude, so upper >= lower always holds.
struct ComparisonCross {
    double z = 0.0;
    double center = 0.0;  // -median
    double upper = 0.0;   // -F_(i) + systematic + patch
    double lower = 0.0;   // -F_(j) - systematic
    double half_width_z = 0.0;
};
ComparisonCross build_cross(const MedianEstimate& est, double systematic, double patch, double dz = 1.5e-9);

struct TheoryPoint {
    double z, F, dF;
};
struct ExperimentPoint {
    double z, F, dF;  // estimate and total experimental error
};
struct BandRow {
    double z, F_th, F_expt, diff, band_lo, band_hi, band_hi_no_patch;
    bool outside;
};
// patch: magnitudes per z (empty means no patch force).
std::vector<BandRow> difference_band(const std::vector<TheoryPoint>& theory, const std::vector<ExperimentPoint>& expt,
                                     const std::vector<double>& patch);

// Rows `z_m sample_1 ... sample_n`.
std::vector<RunSeries> load_runs(std::istream& in);

}  // namespace casimir
