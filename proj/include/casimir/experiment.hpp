#pragma once

namespace casimir {

// Sphere-plate electrostatic force, exact image-charge series.
double electrostatic_force(double z, double R, double V, double V0);

struct CalibrationState {
    double V0 = 0.0;          // V
    double D1_plus_D2 = 0.0;  // m
    double b = 0.0;           // m
};

double separation(double z_meas, const CalibrationState& cal, double alpha);

struct PatchForce {
    double force;             // N
    bool below_validity;      // z < 7 um: outside the asymptotic regime
};
PatchForce patch_force(double z, double R, double V_rms, double l_bar);

struct OscillatorParams {
    double kappa = 0.0;   // N m / rad
    double Q = 0.0;
    double f_r = 0.0;     // Hz
    double b = 0.0;       // m
    double T = 0.0;       // K
    double S_elec = 0.0;  // rad^2/Hz
};

double oscillator_psd(const OscillatorParams& p, double f);
double min_detectable_force(const OscillatorParams& p);
double rotation_frequency(double f_r, int n_tr, int m = 1);

}  // namespace casimir
