#pragma once

#include <vector>

#include "casimir/materials.hpp"
#include "casimir/mie.hpp"

namespace casimir {

enum class Pol { TE = 0, TM = 1 };

struct PlaneWaveLabel {
    double k;    // 1/m
    double phi;  // rad
    Pol pol;
};

struct KernelContext {
    double K = 0.0;  // xi / c
    double R = 0.0;
    double z = 0.0;
    MaterialModel sphere;
    MaterialModel plate;
    int l_cap = 0;  // 0: max(1e4, 20 ceil(x))
    double term_tol = 1e-12;
};

struct FresnelPair {
    double te;
    double tm;
};

FresnelPair fresnel(const MaterialModel& m, double K, double k);
FresnelPair zero_frequency_fresnel(const MaterialModel& m, double k);

struct Rotation {
    double A, B, C, D;
};

// Throws RemovableSingularity at k = k', dphi = pi (the limit is A=-1, B=C=D=0).
Rotation polarization_rotation(double k, double kp, double dphi, double K);

// Angular functions pi_l, tau_l at mu, plain recurrences (small l).
struct PiTau {
    double pi;
    double tau;
};
PiTau angular_functions(double mu, int l);

struct Amplitudes {
    double S1;
    double S2;
};

// Sphere scattering at fixed K. Holds the Mie table.
class SphereScatterer {
public:
    // Reaching l_cap is a NonConvergence fault unless truncate_at_cap is set.
    SphereScatterer(double K, double R, const MaterialModel& sphere, int l_cap = 0, double term_tol = 1e-12,
                    bool truncate_at_cap = false);

    // S1, S2 in the scattering-plane convention, cos(Theta) <= -1.
    Amplitudes amplitudes(double cos_theta) const;

    // exp(lp) * (S1, S2) evaluated at y = -cos(Theta) = 1 + ym1, overflow-safe.
    Amplitudes amplitudes_scaled(double ym1, double lp) const;

    // Reflection kernel f_RS(out; in), all four polarization pairs, times exp(lp).
    struct Block {
        double tmtm, tete, tmte, tetm;  // (out; in)
    };
    Block reflection(double k, double kp, double dphi, double lp = 0.0) const;
    // Both orientations from one amplitude evaluation: fwd = f(kp; k), bwd = f(k; kp).
    void reflection_pair(double k, double kp, double dphi, double lp, Block& fwd, Block& bwd) const;

    double K() const { return K_; }
    double R() const { return R_; }
    int l_cap() const { return mie_.lmax; }
    bool vacuum() const { return vacuum_; }
    // Rough position of the l-sum peak for the given y.
    double peak_l(double y) const;

private:
    double K_, R_;
    double tol_;
    bool truncate_at_cap_;
    bool vacuum_ = false;
    MieSeries mie_;
    std::vector<double> gain_;  // (2l+1)/(l(l+1)) * sign
    std::vector<double> alpha_, betar_;
};

// f_M(out; in) including plate reflection and translation, K > 0.
double roundtrip_kernel(const KernelContext& ctx, const PlaneWaveLabel& in, const PlaneWaveLabel& out);

// Zero-frequency f_RS(out; in) without the translation factor.
double zero_frequency_kernel(const MaterialModel& m, double k, double kp, double dphi, double R, Pol out, Pol in);

// Zero-frequency TM/TE kernels with translation and plate reflection folded in,
// f_M(out; in) * exp(lp). Stable for large arguments.
struct ZeroFrequencyKernel {
    ZeroFrequencyKernel(const MaterialModel& sphere, const MaterialModel& plate, double R, double z, int lmax_hint = 0);
    double tmtm(double k, double kp, double dphi, double lp = 0.0) const;
    double tete(double k, double kp, double dphi, double lp = 0.0) const;
    bool has_te() const { return te_; }

private:
    MaterialModel plate_;
    double R_, z_;
    bool sphere_ok_ = false;
    bool te_ = false;
    double KpR_ = 0.0;
    std::vector<double> B_;
};

}  // namespace casimir
