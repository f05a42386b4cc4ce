#pragma once

#include <optional>
#include <vector>

#include "casimir/materials.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

struct Geometry {
    double R = 0.0;  // m
    double z = 0.0;  // m
};

struct Materials {
    MaterialModel sphere;
    MaterialModel plate;
};

enum class LFilter { All, ZeroOnly, NonZeroOnly };

struct EngineOptions {
    // Base quadrature; default auto_quadrature(R, z). The radial scale used at
    // Matsubara index l is max(a, sqrt(a K_l)) when per_l_scale is set.
    std::optional<QuadratureSpec> quad;
    bool per_l_scale = true;
    double cut = 50.0;       // drop kernel entries below exp(-cut)
    double m_tol = 1e-12;    // m-block truncation
    double term_tol = 1e-12; // l-sum of the Mie series
    int fixed_l_max = -1;    // >= 0: sum exactly l = 0..fixed_l_max
    LFilter filter = LFilter::All;
    bool with_force = true;
};

struct MatsubaraTerm {
    int l;
    double xi;      // rad/s
    double energy;  // J, weight 1/2 applied at l = 0
    double force;   // N, weight 1/2 applied at l = 0
};

struct ForceResult {
    double force = 0.0;        // N
    double free_energy = 0.0;  // J
    std::vector<MatsubaraTerm> per_l;
    int l_used = 0;
    bool converged = false;
    QuadratureSpec quad;
    double force_l0() const;
};

void validate(const Geometry& g);
QuadratureSpec quadrature_for(const Geometry& g, const EngineOptions& opt, double K);

// One Matsubara term (unweighted): logdet(1-M) and tr[(1-M)^-1 dM/dz].
struct TermValue {
    double logdet;
    double trace;
};
TermValue matsubara_term(const Geometry& g, const Materials& mat, double K, const EngineOptions& opt);

ForceResult casimir_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, const EngineOptions& opt = {});
double casimir_free_energy(const Geometry& g, const Materials& mat, const ThermalSpec& th, EngineOptions opt = {});

// l = 0 contribution to the force (weight 1/2). With tm_only the TE channel is dropped.
double classical_force_term(const Geometry& g, const Materials& mat, const ThermalSpec& th, EngineOptions opt = {},
                            bool tm_only = false);

struct PfaOptions {
    int N = 400;  // radial nodes per Matsubara term
    int fixed_l_max = -1;
};
double pfa_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, LFilter filter,
                 const PfaOptions& opt = {});

// theta table rows
struct ThetaRow {
    double z;
    double theta_drude;
    double theta_plasma;
};

class ThetaTable {
public:
    ThetaTable() = default;
    explicit ThetaTable(std::vector<ThetaRow> rows);
    static ThetaTable load(std::istream& in);
    void save(std::ostream& out) const;
    // Linear interpolation; z outside the table throws ConfigError.
    double theta(double z, ZeroFrequencyKind kind) const;
    const std::vector<ThetaRow>& rows() const { return rows_; }

private:
    std::vector<ThetaRow> rows_;
};

struct DEResult {
    double force;        // N
    double classical;    // exact l = 0 part
    double pfa_nonzero;  // PFA l > 0 part
    double theta;
};

DEResult de_force(const Geometry& g, const Materials& mat, const ThermalSpec& th, double theta,
                  const EngineOptions& opt = {}, const PfaOptions& popt = {});

struct ThetaPoint {
    double z;
    double theta;          // at R
    double theta_2R;       // at 2R (NaN if not computed)
    double exact_nonzero;  // exact l > 0 force at R
    double pfa_nonzero;    // PFA l > 0 force at R
};

// theta(z) from the exact/PFA ratio of the l > 0 forces. With check_2R the
// computation is repeated at 2R and a >5% disagreement raises NumericalFault.
std::vector<ThetaPoint> derive_theta(double R, const std::vector<double>& zs, const Materials& mat,
                                     const ThermalSpec& th, const EngineOptions& opt = {}, bool check_2R = false,
                                     const PfaOptions& popt = {});

double theta_from_forces(double exact_nonzero, double pfa_nonzero, double R, double z);

}  // namespace casimir
