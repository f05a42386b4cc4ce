#pragma once

#include <Eigen/Dense>
#include <vector>

#include "casimir/kernels.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

// Angular-momentum blocks m = 0..M/2 of the discretized round-trip operator.
// Row/column layout: index = pol * N + i with pol 0 = TM, 1 = TE.
struct RoundTripSpectrum {
    int N = 0, M = 0;
    double a = 0.0, K = 0.0, z = 0.0, R = 0.0;
    std::vector<Eigen::MatrixXd> blocks;
};

// Block weight in the sum over m: 1 for m = 0 and m = M/2, 2 otherwise.
inline double block_weight(int m, int M) { return (m == 0 || 2 * m == M) ? 1.0 : 2.0; }

RoundTripSpectrum assemble_spectrum(const KernelContext& ctx, const QuadratureSpec& spec, bool derivative = false);
double logdet_one_minus(const RoundTripSpectrum& s);
double trace_solve(const RoundTripSpectrum& s, const RoundTripSpectrum& ds);

// Compact kernel table for one Matsubara frequency. Entries whose estimated
// magnitude is below exp(-cut) are dropped, and so are nodes with no entries.
class RoundTripOperator {
public:
    RoundTripOperator(const KernelContext& ctx, const QuadratureSpec& spec, double cut = 50.0);

    int n_active() const { return static_cast<int>(active_.size()); }
    int dim() const { return n_active() * npol_; }
    int npol() const { return npol_; }
    int N() const { return N_; }
    int M() const { return M_; }

    // Compact block m; dB (optional) receives the z-derivative block.
    void block(int m, Eigen::MatrixXd& B, Eigen::MatrixXd* dB) const;
    // Same, scattered into the full 2N x 2N layout.
    void full_block(int m, Eigen::MatrixXd& B, Eigen::MatrixXd* dB) const;

    struct Eval {
        double logdet = 0.0;
        double trace = 0.0;
        int blocks_used = 0;
    };
    // Sum over m of block_weight * (logdet(1-B_m), tr[(1-B_m)^-1 dB_m]).
    // With truncate, stops once 3 consecutive blocks contribute <= m_tol of the running sums.
    Eval evaluate(bool with_trace, bool truncate = true, double m_tol = 1e-12) const;

private:
    struct Pair {
        int a, b;  // active indices, a <= b
        int jmax;
        size_t off;
    };
    int N_, M_;
    int npol_ = 2;
    std::vector<int> active_;
    std::vector<double> W_, kz_;  // sqrt(k w), kappa per active node
    std::vector<Pair> pairs_;
    std::vector<double> data_;  // per pair and j: fwd(tmtm,tete,tmte,tetm), bwd(...)
    std::vector<double> cos_, sin_;
};

}  // namespace casimir
