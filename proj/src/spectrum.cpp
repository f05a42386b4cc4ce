#include "casimir/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

using constants::pi;

RoundTripOperator::RoundTripOperator(const KernelContext& ctx, const QuadratureSpec& spec, double cut)
    : N_(spec.N), M_(spec.M) {
    if (!(ctx.K >= 0) || !(ctx.R > 0) || !(ctx.z > 0)) throw ConfigError("round-trip operator: need K >= 0, R > 0, z > 0");
    Quadrature q = build_quadrature(spec);
    const double K = ctx.K, R = ctx.R, z = ctx.z;
    const int half = M_ / 2;

    cos_.resize(M_);
    sin_.resize(M_);
    for (int j = 0; j < M_; ++j) {
        cos_[j] = std::cos(2.0 * pi * j / M_);
        sin_[j] = std::sin(2.0 * pi * j / M_);
    }

    bool zero_freq = !(K > 0);
    if (ctx.sphere.is_vacuum() || ctx.plate.is_vacuum()) return;
    if (zero_freq && (ctx.sphere.zero_frequency_kind() == ZeroFrequencyKind::Vacuum ||
                      ctx.plate.zero_frequency_kind() == ZeroFrequencyKind::Vacuum))
        return;

    for (int i = 0; i < N_; ++i) {
        double kap = std::sqrt(K * K + q.k[i] * q.k[i]);
        if (2.0 * kap * z < cut) {
            active_.push_back(i);
            W_.push_back(std::sqrt(q.k[i] * q.w[i]));
            kz_.push_back(kap);
        }
    }
    const int n = n_active();
    if (n == 0) return;

    auto estimate = [&](double k, double kp, double kap, double kapp, double c) {
        double Qc = k * kp * c;
        double dk2 = std::max(0.0, k * k + kp * kp - 2.0 * Qc);
        double g2 = std::max(0.0, 2.0 * (K * K + Qc + kap * kapp));
        return -(kap + kapp) * z - R * dk2 / (std::sqrt(g2) + kap + kapp);
    };

    // pair list and j ranges
    double kap_max = 0.0;
    for (int a = 0; a < n; ++a) kap_max = std::max(kap_max, kz_[a]);
    size_t total = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            double k = q.k[active_[a]], kp = q.k[active_[b]];
            int jm = -1;
            for (int j = 0; j <= half; ++j) {
                if (estimate(k, kp, kz_[a], kz_[b], cos_[j]) < -cut) break;
                jm = j;
            }
            if (jm < 0) continue;
            pairs_.push_back({a, b, jm, total});
            total += static_cast<size_t>(jm + 1) * 8;
        }
    }
    data_.assign(total, 0.0);
    const double wfac = 1.0 / (2.0 * pi * M_);

    if (zero_freq) {
        double umax = 2.0 * R * q.k[active_[0]];
        for (int a = 0; a < n; ++a) umax = std::max(umax, 2.0 * R * q.k[active_[a]]);
        ZeroFrequencyKernel zk(ctx.sphere, ctx.plate, R, z,
                               static_cast<int>(0.5 * umax + 20.0 * std::sqrt(umax + 1.0) + 100.0));
        npol_ = zk.has_te() ? 2 : 1;
        for (const Pair& p : pairs_) {
            double k = q.k[active_[p.a]], kp = q.k[active_[p.b]];
            double wt = W_[p.a] * W_[p.b] * wfac;
            for (int j = 0; j <= p.jmax; ++j) {
                double dphi = 2.0 * pi * j / M_;
                double* d = &data_[p.off + 8 * static_cast<size_t>(j)];
                d[0] = wt * zk.tmtm(k, kp, dphi);
                d[4] = wt * zk.tmtm(kp, k, dphi);
                if (npol_ == 2) {
                    d[1] = wt * zk.tete(k, kp, dphi);
                    d[5] = wt * zk.tete(kp, k, dphi);
                }
            }
        }
        return;
    }

    int lcap = std::max(ctx.l_cap > 0 ? ctx.l_cap : 0,
                        std::max(10000, 20 * static_cast<int>(std::ceil(K * R))));
    double lpk = R * kap_max;
    lcap = std::max(lcap, static_cast<int>(lpk + 15.0 * std::sqrt(lpk) + 200.0));
    SphereScatterer sc(K, R, ctx.sphere, lcap, ctx.term_tol);
    std::vector<FresnelPair> rp(n);
    for (int a = 0; a < n; ++a) rp[a] = fresnel(ctx.plate, K, q.k[active_[a]]);

    for (const Pair& p : pairs_) {
        double k = q.k[active_[p.a]], kp = q.k[active_[p.b]];
        double lp = -(kz_[p.a] + kz_[p.b]) * (z + R);
        double wt = W_[p.a] * W_[p.b] * wfac;
        const FresnelPair& ra = rp[p.a];
        const FresnelPair& rb = rp[p.b];
        for (int j = 0; j <= p.jmax; ++j) {
            double dphi = 2.0 * pi * j / M_;
            SphereScatterer::Block f, g;
            try {
                sc.reflection_pair(k, kp, dphi, lp, f, g);
            } catch (const NumericalFault& e) {
                throw NumericalFault(std::string(e.what()) + " at (i=" + std::to_string(active_[p.a]) +
                                     ", i'=" + std::to_string(active_[p.b]) + ", j=" + std::to_string(j) + ")");
            }
            double* d = &data_[p.off + 8 * static_cast<size_t>(j)];
            // out b, in a: plate reflection at the incoming k
            d[0] = wt * ra.tm * f.tmtm;
            d[1] = wt * ra.te * f.tete;
            d[2] = wt * ra.te * f.tmte;
            d[3] = wt * ra.tm * f.tetm;
            // out a, in b
            d[4] = wt * rb.tm * g.tmtm;
            d[5] = wt * rb.te * g.tete;
            d[6] = wt * rb.te * g.tmte;
            d[7] = wt * rb.tm * g.tetm;
        }
    }
}

void RoundTripOperator::block(int m, Eigen::MatrixXd& B, Eigen::MatrixXd* dB) const {
    const int n = n_active();
    const int dim = n * npol_;
    B.setZero(dim, dim);
    if (dB) dB->setZero(dim, dim);
    const int half = M_ / 2;
    for (const Pair& p : pairs_) {
        double s[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        const double* d = &data_[p.off];
        s[0] = d[0];
        s[1] = d[1];
        s[4] = d[4];
        s[5] = d[5];
        int idx = 0;
        for (int j = 1; j <= p.jmax; ++j) {
            idx += m;
            if (idx >= M_) idx -= M_;
            const double* e = d + 8 * j;
            double wc = (j == half ? 1.0 : 2.0) * cos_[idx];
            s[0] += wc * e[0];
            s[1] += wc * e[1];
            s[4] += wc * e[4];
            s[5] += wc * e[5];
            if (j < half) {
                double ws = 2.0 * sin_[idx];
                s[2] += ws * e[2];
                s[3] += ws * e[3];
                s[6] += ws * e[6];
                s[7] += ws * e[7];
            }
        }
        const int a = p.a, b = p.b;
        B(b, a) = s[0];
        if (npol_ == 2) {
            B(n + b, n + a) = s[1];
            B(b, n + a) = s[2];
            B(n + b, a) = -s[3];
        }
        if (a != b) {
            B(a, b) = s[4];
            if (npol_ == 2) {
                B(n + a, n + b) = s[5];
                B(a, n + b) = s[6];
                B(n + a, b) = -s[7];
            }
        }
    }
    if (dB) {
        for (int c = 0; c < dim; ++c)
            for (int r = 0; r < dim; ++r) (*dB)(r, c) = -(kz_[r % n] + kz_[c % n]) * B(r, c);
    }
}

void RoundTripOperator::full_block(int m, Eigen::MatrixXd& B, Eigen::MatrixXd* dB) const {
    Eigen::MatrixXd b, db;
    block(m, b, dB ? &db : nullptr);
    const int n = n_active();
    B.setZero(2 * N_, 2 * N_);
    if (dB) dB->setZero(2 * N_, 2 * N_);
    for (int c = 0; c < n * npol_; ++c) {
        int fc = (c / n) * N_ + active_[c % n];
        for (int r = 0; r < n * npol_; ++r) {
            int fr = (r / n) * N_ + active_[r % n];
            B(fr, fc) = b(r, c);
            if (dB) (*dB)(fr, fc) = db(r, c);
        }
    }
}

namespace {

struct BlockResult {
    double logdet;
    double trace;
};

BlockResult solve_block(const Eigen::MatrixXd& B, const Eigen::MatrixXd* dB, int m) {
    const int dim = static_cast<int>(B.rows());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(dim, dim) - B;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const Eigen::MatrixXd& U = lu.matrixLU();
    double ld = 0.0;
    double sgn = lu.permutationP().determinant();
    for (int i = 0; i < dim; ++i) {
        double u = U(i, i);
        if (u == 0.0 || !std::isfinite(u)) throw NonContractive("singular 1 - M block at m=" + std::to_string(m));
        if (u < 0) sgn = -sgn;
        ld += std::log(std::abs(u));
    }
    if (sgn <= 0) throw NonContractive("det(1 - M) <= 0 in block m=" + std::to_string(m));
    double tr = 0.0;
    if (dB) {
        Eigen::MatrixXd X = lu.solve(*dB);
        tr = X.trace();
    }
    return {ld, tr};
}

}  // namespace

RoundTripOperator::Eval RoundTripOperator::evaluate(bool with_trace, bool truncate, double m_tol) const {
    Eval ev;
    if (dim() == 0) return ev;
    Eigen::MatrixXd B, dB;
    int quiet = 0;
    for (int m = 0; m <= M_ / 2; ++m) {
        block(m, B, with_trace ? &dB : nullptr);
        BlockResult r = solve_block(B, with_trace ? &dB : nullptr, m);
        double w = block_weight(m, M_);
        ev.logdet += w * r.logdet;
        ev.trace += w * r.trace;
        ++ev.blocks_used;
        if (truncate) {
            bool small = std::abs(w * r.logdet) <= m_tol * std::abs(ev.logdet) &&
                         (!with_trace || std::abs(w * r.trace) <= m_tol * std::abs(ev.trace));
            quiet = small ? quiet + 1 : 0;
            if (quiet >= 3) break;
        }
    }
    return ev;
}

RoundTripSpectrum assemble_spectrum(const KernelContext& ctx, const QuadratureSpec& spec, bool derivative) {
    RoundTripOperator op(ctx, spec, 700.0);
    RoundTripSpectrum s;
    s.N = spec.N;
    s.M = spec.M;
    s.a = spec.a;
    s.K = ctx.K;
    s.z = ctx.z;
    s.R = ctx.R;
    s.blocks.resize(spec.M / 2 + 1);
    Eigen::MatrixXd B, dB;
    for (int m = 0; m <= spec.M / 2; ++m) {
        op.full_block(m, B, derivative ? &dB : nullptr);
        s.blocks[m] = derivative ? dB : B;
    }
    return s;
}

double logdet_one_minus(const RoundTripSpectrum& s) {
    double sum = 0.0;
    for (size_t m = 0; m < s.blocks.size(); ++m) {
        if (s.blocks[m].size() == 0) continue;
        sum += block_weight(static_cast<int>(m), s.M) * solve_block(s.blocks[m], nullptr, static_cast<int>(m)).logdet;
    }
    return sum;
}

double trace_solve(const RoundTripSpectrum& s, const RoundTripSpectrum& ds) {
    if (s.N != ds.N || s.M != ds.M || s.blocks.size() != ds.blocks.size())
        throw ConfigError("trace_solve: spectra have different (N, M)");
    double sum = 0.0;
    for (size_t m = 0; m < s.blocks.size(); ++m) {
        if (s.blocks[m].size() == 0) continue;
        sum += block_weight(static_cast<int>(m), s.M) *
               solve_block(s.blocks[m], &ds.blocks[m], static_cast<int>(m)).trace;
    }
    return sum;
}

}  // namespace casimir
