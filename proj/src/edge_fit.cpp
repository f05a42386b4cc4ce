#include "casimir/edge_fit.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

using constants::pi;

HarmonicSet synthesize_harmonics(const EdgeParams& p, int m_max, double sigma, std::uint64_t seed) {
    if (m_max < 4) throw ConfigError("synthesize_harmonics: m_max must be >= 4");
    if (!(sigma >= 0)) throw ConfigError("synthesize_harmonics: sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    HarmonicSet h;
    for (int m = 1; m <= m_max; ++m) {
        double b, c;
        if (m % 2 == 1) {
            b = 2.0 / pi * (p.F_abs / m - m * p.f1);
            c = -2.0 / pi * p.F_abs * p.delta;
        } else {
            b = 2.0 / pi * p.f0 * m * p.delta;
            c = 2.0 / pi * p.f0 - m * m / pi * p.f2;
        }
        if (sigma > 0) {
            b += sigma * noise(rng);
            c += sigma * noise(rng);
        }
        h[m] = {b, c};
    }
    return h;
}

namespace {

struct LinFit {
    Eigen::VectorXd coef;
    Eigen::MatrixXd cov_unit;  // (X^T X)^-1
    double rss;
};

LinFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw NumericalFault("edge fit: rank-deficient design matrix");
    LinFit f;
    f.coef = qr.solve(y);
    Eigen::MatrixXd XtX = X.transpose() * X;
    f.cov_unit = XtX.inverse();
    f.rss = (y - X * f.coef).squaredNorm();
    return f;
}

}  // namespace

EdgeFitResult fit_harmonics(const HarmonicSet& data, double confidence) {
    if (!(confidence > 0 && confidence < 1)) throw ConfigError("fit_harmonics: confidence must be in (0, 1)");
    int expect = 1;
    for (const auto& [m, h] : data) {
        if (m != expect++) throw ConfigError("fit_harmonics: harmonics must be contiguous from m=1");
        if (!std::isfinite(h.b) || !std::isfinite(h.c)) throw ConfigError("fit_harmonics: non-finite coefficient");
    }
    std::vector<int> odd, even;
    for (const auto& [m, h] : data) (m % 2 ? odd : even).push_back(m);
    if (odd.size() < 6 || even.size() < 4)
        throw ConfigError("fit_harmonics: need >= 6 odd-sine and >= 4 even-cosine harmonics");

    const int no = static_cast<int>(odd.size()), ne = static_cast<int>(even.size());
    Eigen::MatrixXd Xo(no, 2);
    Eigen::VectorXd yb(no), yc(no);
    for (int r = 0; r < no; ++r) {
        double m = odd[r];
        Xo(r, 0) = 1.0 / m;
        Xo(r, 1) = m;
        yb(r) = data.at(odd[r]).b;
        yc(r) = data.at(odd[r]).c;
    }
    Eigen::MatrixXd Xe(ne, 2);
    Eigen::VectorXd ye(ne);
    for (int r = 0; r < ne; ++r) {
        double m = even[r];
        Xe(r, 0) = 1.0;
        Xe(r, 1) = m * m;
        ye(r) = data.at(even[r]).c;
    }
    LinFit fo = least_squares(Xo, yb);
    LinFit fe = least_squares(Xe, ye);

    EdgeFitResult res{};
    res.confidence = confidence;
    res.n_odd_sines = no;
    res.n_even_cosines = ne;
    res.dof = no - 2;
    res.F_abs = pi / 2.0 * fo.coef(0);
    if (!(res.F_abs > 0)) throw NumericalFault("fit_harmonics: fitted |F| is not positive");
    res.f1 = -pi / 2.0 * fo.coef(1);
    res.f0 = pi / 2.0 * fe.coef(0);
    res.f2 = -pi * fe.coef(1);
    double cbar = yc.mean();
    res.delta = -pi * cbar / (2.0 * res.F_abs);

    // common sigma from the odd-sine residuals
    res.sigma = std::sqrt(fo.rss / res.dof);
    boost::math::students_t dist(res.dof);
    double t = boost::math::quantile(dist, 0.5 + 0.5 * confidence);
    double s = res.sigma;
    res.ci_F = t * pi / 2.0 * s * std::sqrt(fo.cov_unit(0, 0));
    res.ci_f1 = t * pi / 2.0 * s * std::sqrt(fo.cov_unit(1, 1));
    res.ci_f0 = t * pi / 2.0 * s * std::sqrt(fe.cov_unit(0, 0));
    res.ci_f2 = t * pi * s * std::sqrt(fe.cov_unit(1, 1));
    res.ci_delta = t * pi / (2.0 * res.F_abs) * s / std::sqrt(static_cast<double>(no));

    // b_even against the prediction from f0 and delta
    double ss = 0.0;
    for (int m : even) {
        double pred = 2.0 / pi * res.f0 * m * res.delta;
        double d = data.at(m).b - pred;
        ss += d * d;
    }
    res.b_even_rms_residual = std::sqrt(ss / ne);

    // c_odd should not depend on m
    Eigen::MatrixXd Xs(no, 2);
    for (int r = 0; r < no; ++r) {
        Xs(r, 0) = 1.0;
        Xs(r, 1) = odd[r];
    }
    LinFit fs = least_squares(Xs, yc);
    res.c_odd_slope = fs.coef(1);
    res.c_odd_slope_se = std::sqrt(fs.rss / (no - 2) * fs.cov_unit(1, 1));
    return res;
}

double harmonic_to_force(double first_harmonic_amplitude) {
    if (!std::isfinite(first_harmonic_amplitude)) throw ConfigError("harmonic_to_force: amplitude must be finite");
    return pi / 4.0 * first_harmonic_amplitude;
}

HarmonicSet load_harmonics(std::istream& in) {
    HarmonicSet h;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        int m;
        double b, c;
        std::string extra;
        if (!(ss >> m >> b >> c) || (ss >> extra))
            throw ConfigError("harmonics line " + std::to_string(lineno) + ": expected 'm b_m c_m'");
        if (m < 1 || h.count(m)) throw ConfigError("harmonics line " + std::to_string(lineno) + ": bad or repeated m");
        h[m] = {b, c};
    }
    return h;
}

}  // namespace casimir
