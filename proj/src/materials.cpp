#include "casimir/materials.hpp"

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <sstream>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"

namespace casimir {

namespace {

double drude_eps(const Drude& d, double xi) { return 1.0 + d.omega_p * d.omega_p / (xi * (xi + d.gamma)); }
double plasma_eps(const Plasma& p, double xi) { return 1.0 + p.omega_p * p.omega_p / (xi * xi); }

void check_drude(const Drude& d) {
    if (!(d.omega_p > 0) || !(d.gamma >= 0)) throw ConfigError("drude: need omega_p > 0 and gamma >= 0");
}

void check_plasma(const Plasma& p) {
    if (!(p.omega_p > 0)) throw ConfigError("plasma: need omega_p > 0");
}

double table_eps(const Tabulated& t, double xi) {
    const auto& p = t.points;
    if (xi < p.front().xi) {
        return std::visit([xi](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, Drude>) return drude_eps(m, xi);
            else return plasma_eps(m, xi);
        }, t.extrapolation);
    }
    if (xi >= p.back().xi) {
        double r = p.back().xi / xi;
        return 1.0 + (p.back().eps - 1.0) * r * r;
    }
    auto it = std::upper_bound(p.begin(), p.end(), xi, [](double x, const TablePoint& q) { return x < q.xi; });
    const TablePoint& hi = *it;
    const TablePoint& lo = *(it - 1);
    double s = std::log(xi / lo.xi) / std::log(hi.xi / lo.xi);
    double le = std::log(lo.eps - 1.0) + s * (std::log(hi.eps - 1.0) - std::log(lo.eps - 1.0));
    return 1.0 + std::exp(le);
}

}  // namespace

MaterialModel MaterialModel::drude(double omega_p, double gamma) {
    Drude d{omega_p, gamma};
    check_drude(d);
    return MaterialModel(d);
}

MaterialModel MaterialModel::plasma(double omega_p) {
    Plasma p{omega_p};
    check_plasma(p);
    return MaterialModel(p);
}

MaterialModel MaterialModel::tabulated(std::vector<TablePoint> points, std::variant<Drude, Plasma> extrapolation) {
    if (points.empty()) throw ConfigError("tabulated material: empty table");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].xi > 0) || !std::isfinite(points[i].xi)) throw ConfigError("tabulated material: xi must be positive");
        if (!(points[i].eps > 1.0) || !std::isfinite(points[i].eps)) throw ConfigError("tabulated material: eps must exceed 1");
        if (i > 0 && !(points[i].xi > points[i - 1].xi)) throw ConfigError("tabulated material: xi not strictly increasing");
    }
    std::visit([](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Drude>) check_drude(m);
        else check_plasma(m);
    }, extrapolation);
    return MaterialModel(Tabulated{std::move(points), extrapolation});
}

double MaterialModel::permittivity(double xi) const {
    if (!(xi > 0)) throw ConfigError("permittivity: xi must be > 0");
    return std::visit([xi](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Drude>) return drude_eps(m, xi);
        else if constexpr (std::is_same_v<M, Plasma>) return plasma_eps(m, xi);
        else if constexpr (std::is_same_v<M, Tabulated>) return table_eps(m, xi);
        else return 1.0;
    }, v_);
}

ZeroFrequencyKind MaterialModel::zero_frequency_kind() const {
    if (std::holds_alternative<Drude>(v_)) return ZeroFrequencyKind::Drude;
    if (std::holds_alternative<Plasma>(v_)) return ZeroFrequencyKind::Plasma;
    if (auto t = std::get_if<Tabulated>(&v_))
        return std::holds_alternative<Drude>(t->extrapolation) ? ZeroFrequencyKind::Drude : ZeroFrequencyKind::Plasma;
    return ZeroFrequencyKind::Vacuum;
}

double MaterialModel::plasma_wavenumber() const {
    if (auto p = std::get_if<Plasma>(&v_)) return p->omega_p / constants::c;
    if (auto t = std::get_if<Tabulated>(&v_))
        if (auto p = std::get_if<Plasma>(&t->extrapolation)) return p->omega_p / constants::c;
    return 0.0;
}

double matsubara_frequency(const ThermalSpec& spec, int l) {
    if (l < 0) throw ConfigError("matsubara_frequency: l must be >= 0");
    if (l == 0) return 0.0;
    return 2.0 * constants::pi * constants::kB * spec.T * l / constants::hbar;
}

Drude fit_drude(const TablePoint& p1, const TablePoint& p2) {
    double a1 = p1.eps - 1.0, a2 = p2.eps - 1.0;
    double gamma = (a2 * p2.xi * p2.xi - a1 * p1.xi * p1.xi) / (a1 * p1.xi - a2 * p2.xi);
    double wp2 = a1 * p1.xi * (p1.xi + gamma);
    if (!(gamma >= 0) || !(wp2 > 0)) throw ConfigError("fit_drude: points not Drude-compatible");
    return Drude{std::sqrt(wp2), gamma};
}

MaterialModel load_material_table(std::istream& in) {
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::variant<Drude, Plasma> extrap = Plasma{1.0};
    std::vector<TablePoint> pts;
    auto fail = [&](const std::string& msg) {
        throw ConfigError("material table line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            if (line.find("extrapolation=") == std::string::npos) continue;
            std::istringstream ss(line.substr(1));
            std::string tok, kind;
            double wp = -1, g = -1;
            while (ss >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) fail("bad header token '" + tok + "'");
                std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
                char* end = nullptr;
                if (k == "extrapolation") {
                    kind = v;
                    continue;
                }
                double val = std::strtod(v.c_str(), &end);
                if (v.empty() || *end != '\0') fail("bad number '" + v + "'");
                if (k == "omega_p") wp = val;
                else if (k == "gamma") g = val;
                else fail("unknown header key '" + k + "'");
            }
            if (kind == "drude") {
                if (wp <= 0 || g < 0) fail("drude extrapolation needs omega_p > 0 and gamma >= 0");
                extrap = Drude{wp, g};
            } else if (kind == "plasma") {
                if (wp <= 0) fail("plasma extrapolation needs omega_p > 0");
                extrap = Plasma{wp};
            } else {
                fail("unknown extrapolation '" + kind + "'");
            }
            have_header = true;
            continue;
        }
        auto hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        std::istringstream ss(body);
        double xi, eps;
        std::string extra;
        if (!(ss >> xi >> eps) || (ss >> extra)) fail("expected '<xi> <epsilon>'");
        if (!(eps > 1.0)) fail("epsilon must exceed 1");
        if (!(xi > 0)) fail("xi must be positive");
        if (!pts.empty() && !(xi > pts.back().xi)) fail("xi not strictly increasing");
        pts.push_back({xi, eps});
    }
    if (!have_header) throw ConfigError("material table: missing '# extrapolation=' header");
    if (pts.empty()) throw ConfigError("material table: no data lines");
    return MaterialModel::tabulated(std::move(pts), extrap);
}

}  // namespace casimir
