#include <cmath>
#include <sstream>

#include "casimir/constants.hpp"
#include "casimir/error.hpp"
#include "casimir/materials.hpp"
#include "doctest.h"

using namespace casimir;

namespace {
const double wp = 1.3673407039285594e16, gam = 5.3174360708332875e13;
}

TEST_CASE("matsubara frequencies") {
    ThermalSpec th;
    CHECK(matsubara_frequency(th, 0) == 0.0);
    double x1 = matsubara_frequency(th, 1);
    CHECK(x1 == doctest::Approx(2.0 * constants::pi * constants::kB * 295.25 / constants::hbar).epsilon(1e-15));
    CHECK(x1 == doctest::Approx(2.429e14).epsilon(1e-3));
    CHECK(matsubara_frequency(th, 2) == 2.0 * x1);
}

TEST_CASE("drude and plasma permittivity") {
    auto p = MaterialModel::plasma(wp);
    CHECK(p.permittivity(wp) == doctest::Approx(2.0).epsilon(1e-15));
    auto d0 = MaterialModel::drude(wp, 0.0);
    CHECK(d0.permittivity(3e14) == doctest::Approx(p.permittivity(3e14)).epsilon(1e-15));
    auto d = MaterialModel::drude(wp, gam);
    CHECK_THROWS_AS(d.permittivity(0.0), ConfigError);
    CHECK_THROWS_AS(d.permittivity(-1.0), ConfigError);
    // decreasing toward 1, and Drude below plasma
    double prev_d = INFINITY, prev_p = INFINITY;
    for (int i = 0; i < 100; ++i) {
        double xi = std::pow(10.0, 11.0 + 8.0 * i / 99.0);
        double ed = d.permittivity(xi), ep = p.permittivity(xi);
        CHECK(ed < prev_d);
        CHECK(ep < prev_p);
        CHECK(ed > 1.0);
        CHECK(ed < ep);
        prev_d = ed;
        prev_p = ep;
    }
    CHECK(d.zero_frequency_kind() == ZeroFrequencyKind::Drude);
    CHECK(p.zero_frequency_kind() == ZeroFrequencyKind::Plasma);
    CHECK(p.plasma_wavenumber() == doctest::Approx(wp / constants::c));
    CHECK(d.plasma_wavenumber() == 0.0);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(MaterialModel::drude(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(MaterialModel::drude(1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(MaterialModel::plasma(-1.0), ConfigError);
    CHECK_THROWS_AS(MaterialModel::tabulated({}, Plasma{wp}), ConfigError);
    CHECK_THROWS_AS(MaterialModel::tabulated({{2.0, 3.0}, {1.0, 4.0}}, Plasma{wp}), ConfigError);
    CHECK_THROWS_AS(MaterialModel::tabulated({{1.0, 0.9}}, Plasma{wp}), ConfigError);
}

TEST_CASE("tabulated interpolation and tails") {
    auto t = MaterialModel::tabulated({{1e14, 101.0}, {1e16, 2.0}}, Plasma{wp});
    // log-log: eps-1 goes 100 -> 1, geometric mean gives 10
    CHECK(t.permittivity(1e15) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(t.permittivity(1e16) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(t.permittivity(2e16) == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(t.permittivity(1e13) == doctest::Approx(MaterialModel::plasma(wp).permittivity(1e13)));
    CHECK(t.zero_frequency_kind() == ZeroFrequencyKind::Plasma);
}

TEST_CASE("tabulated continuity with fitted drude extrapolation") {
    auto d = MaterialModel::drude(wp, gam);
    TablePoint p1{1e13, d.permittivity(1e13) * 1.01}, p2{2e13, d.permittivity(2e13) * 1.005};
    Drude fit = fit_drude(p1, p2);
    auto t = MaterialModel::tabulated({p1, p2, {1e15, 50.0}}, fit);
    double below = t.permittivity(p1.xi * (1 - 1e-9)), at = t.permittivity(p1.xi);
    CHECK(std::abs(below / at - 1.0) < 1e-3);
    CHECK(fit.omega_p > 0);
    CHECK(fit.gamma > 0);
}

TEST_CASE("material table loader") {
    std::istringstream ok("# extrapolation=drude omega_p=1.3e16 gamma=5e13\n1e14 100\n1e15 10 # comment\n1e16 1.5\n");
    auto m = load_material_table(ok);
    CHECK(std::get<Tabulated>(m.variant()).points.size() == 3);
    CHECK(m.zero_frequency_kind() == ZeroFrequencyKind::Drude);

    std::istringstream low("# extrapolation=plasma omega_p=1.3e16\n1e14 100\n1e15 0.5\n");
    try {
        load_material_table(low);
        FAIL("expected error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream dup("# extrapolation=plasma omega_p=1.3e16\n1e14 100\n1e14 50\n");
    CHECK_THROWS_AS(load_material_table(dup), ConfigError);
    std::istringstream nohdr("1e14 100\n1e15 10\n");
    CHECK_THROWS_AS(load_material_table(nohdr), ConfigError);
    std::istringstream junk("# extrapolation=plasma omega_p=1.3e16\n1e14 abc\n");
    CHECK_THROWS_AS(load_material_table(junk), ConfigError);
}
