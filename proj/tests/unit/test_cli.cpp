#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "casimir/config.hpp"
#include "casimir/error.hpp"
#include "doctest.h"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

Config cfg_from(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

struct Run {
    int status;
    std::string out, err;
};

Run run(const std::string& cmd, const Config& c) {
    std::ostringstream o, e;
    int s = run_command(cmd, c, o, e);
    return {s, o.str(), e.str()};
}

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            header = true;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

std::vector<std::string> cells(const std::string& row) {
    std::vector<std::string> c;
    std::stringstream ss(row);
    std::string x;
    while (std::getline(ss, x, ',')) c.push_back(x);
    return c;
}

fs::path scratch() {
    fs::path d = fs::temp_directory_path() / "casimir_cli_test";
    fs::create_directories(d);
    return d;
}

const std::string gold =
    "[geometry]\nR_m = 10e-6\nz_grid_m = 1e-6, 2e-6, 4e-6\n"
    "[materials]\nmodel = drude, plasma\nomega_p_rad_s = 1.3673407039285594e16\ngamma_rad_s = 5.3174360708332875e13\n";

}  // namespace

TEST_CASE("config parsing") {
    auto c = cfg_from("# comment\n[a]\nx = 1.5  # trailing\n[b]\nlist = 1, 2 3\nname = drude\n");
    CHECK(c.num("x") == 1.5);
    CHECK(c.list("list") == std::vector<double>{1, 2, 3});
    CHECK(c.str("name") == "drude");
    CHECK(c.num_or("missing", 4.0) == 4.0);
    CHECK_THROWS_AS(c.num("name"), ConfigError);
    CHECK_THROWS_AS(c.num("nothere"), ConfigError);
    CHECK_THROWS_AS(cfg_from("x = 1\nx = 2\n"), ConfigError);
    CHECK_THROWS_AS(cfg_from("novalue\n"), ConfigError);
    CHECK_THROWS_AS(cfg_from("[broken\n"), ConfigError);
    std::ostringstream echo;
    c.echo(echo);
    CHECK(echo.str().find("# config: missing = 4.0000000000000000e+00") != std::string::npos);
}

TEST_CASE("force rows, determinism and header round trip") {
    auto c = cfg_from(gold);
    auto a = run("force", c);
    REQUIRE(a.status == 0);
    CHECK(data_rows(a.out).size() == 6);
    auto b = run("force", cfg_from(gold));
    CHECK(a.out == b.out);
    std::istringstream hdr(a.out);
    auto back = Config::from_header(hdr);
    auto r = run("force", back);
    CHECK(r.out == a.out);
    for (const auto& row : data_rows(a.out)) {
        auto f = cells(row);
        CHECK(std::stod(f[2]) < 0.0);
        CHECK(f[2].find('e') != std::string::npos);
    }
}

TEST_CASE("de then force into band gives the DE error") {
    fs::path d = scratch();
    auto c = cfg_from(gold + "pfa_N = 200\n");
    c.set("z_grid_m", "1e-6, 2e-6");
    auto de = run("de", c);
    auto fo = run("force", c);
    REQUIRE(de.status == 0);
    REQUIRE(fo.status == 0);
    std::ofstream(d / "de.csv") << de.out;
    std::ofstream(d / "force.csv") << fo.out;
    for (std::string model : {"drude", "plasma"}) {
        Config bc;
        bc.set("theory_csv", (d / "de.csv").string());
        bc.set("experiment_csv", (d / "force.csv").string());
        bc.set("band_model", model);
        auto band = run("band", bc);
        REQUIRE(band.status == 0);
        auto rows = data_rows(band.out);
        REQUIRE(rows.size() == 2);
        for (const auto& row : rows) {
            auto f = cells(row);
            double Fth = std::stod(f[1]), Fex = std::stod(f[2]), diff = std::stod(f[3]);
            CHECK(diff == Fth - Fex);
            CHECK(std::abs(diff) / std::abs(Fex) < 1e-3);  // eta |F|
        }
    }
}

TEST_CASE("median command echoes the order indices") {
    fs::path d = scratch();
    {
        std::ofstream f(d / "runs.txt");
        f << "6e-7";
        for (int k = 1; k <= 30; ++k) f << " " << -1.6e-12 - k * 1e-16;
        f << "\n";
    }
    Config c;
    c.set("runs_file", (d / "runs.txt").string());
    auto r = run("median", c);
    REQUIRE(r.status == 0);
    CHECK(r.out.find("# result: n=30 i=10 j=21") != std::string::npos);
    CHECK(data_rows(r.out).size() == 1);
}

TEST_CASE("light commands") {
    auto e = run("electrostatic", cfg_from("R_m = 149.7e-6\nz_grid_m = 1e-6, 2e-6\nV_V = 0.1\n"));
    CHECK(e.status == 0);
    CHECK(data_rows(e.out).size() == 2);
    auto p = run("psd", cfg_from("kappa_Nm_per_rad = 1.07e-9\nQ = 4850\nf_r_Hz = 306.45\nb_m = 239e-6\n"));
    CHECK(p.status == 0);
    CHECK(p.out.find("F_min_N_per_rtHz = 5.7") != std::string::npos);
    auto pa = run("patch", cfg_from("R_m = 149.7e-6\nz_grid_m = 7e-6\npatch_V_rms_V = 0.012\npatch_lbar_m = 250e-9\n"));
    CHECK(pa.status == 0);
}

TEST_CASE("exit codes and error lines") {
    auto missing = run("force", cfg_from("R_m = 1e-5\n"));
    CHECK(missing.status == 2);
    CHECK(missing.err.rfind("casimir: error status=2 kind=config command=force message=", 0) == 0);
    CHECK(run("nope", Config{}).status == 2);
    CHECK(run("force", cfg_from(gold + "bogus = 1\n")).status == 2);
    CHECK(run("force", cfg_from(gold + "material_table = /no/such/file\n")).status == 2);
    auto c = cfg_from(gold);
    c.set("z_grid_m", "2e-6, 1e-6");
    CHECK(run("force", c).status == 2);
    c = cfg_from(gold);
    c.set("model", "copper");
    CHECK(run("force", c).status == 2);
    c = cfg_from(gold);
    c.set("l_max_cap", "2");
    auto nc = run("force", c);
    CHECK(nc.status == 3);
    CHECK(nc.err.find("kind=numerical") != std::string::npos);
    CHECK(nc.out.empty());
}
