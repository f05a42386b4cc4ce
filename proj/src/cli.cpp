#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/edge_fit.hpp"
#include "casimir/engine.hpp"
#include "casimir/error.hpp"
#include "casimir/experiment.hpp"
#include "casimir/stats.hpp"

namespace casimir {

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "R_m", "T_K", "z_grid_m", "model", "omega_p_rad_s", "gamma_rad_s", "omega_p_eV", "gamma_eV",
        "material_table", "rel_tol", "l_max_cap", "fixed_l_max", "N", "M", "a_inv_m", "pfa_N", "theta_table",
        "theta_radius_factor", "theta_check_2R", "confidence", "V_V", "V0_V", "patch_V_rms_V", "patch_lbar_m",
        "kappa_Nm_per_rad", "Q", "f_r_Hz", "b_m", "S_elec_rad2_per_Hz", "f_grid_Hz", "harmonics_file",
        "runs_file", "t_beta", "k_beta", "theory_csv", "experiment_csv", "band_model", "experiment_error_N",
        "theory_error_z_m", "theory_error_N", "syst_components_N", "experiment_model"};
    return keys;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"force", "pfa", "de", "theta", "electrostatic",
                                                   "patch", "psd", "edge-fit", "median", "band"};
    return names;
}

namespace {

const std::set<std::string> file_keys = {"material_table", "theta_table", "harmonics_file", "runs_file",
                                         "theory_csv", "experiment_csv"};

std::ifstream open_file(const Config& cfg, const std::string& key) {
    std::string path = cfg.str(key);
    std::ifstream f(path);
    if (!f) throw ConfigError("config key '" + key + "': cannot open '" + path + "'");
    return f;
}

std::vector<double> z_grid(const Config& cfg) {
    auto z = cfg.list("z_grid_m");
    for (size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0)) throw ConfigError("z_grid_m: separations must be > 0");
        if (i && !(z[i] > z[i - 1])) throw ConfigError("z_grid_m: must be strictly ascending");
    }
    return z;
}

double radius(const Config& cfg) {
    double R = cfg.num("R_m");
    if (!(R > 0)) throw ConfigError("R_m must be > 0");
    return R;
}

// rad/s from either the SI key or its eV twin
double frequency(const Config& cfg, const std::string& base) {
    const std::string si = base + "_rad_s", ev = base + "_eV";
    if (cfg.has(si) && cfg.has(ev)) throw ConfigError("give only one of '" + si + "' and '" + ev + "'");
    if (cfg.has(si)) return cfg.num(si);
    if (cfg.has(ev)) return cfg.num(ev) * constants::eV / constants::hbar;
    throw ConfigError("missing config key '" + si + "' (or '" + ev + "')");
}

struct NamedModel {
    std::string name;
    MaterialModel model;
};

std::vector<NamedModel> models(const Config& cfg) {
    std::vector<NamedModel> out;
    for (const auto& name : cfg.words_or("model", "drude,plasma")) {
        if (name == "drude") {
            out.push_back({name, MaterialModel::drude(frequency(cfg, "omega_p"), frequency(cfg, "gamma"))});
        } else if (name == "plasma") {
            out.push_back({name, MaterialModel::plasma(frequency(cfg, "omega_p"))});
        } else if (name == "tabulated") {
            auto f = open_file(cfg, "material_table");
            out.push_back({name, load_material_table(f)});
        } else {
            throw ConfigError("model: unknown kind '" + name + "' (drude, plasma, tabulated)");
        }
    }
    return out;
}

ThermalSpec thermal(const Config& cfg) {
    ThermalSpec th;
    th.T = cfg.num_or("T_K", 295.25);
    th.rel_tol = cfg.num_or("rel_tol", 1e-8);
    th.l_max_cap = cfg.integer_or("l_max_cap", 100000);
    if (!(th.T > 0)) throw ConfigError("T_K must be > 0");
    if (!(th.rel_tol > 0)) throw ConfigError("rel_tol must be > 0");
    return th;
}

EngineOptions engine_options(const Config& cfg, double z) {
    EngineOptions o;
    o.fixed_l_max = cfg.integer_or("fixed_l_max", -1);
    if (cfg.has("N") || cfg.has("M") || cfg.has("a_inv_m")) {
        QuadratureSpec q = auto_quadrature(radius(cfg), z);
        if (cfg.has("N")) q.N = cfg.integer_or("N", q.N);
        q.M = cfg.has("M") ? cfg.integer_or("M", q.M) : 2 * q.N;
        if (cfg.has("a_inv_m")) q.a = cfg.num("a_inv_m");
        validate(q);
        o.quad = q;
    }
    return o;
}

PfaOptions pfa_options(const Config& cfg) {
    PfaOptions p;
    p.N = cfg.integer_or("pfa_N", 400);
    p.fixed_l_max = cfg.integer_or("fixed_l_max", -1);
    if (p.N < 8) throw ConfigError("pfa_N must be >= 8");
    return p;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void put(std::ostream& out, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
}

std::string fmt(double v) { return format_number(v); }

Table read_csv(std::istream& in, const std::string& origin) {
    Table t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        return cells;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (t.columns.empty()) {
            t.columns = split(line);
            continue;
        }
        auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw ConfigError(origin + ": row " + std::to_string(t.rows.size() + 1) + " has wrong column count");
        t.rows.push_back(cells);
    }
    if (t.columns.empty()) throw ConfigError(origin + ": no column header");
    return t;
}

int column(const Table& t, const std::vector<std::string>& names, const std::string& origin) {
    for (const auto& n : names) {
        auto it = std::find(t.columns.begin(), t.columns.end(), n);
        if (it != t.columns.end()) return static_cast<int>(it - t.columns.begin());
    }
    throw ConfigError(origin + ": missing column '" + names.front() + "'");
}

double cell_number(const std::string& s, const std::string& origin) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ConfigError(origin + ": bad number '" + s + "'");
    return v;
}

// (z, F) pairs from a force/de/pfa CSV, filtered by model name
std::vector<std::pair<double, double>> csv_forces(const Config& cfg, const std::string& key,
                                                  const std::string& model) {
    auto f = open_file(cfg, key);
    Table t = read_csv(f, key);
    int cz = column(t, {"z_m"}, key);
    int cf = column(t, {"de_force_N", "force_N", "pfa_force_N"}, key);
    auto it = std::find(t.columns.begin(), t.columns.end(), "model");
    int cm = it == t.columns.end() ? -1 : static_cast<int>(it - t.columns.begin());
    std::vector<std::pair<double, double>> out;
    for (const auto& r : t.rows) {
        if (cm >= 0 && r[cm] != model) continue;
        out.emplace_back(cell_number(r[cz], key), cell_number(r[cf], key));
    }
    if (out.empty()) throw ConfigError(key + ": no rows for model '" + model + "'");
    return out;
}

double interp_clamped(const std::vector<double>& x, const std::vector<double>& y, double at) {
    if (at <= x.front()) return y.front();
    if (at >= x.back()) return y.back();
    size_t k = std::upper_bound(x.begin(), x.end(), at) - x.begin();
    double s = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + s * (y[k] - y[k - 1]);
}

using Body = std::ostringstream;

void cmd_force(const Config& cfg, Body& out) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    auto ms = models(cfg);
    ThermalSpec th = thermal(cfg);
    put(out, {"model", "z_m", "force_N", "free_energy_J", "force_l0_N", "l_used", "converged", "N", "M",
              "a_inv_m"});
    for (const auto& m : ms)
        for (double z : zs) {
            ForceResult r = casimir_force({R, z}, {m.model, m.model}, th, engine_options(cfg, z));
            put(out, {m.name, fmt(z), fmt(r.force), fmt(r.free_energy), fmt(r.force_l0()), std::to_string(r.l_used),
                      r.converged ? "1" : "0", std::to_string(r.quad.N), std::to_string(r.quad.M), fmt(r.quad.a)});
        }
}

void cmd_pfa(const Config& cfg, Body& out) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    auto ms = models(cfg);
    ThermalSpec th = thermal(cfg);
    PfaOptions p = pfa_options(cfg);
    put(out, {"model", "z_m", "pfa_force_N", "pfa_l0_N", "pfa_nonzero_N"});
    for (const auto& m : ms)
        for (double z : zs) {
            Geometry g{R, z};
            Materials mat{m.model, m.model};
            double f0 = pfa_force(g, mat, th, LFilter::ZeroOnly, p);
            double fn = pfa_force(g, mat, th, LFilter::NonZeroOnly, p);
            put(out, {m.name, fmt(z), fmt(f0 + fn), fmt(f0), fmt(fn)});
        }
}

double lookup_theta(const std::vector<ThetaPoint>& pts, double z) {
    for (const auto& p : pts)
        if (p.z == z) return p.theta;
    throw NumericalFault("theta missing for z");
}

void cmd_de(const Config& cfg, Body& out) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    auto ms = models(cfg);
    ThermalSpec th = thermal(cfg);
    PfaOptions p = pfa_options(cfg);
    std::optional<ThetaTable> table;
    double factor = 0.0;
    if (cfg.has("theta_table")) {
        auto f = open_file(cfg, "theta_table");
        table = ThetaTable::load(f);
    } else {
        factor = cfg.num_or("theta_radius_factor", 2.0);
        if (!(factor > 0)) throw ConfigError("theta_radius_factor must be > 0");
    }
    put(out, {"model", "z_m", "de_force_N", "classical_N", "pfa_nonzero_N", "theta"});
    for (const auto& m : ms) {
        Materials mat{m.model, m.model};
        std::vector<ThetaPoint> derived;
        if (!table) {
            // theta from exact runs at a different radius, so DE stays an independent estimate at R
            EngineOptions o = engine_options(cfg, zs.front());
            if (o.quad) o.quad.reset();
            derived = derive_theta(factor * R, zs, mat, th, o, false, p);
        }
        for (double z : zs) {
            double theta = table ? table->theta(z, m.model.zero_frequency_kind()) : lookup_theta(derived, z);
            DEResult r = de_force({R, z}, mat, th, theta, engine_options(cfg, z), p);
            put(out, {m.name, fmt(z), fmt(r.force), fmt(r.classical), fmt(r.pfa_nonzero), fmt(r.theta)});
        }
    }
}

void cmd_theta(const Config& cfg, Body& out, Body& results) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    auto ms = models(cfg);
    ThermalSpec th = thermal(cfg);
    PfaOptions p = pfa_options(cfg);
    bool check = cfg.integer_or("theta_check_2R", 0) != 0;
    std::map<ZeroFrequencyKind, std::vector<ThetaPoint>> by_kind;
    for (const auto& m : ms) {
        auto kind = m.model.zero_frequency_kind();
        if (by_kind.count(kind)) throw ConfigError("theta: two models share a zero-frequency kind");
        EngineOptions o;
        o.fixed_l_max = cfg.integer_or("fixed_l_max", -1);
        by_kind[kind] = derive_theta(R, zs, {m.model, m.model}, th, o, check, p);
    }
    if (!by_kind.count(ZeroFrequencyKind::Drude) || !by_kind.count(ZeroFrequencyKind::Plasma))
        throw ConfigError("theta: model list must cover a Drude-like and a plasma-like model");
    const auto& d = by_kind[ZeroFrequencyKind::Drude];
    const auto& pl = by_kind[ZeroFrequencyKind::Plasma];
    results << "# columns: z_m theta_drude theta_plasma\n";
    for (size_t i = 0; i < zs.size(); ++i) {
        out << fmt(zs[i]) << " " << fmt(d[i].theta) << " " << fmt(pl[i].theta) << "\n";
        if (check)
            results << "# result: z_m=" << fmt(zs[i]) << " theta_2R_drude=" << fmt(d[i].theta_2R)
                    << " theta_2R_plasma=" << fmt(pl[i].theta_2R) << "\n";
    }
}

void cmd_electrostatic(const Config& cfg, Body& out) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    double V = cfg.num("V_V"), V0 = cfg.num_or("V0_V", 0.0);
    put(out, {"z_m", "force_N"});
    for (double z : zs) put(out, {fmt(z), fmt(electrostatic_force(z, R, V, V0))});
}

void cmd_patch(const Config& cfg, Body& out) {
    const double R = radius(cfg);
    auto zs = z_grid(cfg);
    double V = cfg.num("patch_V_rms_V"), l = cfg.num("patch_lbar_m");
    put(out, {"z_m", "force_N", "below_validity"});
    for (double z : zs) {
        auto p = patch_force(z, R, V, l);
        put(out, {fmt(z), fmt(p.force), p.below_validity ? "1" : "0"});
    }
}

void cmd_psd(const Config& cfg, Body& out, Body& results) {
    OscillatorParams p;
    p.kappa = cfg.num("kappa_Nm_per_rad");
    p.Q = cfg.num("Q");
    p.f_r = cfg.num("f_r_Hz");
    p.b = cfg.num("b_m");
    p.T = cfg.num_or("T_K", 295.25);
    p.S_elec = cfg.num_or("S_elec_rad2_per_Hz", 0.0);
    results << "# result: F_min_N_per_rtHz = " << fmt(min_detectable_force(p)) << "\n";
    put(out, {"f_Hz", "psd_rad2_per_Hz"});
    for (double f : cfg.list_or("f_grid_Hz", {p.f_r})) put(out, {fmt(f), fmt(oscillator_psd(p, f))});
}

void cmd_edge_fit(const Config& cfg, Body& out, Body& results) {
    auto f = open_file(cfg, "harmonics_file");
    HarmonicSet h = load_harmonics(f);
    double conf = cfg.num_or("confidence", 0.99);
    EdgeFitResult r = fit_harmonics(h, conf);
    results << "# result: dof=" << r.dof << " n_odd_sines=" << r.n_odd_sines
            << " n_even_cosines=" << r.n_even_cosines << "\n";
    put(out, {"parameter", "value", "ci_half_width"});
    put(out, {"F_abs_N", fmt(r.F_abs), fmt(r.ci_F)});
    put(out, {"f0_N", fmt(r.f0), fmt(r.ci_f0)});
    put(out, {"f1_N", fmt(r.f1), fmt(r.ci_f1)});
    put(out, {"f2_N", fmt(r.f2), fmt(r.ci_f2)});
    put(out, {"delta_rad", fmt(r.delta), fmt(r.ci_delta)});
    put(out, {"sigma_N", fmt(r.sigma), fmt(0.0)});
    put(out, {"b_even_rms_residual_N", fmt(r.b_even_rms_residual), fmt(0.0)});
    put(out, {"c_odd_slope_N", fmt(r.c_odd_slope), fmt(r.c_odd_slope_se)});
}

std::vector<MedianEstimate> medians(const Config& cfg, Body& results) {
    auto f = open_file(cfg, "runs_file");
    auto runs = load_runs(f);
    if (runs.empty()) throw ConfigError("runs_file: no rows");
    double t = cfg.num_or("t_beta", 1.96);
    std::vector<MedianEstimate> out;
    std::set<std::pair<int, int>> seen;
    for (const auto& r : runs) {
        out.push_back(median_estimate(r, t));
        const auto& e = out.back();
        if (seen.insert({static_cast<int>(r.samples.size()), e.i}).second)
            results << "# result: n=" << r.samples.size() << " i=" << e.i << " j=" << e.j << "\n";
    }
    return out;
}

void cmd_median(const Config& cfg, Body& out, Body& results) {
    auto est = medians(cfg, results);
    put(out, {"z_m", "median_N", "ci_lo_N", "ci_hi_N", "random_error_N", "i", "j"});
    for (const auto& e : est)
        put(out, {fmt(e.z), fmt(e.value), fmt(e.lo), fmt(e.hi), fmt(e.random_error), std::to_string(e.i),
                  std::to_string(e.j)});
}

void cmd_band(const Config& cfg, Body& out, Body& results) {
    const std::string model = cfg.str_or("band_model", "drude");
    auto theory = csv_forces(cfg, "theory_csv", model);
    std::vector<ExperimentPoint> expt;
    if (cfg.has("runs_file") == cfg.has("experiment_csv"))
        throw ConfigError("band: give exactly one of 'runs_file' and 'experiment_csv'");
    if (cfg.has("runs_file")) {
        double k = cfg.num_or("k_beta", 1.11);
        auto comps = cfg.list_or("syst_components_N", {0.0});
        double syst = combine_errors(comps, k);
        for (const auto& e : medians(cfg, results)) expt.push_back({e.z, e.value, total_error(e.random_error, syst)});
    } else {
        double err = cfg.num_or("experiment_error_N", 0.0);
        for (const auto& [z, F] : csv_forces(cfg, "experiment_csv", cfg.str_or("experiment_model", model)))
            expt.push_back({z, F, err});
    }
    std::vector<double> ez = cfg.list_or("theory_error_z_m", {0.0});
    std::vector<double> eF = cfg.list_or("theory_error_N", {0.0});
    if (ez.size() != eF.size()) throw ConfigError("theory_error_z_m and theory_error_N differ in length");
    for (size_t i = 1; i < ez.size(); ++i)
        if (!(ez[i] > ez[i - 1])) throw ConfigError("theory_error_z_m must be ascending");

    std::vector<TheoryPoint> th;
    for (const auto& e : expt) {
        auto it = std::find_if(theory.begin(), theory.end(), [&](const auto& p) {
            return std::abs(p.first - e.z) <= 1e-9 * e.z;
        });
        if (it == theory.end()) throw ConfigError("band: no theory row at z=" + fmt(e.z));
        th.push_back({e.z, it->second, interp_clamped(ez, eF, e.z)});
    }
    std::vector<double> patch;
    if (cfg.has("patch_V_rms_V") || cfg.has("patch_lbar_m")) {
        const double R = radius(cfg);
        for (const auto& e : expt)
            patch.push_back(std::abs(patch_force(e.z, R, cfg.num("patch_V_rms_V"), cfg.num("patch_lbar_m")).force));
    }
    auto rows = difference_band(th, expt, patch);
    int outside = 0;
    put(out, {"z", "F_th", "F_expt", "diff", "band_lo", "band_hi", "band_hi_no_patch", "outside"});
    for (const auto& r : rows) {
        outside += r.outside;
        put(out, {fmt(r.z), fmt(r.F_th), fmt(r.F_expt), fmt(r.diff), fmt(r.band_lo), fmt(r.band_hi),
                  fmt(r.band_hi_no_patch), r.outside ? "1" : "0"});
    }
    results << "# result: rows=" << rows.size() << " outside=" << outside << "\n";
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += (c == '\n' ? ' ' : c);
    }
    return o;
}

}  // namespace

int run_command(const std::string& command, const Config& cfg, std::ostream& out, std::ostream& err) {
    int status = 0;
    std::string kind;
    std::string msg;
    try {
        cfg.check_known(known_config_keys());
        for (const auto& k : file_keys)
            if (cfg.has(k) && !std::filesystem::exists(cfg.str(k)))
                throw ConfigError("config key '" + k + "': file not found '" + cfg.str(k) + "'");
        Body body, results;
        if (command == "force") cmd_force(cfg, body);
        else if (command == "pfa") cmd_pfa(cfg, body);
        else if (command == "de") cmd_de(cfg, body);
        else if (command == "theta") cmd_theta(cfg, body, results);
        else if (command == "electrostatic") cmd_electrostatic(cfg, body);
        else if (command == "patch") cmd_patch(cfg, body);
        else if (command == "psd") cmd_psd(cfg, body, results);
        else if (command == "edge-fit") cmd_edge_fit(cfg, body, results);
        else if (command == "median") cmd_median(cfg, body, results);
        else if (command == "band") cmd_band(cfg, body, results);
        else throw ConfigError("unknown command '" + command + "'");
        out << "# casimir " << command << "\n";
        cfg.echo(out);
        out << results.str() << body.str();
        out.flush();
        return 0;
    } catch (const NumericalFault& e) {
        status = 3, kind = "numerical", msg = e.what();
    } catch (const std::invalid_argument& e) {
        status = 2, kind = "config", msg = e.what();
    } catch (const std::exception& e) {
        status = 3, kind = "numerical", msg = e.what();
    }
    err << "casimir: error status=" << status << " kind=" << kind << " command=" << command << " message=\""
        << escape(msg) << "\"\n";
    return status;
}

}  // namespace casimir
