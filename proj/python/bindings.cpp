#include <fstream>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "casimir/config.hpp"
#include "casimir/edge_fit.hpp"
#include "casimir/engine.hpp"
#include "casimir/error.hpp"
#include "casimir/experiment.hpp"
#include "casimir/materials.hpp"
#include "casimir/stats.hpp"

namespace py = pybind11;
using namespace casimir;

namespace {

ThermalSpec thermal(double T, double rel_tol, int l_max_cap) {
    ThermalSpec th;
    th.T = T;
    th.rel_tol = rel_tol;
    th.l_max_cap = l_max_cap;
    return th;
}

LFilter filter_from(const std::string& s) {
    if (s == "all") return LFilter::All;
    if (s == "zero") return LFilter::ZeroOnly;
    if (s == "nonzero") return LFilter::NonZeroOnly;
    throw ConfigError("filter must be all, zero or nonzero, got " + s);
}

EngineOptions engine_opts(int N, int M, double a, int fixed_l_max, const std::string& filter) {
    EngineOptions o;
    if (N > 0) o.quad = QuadratureSpec{N, M > 0 ? M : 2 * N, a};
    o.fixed_l_max = fixed_l_max;
    o.filter = filter_from(filter);
    return o;
}

}  // namespace

PYBIND11_MODULE(_casimir, m) {
    m.doc() = "Sphere-plate Casimir force and data-analysis helpers";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalFault>(m, "NumericalFault", PyExc_RuntimeError);

    py::class_<MaterialModel>(m, "MaterialModel")
        .def_static("drude", &MaterialModel::drude, py::arg("omega_p"), py::arg("gamma"))
        .def_static("plasma", &MaterialModel::plasma, py::arg("omega_p"))
        .def_static("vacuum", &MaterialModel::vacuum)
        .def_static("from_table",
                    [](const std::string& path) {
                        std::ifstream in(path);
                        if (!in) throw ConfigError("cannot open " + path);
                        return load_material_table(in);
                    },
                    py::arg("path"))
        .def("permittivity", &MaterialModel::permittivity, py::arg("xi"))
        .def_property_readonly("zero_frequency_kind", [](const MaterialModel& mm) {
            switch (mm.zero_frequency_kind()) {
                case ZeroFrequencyKind::Drude: return "drude";
                case ZeroFrequencyKind::Plasma: return "plasma";
                default: return "vacuum";
            }
        });

    m.def("matsubara_frequency", [](double T, int l) { return matsubara_frequency(thermal(T, 1e-8, 100000), l); },
          py::arg("T"), py::arg("l"));

    m.def(
        "casimir_force",
        [](double R, double z, const MaterialModel& mat, double T, double rel_tol, int l_max_cap, int N, int M,
           double a, int fixed_l_max, const std::string& filter) {
            ForceResult r;
            {
                py::gil_scoped_release nogil;
                r = casimir_force({R, z}, {mat, mat}, thermal(T, rel_tol, l_max_cap),
                                  engine_opts(N, M, a, fixed_l_max, filter));
            }
            py::dict d;
            d["force"] = r.force;
            d["free_energy"] = r.free_energy;
            d["l_used"] = r.l_used;
            d["converged"] = r.converged;
            d["N"] = r.quad.N;
            d["M"] = r.quad.M;
            d["a"] = r.quad.a;
            py::list terms;
            for (const auto& t : r.per_l) terms.append(py::make_tuple(t.l, t.xi, t.energy, t.force));
            d["terms"] = terms;
            return d;
        },
        py::arg("R"), py::arg("z"), py::arg("material"), py::arg("T") = 295.25, py::arg("rel_tol") = 1e-8,
        py::arg("l_max_cap") = 100000, py::arg("N") = 0, py::arg("M") = 0, py::arg("a") = 0.0,
        py::arg("fixed_l_max") = -1, py::arg("filter") = "all");

    m.def(
        "pfa_force",
        [](double R, double z, const MaterialModel& mat, double T, const std::string& filter, int N) {
            PfaOptions p;
            p.N = N;
            return pfa_force({R, z}, {mat, mat}, thermal(T, 1e-8, 100000), filter_from(filter), p);
        },
        py::arg("R"), py::arg("z"), py::arg("material"), py::arg("T") = 295.25, py::arg("filter") = "all",
        py::arg("N") = 400);

    m.def(
        "de_force",
        [](double R, double z, const MaterialModel& mat, double theta, double T) {
            DEResult r;
            {
                py::gil_scoped_release nogil;
                r = de_force({R, z}, {mat, mat}, thermal(T, 1e-8, 100000), theta);
            }
            py::dict d;
            d["force"] = r.force;
            d["classical"] = r.classical;
            d["pfa_nonzero"] = r.pfa_nonzero;
            d["theta"] = r.theta;
            return d;
        },
        py::arg("R"), py::arg("z"), py::arg("material"), py::arg("theta"), py::arg("T") = 295.25);

    m.def("theta_from_forces", &theta_from_forces, py::arg("exact_nonzero"), py::arg("pfa_nonzero"), py::arg("R"),
          py::arg("z"));

    m.def("electrostatic_force", &electrostatic_force, py::arg("z"), py::arg("R"), py::arg("V"), py::arg("V0"));
    m.def(
        "patch_force",
        [](double z, double R, double V_rms, double l_bar) {
            auto p = patch_force(z, R, V_rms, l_bar);
            return py::make_tuple(p.force, p.below_validity);
        },
        py::arg("z"), py::arg("R"), py::arg("V_rms"), py::arg("l_bar"));

    m.def(
        "min_detectable_force",
        [](double kappa, double Q, double f_r, double b, double T, double S_elec) {
            return min_detectable_force({kappa, Q, f_r, b, T, S_elec});
        },
        py::arg("kappa"), py::arg("Q"), py::arg("f_r"), py::arg("b"), py::arg("T"), py::arg("S_elec") = 0.0);

    m.def(
        "synthesize_harmonics",
        [](double F, double f0, double f1, double f2, double delta, int m_max, double sigma, std::uint64_t seed) {
            std::map<int, std::pair<double, double>> out;
            for (const auto& [k, h] : synthesize_harmonics({F, f0, f1, f2, delta}, m_max, sigma, seed))
                out[k] = {h.b, h.c};
            return out;
        },
        py::arg("F_abs"), py::arg("f0"), py::arg("f1"), py::arg("f2"), py::arg("delta"), py::arg("m_max") = 21,
        py::arg("sigma") = 0.0, py::arg("seed") = 1);

    m.def(
        "fit_harmonics",
        [](const std::map<int, std::pair<double, double>>& data, double confidence) {
            HarmonicSet h;
            for (const auto& [k, bc] : data) h[k] = {bc.first, bc.second};
            auto r = fit_harmonics(h, confidence);
            py::dict d;
            d["F_abs"] = r.F_abs;
            d["f0"] = r.f0;
            d["f1"] = r.f1;
            d["f2"] = r.f2;
            d["delta"] = r.delta;
            d["sigma"] = r.sigma;
            d["dof"] = r.dof;
            d["ci"] = py::dict(py::arg("F_abs") = r.ci_F, py::arg("f0") = r.ci_f0, py::arg("f1") = r.ci_f1,
                               py::arg("f2") = r.ci_f2, py::arg("delta") = r.ci_delta);
            return d;
        },
        py::arg("harmonics"), py::arg("confidence") = 0.99);

    m.def(
        "median_estimate",
        [](const std::vector<double>& samples, double t_beta) {
            auto e = median_estimate({0.0, samples}, t_beta);
            py::dict d;
            d["median"] = e.value;
            d["lo"] = e.lo;
            d["hi"] = e.hi;
            d["random_error"] = e.random_error;
            d["i"] = e.i;
            d["j"] = e.j;
            return d;
        },
        py::arg("samples"), py::arg("t_beta") = 1.96);

    m.def("combine_errors", &combine_errors, py::arg("components"), py::arg("k_beta") = 1.11);

    m.def(
        "run_command",
        [](const std::string& command, const std::string& config_text) {
            std::ostringstream out, err;
            int status;
            {
                py::gil_scoped_release nogil;
                try {
                    std::istringstream in(config_text);
                    status = run_command(command, Config::parse(in, "<string>"), out, err);
                } catch (const ConfigError& e) {
                    err << "casimir: error status=2 kind=config command=" << command << " message=\"" << e.what()
                        << "\"\n";
                    status = 2;
                }
            }
            return py::make_tuple(status, out.str(), err.str());
        },
        py::arg("command"), py::arg("config"));

    m.attr("commands") = command_names();
}
