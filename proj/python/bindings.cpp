#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "axial/config.hpp"
#include "axial/fields.hpp"
#include "axial/geometry.hpp"
#include "axial/harmonics.hpp"
#include "axial/harness.hpp"
#include "axial/identities.hpp"
#include "axial/redshift.hpp"

namespace py = pybind11;
using namespace axial;

PYBIND11_MODULE(_core, m)
{
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NotAsymptoticallyFlat>(m, "NotAsymptoticallyFlat", PyExc_ValueError);

    py::class_<RadialPoint>(m, "RadialPoint")
        .def_readonly("r", &RadialPoint::r)
        .def_readonly("y", &RadialPoint::y)
        .def_readonly("A", &RadialPoint::A);

    py::class_<Background>(m, "Background")
        .def(py::init<double>(), py::arg("M") = 1.0)
        .def_property_readonly("M", &Background::M)
        .def("rstar", &Background::rstar, py::arg("r"))
        .def("r_of", &Background::r_of, py::arg("rstar"))
        .def("point", &Background::point, py::arg("rstar"));

    m.def("angular_eigenvalue", &angular_eigenvalue, py::arg("s"), py::arg("l"));
    m.def("raise_constant", &raise_constant, py::arg("s"), py::arg("l"));
    m.def("lower_constant", &lower_constant, py::arg("s"), py::arg("l"));

    m.def("parse_config", [](const std::string& text, const std::string& study) {
        return canonical(parse_config(text, study));
    }, py::arg("text"), py::arg("study") = "");
    m.def("config_hash", [](const std::string& text, const std::string& study) {
        return config_hash(parse_config(text, study));
    }, py::arg("text"), py::arg("study") = "");

    m.def("identity_suite_json", [] {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : run_identity_suite()) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        return a.dump();
    });
    m.def("verify_report_json", [](const std::string& text) {
        bool pass = false;
        return verify_report(parse_config(text, "verify"), pass).dump();
    }, py::arg("text") = "");

    m.def("redshift_constant", [](double M, double r0, double R0) {
        RedshiftParams p;
        p.r0 = r0;
        p.R0 = R0;
        RedshiftCert c = build_redshift(Background(M), p);
        return py::dict(py::arg("found") = c.found, py::arg("c") = c.c, py::arg("delta1") = c.N.delta1,
                        py::arg("delta2") = c.N.delta2, py::arg("kappa") = c.kappa);
    }, py::arg("M") = 1.0, py::arg("r0") = 3.0, py::arg("R0") = 10.0);

    m.def("normalize_kerr", [](double M, const std::vector<double>& rstar, const std::vector<double>& beta1) {
        Background bg(M);
        std::vector<RadialPoint> pts;
        for (double x : rstar) pts.push_back(bg.point(x));
        KerrNormalization n = normalize_kerr(bg, pts, beta1);
        return py::dict(py::arg("C1") = n.fit.C1, py::arg("C2") = n.fit.C2, py::arg("a1") = n.fit.a1,
                        py::arg("post_norm") = n.post_norm, py::arg("normalized") = n.normalized);
    }, py::arg("M"), py::arg("rstar"), py::arg("beta1"));

    m.def("run_study", [](const std::string& text, const std::string& study, const std::filesystem::path& out) {
        RunConfig c = parse_config(text, study);
        py::gil_scoped_release release;
        return run_study(c, out);
    }, py::arg("text"), py::arg("study"), py::arg("out"));
}
