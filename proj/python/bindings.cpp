#include "tfnorm/error.hpp"
#include "tfnorm/io.hpp"
#include "tfnorm/modspace.hpp"
#include "tfnorm/psido.hpp"
#include "tfnorm/runner.hpp"
#include "tfnorm/stft.hpp"
#include "tfnorm/tfconv.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace tfnorm;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

CVec to_cvec(const CArray& a)
{
    const auto* p = a.data();
    return CVec(p, p + a.size());
}

CArray to_array(const CVec& v, std::vector<py::ssize_t> shape)
{
    CArray out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::dict cert_dict(const CertRun& run)
{
    py::dict values, checks;
    for (const auto& [k, v] : run.values) values[py::str(k)] = v;
    for (const auto& c : run.checks)
        checks[py::str(c.label)] = py::make_tuple(c.measured, std::string(c.relation()), c.tolerance, c.pass());
    py::dict out;
    out["name"] = run.name;
    out["values"] = values;
    out["checks"] = checks;
    out["pass"] = run.pass();
    return out;
}

} // namespace

PYBIND11_MODULE(_tfnorm, m)
{
    m.doc() = "Short-time Fourier transforms, modulation space norms and phase-space operators";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<GridMismatch>(m, "GridMismatch", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

    py::class_<Grid>(m, "Grid")
        .def_readonly("dim", &Grid::dim)
        .def_readonly("n", &Grid::n)
        .def_readonly("h", &Grid::h)
        .def_readonly("offset", &Grid::offset)
        .def("size", &Grid::size)
        .def("coords", [](const Grid& g, int axis) {
            std::vector<double> out(g.n);
            for (std::size_t i = 0; i < g.n; ++i) out[i] = g.coord(axis, i);
            return out;
        }, py::arg("axis") = 0)
        .def("dual", &Grid::dual)
        .def("refined", &Grid::refined)
        .def("__repr__", [](const Grid& g) {
            return "Grid(d=" + std::to_string(g.dim) + ", n=" + std::to_string(g.n) + ", h=" + format_double(g.h) + ")";
        });
    m.def("make_grid", &make_grid, py::arg("d"), py::arg("n"), py::arg("h"), py::arg("center") = std::vector<double>{});

    py::class_<Signal>(m, "Signal")
        .def(py::init([](const Grid& g, const CArray& v) { return Signal(g, to_cvec(v)); }), py::arg("grid"), py::arg("values"))
        .def_readonly("grid", &Signal::grid)
        .def_property_readonly("values", [](const Signal& f) {
            return to_array(f.values, {static_cast<py::ssize_t>(f.values.size())});
        });

    py::class_<PhaseField>(m, "PhaseField")
        .def(py::init([](const Grid& g, const CArray& v) { return PhaseField(g, to_cvec(v)); }), py::arg("time"), py::arg("values"))
        .def_readonly("time", &PhaseField::time)
        .def_readonly("freq", &PhaseField::freq)
        .def_property_readonly("values", [](const PhaseField& F) {
            const auto n = static_cast<py::ssize_t>(F.points());
            return to_array(F.values, {n, n});
        });

    m.def("gaussian", &gaussian, py::arg("grid"));
    m.def("window", [](const std::string& spec, const Grid& g) { return window_source(spec, g.dim).on(g); },
          py::arg("spec"), py::arg("grid"));
    m.def("dft", &dft);
    m.def("stft", &stft, py::arg("f"), py::arg("window"));
    m.def("stft_adjoint", &stft_adjoint, py::arg("F"), py::arg("window"));
    m.def("reconstruct", &reconstruct, py::arg("f"), py::arg("window"));
    m.def("reconstruction_defect", &reconstruction_defect, py::arg("f"), py::arg("window"));
    m.def("moyal_defect", &moyal_defect, py::arg("f"), py::arg("g"), py::arg("phi1"), py::arg("phi2"));
    m.def("l2_norm", py::overload_cast<const Signal&>(&l2_norm));

    m.def("norm", [](const Signal& f, const std::string& space, const std::string& window) {
        return space_norm(f, window_source(window, f.grid.dim).on(f.grid), parse_space(space, f.grid.dim));
    }, py::arg("f"), py::arg("space"), py::arg("window") = "gauss");
    m.def("weight", [](const std::string& spec, const std::vector<double>& x) {
        return parse_weight(spec, static_cast<int>(x.size()))(x);
    }, py::arg("spec"), py::arg("x"));

    m.def("twisted_conv", [](const PhaseField& F, const PhaseField& G) { return twisted_conv(F, G); });
    m.def("window_projection", [](const PhaseField& F, const Signal& phi1, const Signal& phi2) {
        return window_projection(F, phi1, phi2);
    });

    m.def("apply_op", [](const PhaseField& a, const std::string& quant, const Signal& f) {
        return apply_op(SymbolField(a, parse_quantization(quant)), f);
    }, py::arg("symbol"), py::arg("quant"), py::arg("f"));
    m.def("wigner", [](const Signal& f1, const Signal& f2, const std::string& quant) {
        return wigner(f1, f2, parse_quantization(quant));
    }, py::arg("f1"), py::arg("f2"), py::arg("quant") = "weyl");
    m.def("toeplitz", &toeplitz_direct, py::arg("symbol"), py::arg("phi1"), py::arg("phi2"), py::arg("f"));

    m.def("read_signal", &read_signal_file);
    m.def("write_signal", &write_signal_file);
    m.def("read_phase", &read_phase_file);
    m.def("write_phase", &write_phase_file);

    m.def("certify", [](const std::string& path) {
        const Config cfg = Config::load(path);
        return cert_dict(cfg.has("lemma") ? run_conv_lemma(cfg, cfg.get("lemma")) : run_theorem(cfg, cfg.get("theorem")));
    }, py::arg("config"));
}
