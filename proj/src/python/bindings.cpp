#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "saddleflow/baselines.hpp"
#include "saddleflow/core.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/saddle_path.hpp"
#include "saddleflow/verify.hpp"

namespace py = pybind11;
namespace sf = saddleflow;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Saddle recursion, flow simulation and sparse-recovery baselines.";

    // Messages start with the error code name, e.g. "RankDeficient: ...".
    py::register_exception<sf::Error>(m, "SaddleflowError", PyExc_RuntimeError);

    py::class_<sf::Dataset>(m, "Dataset")
        .def(py::init<sf::Matrix, sf::Vector>(), py::arg("x"), py::arg("y"))
        .def_static("from_gram", &sf::Dataset::from_gram, py::arg("gram"), py::arg("beta_star"))
        .def_property_readonly("x", &sf::Dataset::x)
        .def_property_readonly("y", &sf::Dataset::y)
        .def_property_readonly("gram", &sf::Dataset::gram)
        .def_property_readonly("n", &sf::Dataset::n)
        .def_property_readonly("d", &sf::Dataset::d);

    m.def("loss", &sf::loss, py::arg("data"), py::arg("beta"));
    m.def("grad_loss", &sf::grad_loss, py::arg("data"), py::arg("beta"));
    m.def(
        "constrained_lsq",
        [](const sf::Dataset& data, sf::IndexSet plus, sf::IndexSet minus, double tol) {
            return sf::constrained_lsq(data, sf::SignPattern(std::move(plus), std::move(minus)), tol).beta;
        },
        py::arg("data"), py::arg("plus"), py::arg("minus"), py::arg("tol") = sf::kDefaultKktTol);
    m.def(
        "general_position",
        [](const sf::Dataset& data, int k_max) { return sf::general_position_check(data, k_max).holds; },
        py::arg("data"), py::arg("k_max") = -1);

    py::class_<sf::SaddlePath>(m, "SaddlePath")
        .def_readonly("times", &sf::SaddlePath::times)
        .def_readonly("saddles", &sf::SaddlePath::saddles)
        .def_readonly("duals", &sf::SaddlePath::duals)
        .def_readonly("losses", &sf::SaddlePath::losses)
        .def_readonly("warnings", &sf::SaddlePath::warnings)
        .def_property_readonly("loops", &sf::SaddlePath::loops);
    m.def(
        "run",
        [](const sf::Dataset& data, double tol_grad, double tie_tol) {
            sf::PathConfig cfg;
            cfg.tol_grad = tol_grad;
            cfg.tie_tol = tie_tol;
            return sf::run(data, cfg);
        },
        py::arg("data"), py::arg("tol_grad") = 1e-10, py::arg("tie_tol") = 1e-9,
        "Saddle-to-saddle recursion from the origin.");

    py::class_<sf::LassoPath>(m, "LassoPath")
        .def_readonly("lambdas", &sf::LassoPath::lambdas)
        .def_readonly("vertices", &sf::LassoPath::vertices)
        .def_property_readonly("endpoint", &sf::LassoPath::endpoint)
        .def("at", &sf::LassoPath::at, py::arg("lam"));
    m.def("lasso_homotopy", &sf::lasso_homotopy, py::arg("data"), py::arg("lambda_min") = 0.0);
    m.def("omp", &sf::omp, py::arg("data"), py::arg("k"));

    py::class_<sf::FlowTrajectory>(m, "FlowTrajectory")
        .def_readonly("log_alpha", &sf::FlowTrajectory::log_alpha)
        .def_readonly("times", &sf::FlowTrajectory::times)
        .def_readonly("beta", &sf::FlowTrajectory::beta)
        .def_readonly("loss", &sf::FlowTrajectory::loss);
    m.def(
        "simulate",
        [](const sf::Dataset& data, double log_alpha, double t_end, double tol) {
            sf::FlowConfig cfg;
            cfg.rel_tol = tol;
            cfg.abs_tol = tol;
            py::gil_scoped_release release;
            return sf::simulate(data, log_alpha, t_end, cfg);
        },
        py::arg("data"), py::arg("log_alpha"), py::arg("t_end"), py::arg("tol") = 1e-8,
        "Accelerated mirror flow at scale alpha = exp(log_alpha).");
    m.def("weights_from_beta", &sf::weights_from_beta, py::arg("beta"), py::arg("log_alpha"));
    m.def("potential", &sf::potential, py::arg("beta"), py::arg("log_alpha"), py::arg("rescaled") = true);
    m.def("count_jumps", &sf::count_jumps, py::arg("traj"), py::arg("factor") = 10.0);

    m.def(
        "hybrid_graph",
        [](const sf::Dataset& data, const sf::SaddlePath& path) { return sf::build_hybrid_path(data, path).graph(); },
        py::arg("data"), py::arg("path"), "Saddle points and heteroclinic orbit polylines.");
    m.def("hausdorff_distance", &sf::hausdorff_distance, py::arg("a"), py::arg("b"));
    m.def(
        "rip_constant",
        [](const sf::Dataset& data, int s, bool exact, std::size_t samples, std::uint64_t seed) {
            return sf::rip_constant(data, s, exact ? sf::RipMode::Exact : sf::RipMode::Sampled, samples, seed);
        },
        py::arg("data"), py::arg("s"), py::arg("exact") = true, py::arg("samples") = 2000, py::arg("seed") = 0);

#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
