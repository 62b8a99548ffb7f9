#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "klslab/bounds.hpp"
#include "klslab/errors.hpp"
#include "klslab/isoperimetry.hpp"
#include "klslab/localization.hpp"
#include "klslab/measures.hpp"
#include "klslab/tensor.hpp"

namespace py = pybind11;
using namespace klslab;

PYBIND11_MODULE(_klslab, m) {
    m.doc() = "stochastic localization laboratory core";

    py::register_exception<Error>(m, "KlslabError");

    py::class_<AtomicMeasure>(m, "AtomicMeasure")
        .def(py::init<>())
        .def_readwrite("points", &AtomicMeasure::points)
        .def_readwrite("weights", &AtomicMeasure::weights)
        .def("size", &AtomicMeasure::size)
        .def("dim", &AtomicMeasure::dim);

    py::class_<Density>(m, "Density")
        .def_static("gaussian", &Density::gaussian)
        .def_static("uniform_box", &Density::uniform_box)
        .def_static("uniform_ball", &Density::uniform_ball)
        .def_static("product_exponential", &Density::product_exponential)
        .def("mean", &Density::mean)
        .def("covariance", &Density::covariance)
        .def("log_density", &Density::log_density);

    m.def("sample_atomic", &sample_atomic, py::arg("density"), py::arg("n"),
          py::arg("seed"));

    py::enum_<TensorMode>(m, "TensorMode")
        .value("AUTO", TensorMode::Auto)
        .value("NAIVE", TensorMode::Naive)
        .value("FACTORED", TensorMode::Factored);

    m.def("three_tensor", &three_tensor, py::arg("measure"), py::arg("a"),
          py::arg("b"), py::arg("c"), py::arg("mode") = TensorMode::Auto,
          py::arg("pair_cap") = kPairSumCap);

    py::class_<TwoSidedCheck>(m, "TwoSidedCheck")
        .def_readonly("lhs", &TwoSidedCheck::lhs)
        .def_readonly("rhs", &TwoSidedCheck::rhs)
        .def_readonly("passed", &TwoSidedCheck::pass);

    m.def("check_trace_inequality", &check_trace_inequality, py::arg("g"),
          py::arg("f"), py::arg("delta"), py::arg("tol") = 1e-10);
    m.def("check_tensor_swap", &check_tensor_swap, py::arg("measure"), py::arg("a"),
          py::arg("b"), py::arg("c"), py::arg("delta"), py::arg("rel_tol") = 1e-9);
    m.def("check_moment_inequality", &check_moment_inequality, py::arg("density_1d"),
          py::arg("a"), py::arg("b"), py::arg("tol") = 1e-6);

    py::class_<PathRecord>(m, "PathRecord")
        .def_readonly("t", &PathRecord::t)
        .def_readonly("gamma", &PathRecord::gamma)
        .def_readonly("spec_q", &PathRecord::spec_q)
        .def_readonly("g_e", &PathRecord::g_e)
        .def_readonly("qv_rate", &PathRecord::qv_rate)
        .def_readonly("v_norm", &PathRecord::v_norm)
        .def_readonly("delta", &PathRecord::delta)
        .def_readonly("mu", &PathRecord::mu)
        .def_readonly("cov", &PathRecord::cov);

    py::class_<SimulateOptions>(m, "SimulateOptions")
        .def(py::init<>())
        .def_readwrite("record_every", &SimulateOptions::record_every)
        .def_readwrite("subset", &SimulateOptions::subset)
        .def_readwrite("drift_terms", &SimulateOptions::drift_terms);

    py::class_<PathResult>(m, "PathResult")
        .def_readonly("records", &PathResult::records)
        .def_readonly("qv_accum", &PathResult::qv_accum)
        .def_readonly("int_spec_q", &PathResult::int_spec_q);

    m.def("simulate_path", &simulate_path, py::arg("base"), py::arg("q"),
          py::arg("t_end"), py::arg("dt"), py::arg("seed"),
          py::arg("options") = SimulateOptions{});

    py::class_<Halfspace>(m, "Halfspace")
        .def(py::init<>())
        .def_readwrite("direction", &Halfspace::direction)
        .def_readwrite("threshold", &Halfspace::threshold);

    py::class_<IsoperimetryEstimate>(m, "IsoperimetryEstimate")
        .def_readonly("value", &IsoperimetryEstimate::value)
        .def_readonly("witness", &IsoperimetryEstimate::witness)
        .def_readonly("witness_cut_size", &IsoperimetryEstimate::witness_cut_size);

    m.def("halfspace_isoperimetry", &halfspace_isoperimetry, py::arg("density"),
          py::arg("direction_count"), py::arg("threshold_grid"), py::arg("seed"));
    m.def("conductance_proxy", &conductance_proxy, py::arg("measure"),
          py::arg("k_neighbors"), py::arg("sweep_count"));

    m.def("kls_original_bound", &kls_original_bound, py::arg("a"));
    m.def("lee_vempala_bound", &lee_vempala_bound, py::arg("a"),
          py::arg("c_lv") = 1.0);
    m.def("main_theorem_bound", &main_theorem_bound, py::arg("d"), py::arg("ell"),
          py::arg("c"), py::arg("spec_norm"));

    py::class_<OptimalEll>(m, "OptimalEll")
        .def_readonly("formula_ell", &OptimalEll::formula_ell)
        .def_readonly("scan_ell", &OptimalEll::scan_ell)
        .def_readonly("exponent", &OptimalEll::exponent);
    m.def("optimal_ell", &optimal_ell, py::arg("d"), py::arg("c") = 1.0);

    py::class_<RecursionSequences>(m, "RecursionSequences")
        .def_readonly("beta", &RecursionSequences::beta)
        .def_readonly("log_alpha", &RecursionSequences::log_alpha)
        .def_readonly("bounds_hold", &RecursionSequences::bounds_hold)
        .def_readonly("first_violation", &RecursionSequences::first_violation);
    m.def("recursion_sequences", &recursion_sequences, py::arg("ell_max"),
          py::arg("c"));

    py::class_<TimeConstants>(m, "TimeConstants")
        .def_readonly("q", &TimeConstants::q)
        .def_readonly("t1", &TimeConstants::t1)
        .def_readonly("t2", &TimeConstants::t2)
        .def_readonly("identity_residual", &TimeConstants::identity_residual)
        .def_readonly("small_dimension", &TimeConstants::small_dimension);
    m.def("time_constants", &time_constants, py::arg("d"), py::arg("alpha"),
          py::arg("beta"));
}
