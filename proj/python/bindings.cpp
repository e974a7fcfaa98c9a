#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <vector>

#include "partition_entropy/partition.hpp"
#include "partition_entropy/pdp.hpp"
#include "partition_entropy/random.hpp"
#include "partition_entropy/special_functions.hpp"
#include "partition_entropy/verify.hpp"

namespace py = pybind11;
using namespace pentropy;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exchangeable-partition sampling, entropy estimators and their "
              "verification harness for the two-parameter Poisson-Dirichlet family";

    m.def("digamma", &digamma, py::arg("x"));
    m.def("log_gamma", &log_gamma, py::arg("x"));

    py::class_<RandomStream>(m, "RandomStream",
                             "Reproducible uniform stream keyed by (seed, stream_id)")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream_id") = 0)
        .def_property_readonly("seed", &RandomStream::seed)
        .def_property_readonly("stream_id", &RandomStream::stream_id)
        .def("next_uniform", &RandomStream::next_uniform)
        .def("derived", &RandomStream::derived, py::arg("offset"));

    py::class_<PartitionCounts>(m, "PartitionCounts",
                                "Class sizes in order of first appearance")
        .def(py::init<>())
        .def(py::init<std::vector<std::int64_t>>(), py::arg("counts"))
        .def_property_readonly("counts",
                               [](const PartitionCounts& pi) {
                                   return std::vector<std::int64_t>(pi.counts().begin(),
                                                                    pi.counts().end());
                               })
        .def_property_readonly("n", &PartitionCounts::total)
        .def_property_readonly("k", &PartitionCounts::num_classes)
        .def("to_json", &PartitionCounts::to_json)
        .def_static("from_json", &PartitionCounts::from_json, py::arg("text"))
        .def(py::self == py::self)
        .def("__repr__", [](const PartitionCounts& pi) {
            return "PartitionCounts(" + pi.to_json() + ")";
        });

    py::class_<RankedMasses>(m, "RankedMasses",
                             "Decreasing weights plus truncated tail mass")
        .def(py::init<std::vector<double>, double>(), py::arg("weights"),
             py::arg("tail") = 0.0)
        .def_property_readonly("weights", &RankedMasses::weights)
        .def_property_readonly("tail", &RankedMasses::tail)
        .def("to_json", &RankedMasses::to_json)
        .def_static("from_json", &RankedMasses::from_json, py::arg("text"));

    m.def("successors", &successors, py::arg("pi"),
          "Every class grown by one observation, plus the new singleton");
    m.def("plugin_entropy", &plugin_entropy, py::arg("pi"));
    m.def("plugin_additive", &plugin_additive, py::arg("pi"), py::arg("f"));
    m.def("entropy_of_masses", &entropy_of_masses, py::arg("masses"));
    m.def("sample_class", &sample_class, py::arg("masses"), py::arg("u"),
          "Covering class index, or None when u lands in the tail");
    m.def(
        "simulate_partition",
        [](const RankedMasses& masses, std::int64_t n, RandomStream& rng,
           double max_tail) { return simulate_partition(masses, n, rng, max_tail); },
        py::arg("masses"), py::arg("n"), py::arg("rng"), py::arg("max_tail") = 1e-9);

    py::class_<PdpParams>(m, "PdpParams",
                          "Discount alpha in [0,1) and concentration theta > -alpha")
        .def(py::init<double, double>(), py::arg("alpha"), py::arg("theta"))
        .def_readonly("alpha", &PdpParams::alpha)
        .def_readonly("theta", &PdpParams::theta)
        .def("__repr__", [](const PdpParams& p) {
            std::ostringstream out;
            out << "PdpParams(alpha=" << p.alpha << ", theta=" << p.theta << ")";
            return out.str();
        });

    py::class_<PosteriorEntropyParts>(m, "PosteriorEntropyParts")
        .def_readonly("a_term", &PosteriorEntropyParts::a_term)
        .def_readonly("b_term", &PosteriorEntropyParts::b_term)
        .def_readonly("value", &PosteriorEntropyParts::value);

    py::class_<StickDraw>(m, "StickDraw")
        .def_readonly("size_biased", &StickDraw::size_biased)
        .def_readonly("tail", &StickDraw::tail)
        .def_property_readonly("count", &StickDraw::count)
        .def("ranked", &StickDraw::ranked);

    py::class_<PosteriorDraw>(m, "PosteriorDraw")
        .def_readonly("masses", &PosteriorDraw::masses)
        .def_readonly("sticks_drawn", &PosteriorDraw::sticks_drawn);

    m.def(
        "crp_transition",
        [](const PdpParams& params, const PartitionCounts& pi) {
            return crp_transition(params, pi).probs;
        },
        py::arg("params"), py::arg("pi"),
        "Seating probabilities: one entry per class plus the new-class mass");
    m.def("crp_sample", &crp_sample, py::arg("params"), py::arg("n"), py::arg("rng"));
    m.def("stick_breaking", &stick_breaking, py::arg("params"), py::arg("tail_eps"),
          py::arg("rng"));
    m.def("gamma_draw", &gamma_draw, py::arg("shape"), py::arg("rng"));
    m.def("beta_draw", &beta_draw, py::arg("a"), py::arg("b"), py::arg("rng"));
    m.def("dirichlet_draw", &dirichlet_draw, py::arg("shapes"), py::arg("rng"));
    m.def("prior_mean_entropy", &prior_mean_entropy, py::arg("params"));
    m.def("posterior_entropy", &posterior_entropy, py::arg("params"), py::arg("pi"));
    m.def("posterior_sample", &posterior_sample, py::arg("params"), py::arg("pi"),
          py::arg("tail_eps"), py::arg("rng"));
    m.def("expected_tail_entropy", &expected_tail_entropy, py::arg("params"),
          py::arg("masses"), py::arg("sticks_drawn"));

    py::class_<TraceCheckpoint>(m, "TraceCheckpoint")
        .def_readonly("n", &TraceCheckpoint::n)
        .def_readonly("plugin", &TraceCheckpoint::plugin)
        .def_readonly("posterior", &TraceCheckpoint::posterior)
        .def_readonly("truth", &TraceCheckpoint::truth)
        .def_readonly("abs_err_plugin", &TraceCheckpoint::abs_err_plugin)
        .def_readonly("abs_err_posterior", &TraceCheckpoint::abs_err_posterior)
        .def_readonly("gap", &TraceCheckpoint::gap);

    py::class_<EstimateTrace>(m, "EstimateTrace")
        .def_readonly("trial", &EstimateTrace::trial)
        .def_readonly("checkpoints", &EstimateTrace::checkpoints);

    py::class_<CheckpointSummary>(m, "CheckpointSummary")
        .def_readonly("n", &CheckpointSummary::n)
        .def_readonly("mean_err_plugin", &CheckpointSummary::mean_err_plugin)
        .def_readonly("median_err_plugin", &CheckpointSummary::median_err_plugin)
        .def_readonly("std_err_plugin", &CheckpointSummary::std_err_plugin)
        .def_readonly("mean_err_posterior", &CheckpointSummary::mean_err_posterior)
        .def_readonly("median_err_posterior", &CheckpointSummary::median_err_posterior)
        .def_readonly("std_err_posterior", &CheckpointSummary::std_err_posterior)
        .def_readonly("mean_gap", &CheckpointSummary::mean_gap)
        .def_readonly("median_gap", &CheckpointSummary::median_gap)
        .def_readonly("std_err_gap", &CheckpointSummary::std_err_gap);

    py::class_<ConvergenceResult>(m, "ConvergenceResult")
        .def_readonly("traces", &ConvergenceResult::traces)
        .def_readonly("summary", &ConvergenceResult::summary);

    py::class_<MonteCarloCheck>(m, "MonteCarloCheck")
        .def_readonly("mc_mean", &MonteCarloCheck::mc_mean)
        .def_readonly("std_err", &MonteCarloCheck::std_err)
        .def_readonly("closed_form", &MonteCarloCheck::closed_form)
        .def("z", &MonteCarloCheck::z);

    m.def("martingale_residual", &martingale_residual, py::arg("params"), py::arg("pi"),
          "Exact one-step conservation defect of the posterior entropy");
    m.def("increasing_process_step", &increasing_process_step, py::arg("params"),
          py::arg("pi"));
    m.def(
        "convergence_experiment",
        [](const PdpParams& params, std::vector<std::int64_t> checkpoints,
           std::int64_t trials, std::uint64_t seed, std::uint64_t base_stream_id,
           double tail_eps, int threads) {
            return convergence_experiment(params, std::move(checkpoints), trials, seed,
                                          base_stream_id, tail_eps, threads);
        },
        py::arg("params"), py::arg("checkpoints"), py::arg("trials"), py::arg("seed"),
        py::arg("base_stream_id") = 0, py::arg("tail_eps") = 1e-9,
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "convergence_experiment_masses",
        [](const RankedMasses& masses, std::vector<std::int64_t> checkpoints,
           std::int64_t trials, std::uint64_t seed, std::uint64_t base_stream_id,
           int threads) {
            return convergence_experiment(masses, std::move(checkpoints), trials, seed,
                                          base_stream_id, threads);
        },
        py::arg("masses"), py::arg("checkpoints"), py::arg("trials"), py::arg("seed"),
        py::arg("base_stream_id") = 0, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());
    m.def("prior_mean_check", &prior_mean_check, py::arg("params"), py::arg("trials"),
          py::arg("seed"), py::arg("base_stream_id") = 0, py::arg("tail_eps") = 1e-12,
          py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("posterior_agreement_check", &posterior_agreement_check, py::arg("params"),
          py::arg("pi"), py::arg("trials"), py::arg("seed"),
          py::arg("base_stream_id") = 0, py::arg("tail_eps") = 1e-12,
          py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("plugin_bias_check", &plugin_bias_check, py::arg("masses"), py::arg("n"),
          py::arg("trials"), py::arg("seed"), py::arg("base_stream_id") = 0,
          py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def(
        "trace_csv",
        [](const ConvergenceResult& result) {
            std::ostringstream out;
            write_trace_csv(out, result);
            return out.str();
        },
        py::arg("result"));
    m.def("summary_json", &summary_to_json, py::arg("result"));
}
