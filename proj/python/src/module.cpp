#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "witness_forge/baselines.hpp"
#include "witness_forge/error.hpp"
#include "witness_forge/fock.hpp"
#include "witness_forge/io.hpp"
#include "witness_forge/measurement.hpp"
#include "witness_forge/optimizer.hpp"
#include "witness_forge/parallel.hpp"
#include "witness_forge/presets.hpp"
#include "witness_forge/reproduce.hpp"
#include "witness_forge/states.hpp"
#include "witness_forge/witness.hpp"

namespace py = pybind11;
using namespace witness_forge;

namespace {

py::object json_to_py(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

io::Json py_to_json(const py::object& o) {
  return io::parse_json(py::module_::import("json").attr("dumps")(o).cast<std::string>(), "<python>");
}

void bind_models(py::module_& m) {
  py::class_<PartitionSpec>(m, "PartitionSpec")
      .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("n_modes"), py::arg("blocks"))
      .def_static("bipartite", &PartitionSpec::bipartite)
      .def_static("full", &PartitionSpec::full, py::arg("n_modes"))
      .def_property_readonly("n_modes", &PartitionSpec::n_modes)
      .def_property_readonly("blocks", &PartitionSpec::blocks)
      .def("__eq__", [](const PartitionSpec& a, const PartitionSpec& b) { return a == b; })
      .def("__repr__", [](const PartitionSpec& p) {
        return "PartitionSpec(" + std::to_string(p.n_modes()) + ", " + py::repr(py::cast(p.blocks())).cast<std::string>() + ")";
      });

  py::class_<WitnessSpec>(m, "WitnessSpec")
      .def(py::init<PartitionSpec, std::vector<double>, CMatrix, std::optional<std::vector<double>>, double>(),
           py::arg("partition"), py::arg("lambdas"), py::arg("displacements"), py::arg("q_weights") = py::none(),
           py::arg("scale") = 1.0)
      .def_static("uniform", &WitnessSpec::uniform, py::arg("partition"), py::arg("displacements"),
                  py::arg("q_weights") = py::none())
      .def_property_readonly("partition", &WitnessSpec::partition)
      .def_property_readonly("n_modes", &WitnessSpec::n_modes)
      .def_property_readonly("m", &WitnessSpec::m)
      .def_property_readonly("lambdas", &WitnessSpec::lambdas)
      .def_property_readonly("displacements", &WitnessSpec::displacements)
      .def_property_readonly("q_weights", &WitnessSpec::q_weights)
      .def_property_readonly("scale", &WitnessSpec::scale)
      .def("to_dict", [](const WitnessSpec& w) { return json_to_py(io::witness_to_json(w)); })
      .def_static("from_dict", [](const py::object& o) { return io::witness_from_json(py_to_json(o)); });

  py::class_<CoherentSuperposition>(m, "CoherentSuperposition")
      .def(py::init([](int n_modes, const std::vector<std::pair<Complex, std::vector<Complex>>>& terms) {
             CoherentSuperposition s{n_modes, {}};
             for (const auto& [c, a] : terms) s.terms.push_back({c, a});
             validate_state(s);
             return s;
           }),
           py::arg("n_modes"), py::arg("terms"))
      .def_readonly("n_modes", &CoherentSuperposition::n_modes);
  py::class_<Tmsv>(m, "Tmsv").def(py::init<Complex>(), py::arg("xi")).def_readonly("xi", &Tmsv::xi);
  py::class_<PhotonSubtractedTmsv>(m, "PhotonSubtractedTmsv")
      .def(py::init([](Complex xi, double kappa) {
             PhotonSubtractedTmsv s{xi, kappa};
             validate_state(s);
             return s;
           }),
           py::arg("xi"), py::arg("kappa") = 0.5)
      .def_readonly("xi", &PhotonSubtractedTmsv::xi)
      .def_readonly("kappa", &PhotonSubtractedTmsv::kappa);
  py::class_<NoisyFourModeCat>(m, "NoisyFourModeCat")
      .def(py::init([](Complex gamma, double sigma) {
             NoisyFourModeCat s{gamma, sigma};
             validate_state(s);
             return s;
           }),
           py::arg("gamma"), py::arg("sigma") = 0.0)
      .def_readonly("gamma", &NoisyFourModeCat::gamma)
      .def_readonly("sigma", &NoisyFourModeCat::sigma);
  py::class_<FockDensity>(m, "FockDensity")
      .def(py::init([](int n_modes, int n_max, const CMatrix& rho) {
             return FockDensity{DensityMatrix(n_modes, FockCutoff(n_max), rho)};
           }),
           py::arg("n_modes"), py::arg("n_max"), py::arg("matrix"))
      .def_property_readonly("matrix", [](const FockDensity& f) { return f.matrix.data(); })
      .def_property_readonly("n_max", [](const FockDensity& f) { return f.matrix.cutoff().n_max(); });

  m.def("bell_like_state", &bell_like_state, py::arg("epsilon"), py::arg("gamma"));
  m.def("four_mode_cat", &four_mode_cat, py::arg("gamma"));
  m.def("state_to_dict", [](const StateModel& s) { return json_to_py(io::state_to_json(s)); });
  m.def("state_from_dict", [](const py::object& o) { return io::state_from_json(py_to_json(o)); });
  m.def("mode_count", &mode_count);
}

void bind_solvers(py::module_& m) {
  py::class_<SevSolution>(m, "SevSolution")
      .def_readonly("g_min", &SevSolution::g_min)
      .def_readonly("argmin", &SevSolution::argmin)
      .def_readonly("residual", &SevSolution::residual)
      .def_readonly("starts_used", &SevSolution::starts_used)
      .def_property_readonly("method", [](const SevSolution& s) { return std::string(to_string(s.method)); })
      .def_property_readonly("stationary_points", [](const SevSolution& s) {
        py::list out;
        for (const auto& p : s.stationary_points) out.append(py::make_tuple(p.amplitudes, p.value));
        return out;
      });

  py::class_<EvaluationReport>(m, "EvaluationReport")
      .def_readonly("expectation", &EvaluationReport::expectation)
      .def_readonly("g_min", &EvaluationReport::g_min)
      .def_readonly("witness_value", &EvaluationReport::witness_value)
      .def_readonly("entangled", &EvaluationReport::entangled)
      .def_readonly("margin_relative", &EvaluationReport::margin_relative)
      .def("to_dict", [](const EvaluationReport& r) { return json_to_py(io::report_to_json(r)); });

  m.def("expectation_L", &expectation_L, py::arg("state"), py::arg("witness"));
  m.def("sev_objective", &sev_objective, py::arg("witness"), py::arg("amplitudes"));
  m.def(
      "solve_sev",
      [](const WitnessSpec& w, int n_starts, std::uint64_t seed, bool quintic) {
        py::gil_scoped_release release;
        return solve_sev(w, {n_starts, seed, quintic});
      },
      py::arg("witness"), py::arg("n_starts") = kDefaultSevStarts, py::arg("seed") = 0, py::arg("use_quintic") = true);
  m.def("solve_sev_collinear_m3", &solve_sev_collinear_m3, py::arg("witness"));
  m.def("is_collinear_m3", &is_collinear_m3, py::arg("witness"), py::arg("tol") = 1e-10);
  m.def(
      "evaluate",
      [](const WitnessSpec& w, const StateModel& s, int n_starts, std::uint64_t seed) {
        py::gil_scoped_release release;
        return evaluate(w, s, {n_starts, seed, true});
      },
      py::arg("witness"), py::arg("state"), py::arg("n_starts") = kDefaultSevStarts, py::arg("seed") = 0);
  m.def(
      "collapse_single_mode",
      [](const std::vector<double>& l, const std::vector<Complex>& a) {
        const SingleModeCollapse c = collapse_single_mode(l, a);
        return py::make_tuple(c.mean_amplitude, c.offset);
      },
      py::arg("lambdas"), py::arg("alphas"));
  m.def("apply_loss", &apply_loss, py::arg("witness"), py::arg("etas"));
  m.def("compensate_for_loss", &compensate_for_loss, py::arg("witness"), py::arg("etas"));

  m.def(
      "displaced_number_matrix",
      [](Complex alpha, int n_max) { return displaced_number_matrix(alpha, FockCutoff(n_max)).data; },
      py::arg("alpha"), py::arg("n_max"));
  m.def(
      "state_to_fock", [](const StateModel& s, int n_max) { return state_to_fock(s, FockCutoff(n_max)).data(); },
      py::arg("state"), py::arg("n_max"));
  m.def(
      "auto_cutoff", [](const StateModel& s) { return auto_cutoff(s).n_max(); }, py::arg("state"));
}

void bind_tools(py::module_& m) {
  py::class_<MeasurementEstimate>(m, "MeasurementEstimate")
      .def_readonly("mean", &MeasurementEstimate::mean)
      .def_readonly("std_error", &MeasurementEstimate::std_error)
      .def_readonly("shots", &MeasurementEstimate::shots)
      .def_readonly("seed", &MeasurementEstimate::seed)
      .def_readonly("per_k_counts", &MeasurementEstimate::per_k_counts)
      .def_readonly("workers", &MeasurementEstimate::workers)
      .def_readonly("n_max", &MeasurementEstimate::n_max)
      .def_readonly("mass_deficit", &MeasurementEstimate::mass_deficit);
  m.def(
      "simulate",
      [](const WitnessSpec& w, const StateModel& s, long shots, std::uint64_t seed, std::optional<int> n_max,
         std::optional<std::vector<double>> etas, int workers) {
        SimulationOptions o;
        if (n_max) o.cutoff = FockCutoff(*n_max);
        o.etas = std::move(etas);
        o.workers = workers;
        py::gil_scoped_release release;
        return simulate(w, s, shots, seed, o);
      },
      py::arg("witness"), py::arg("state"), py::arg("shots"), py::arg("seed") = 0, py::arg("n_max") = py::none(),
      py::arg("etas") = py::none(), py::arg("workers") = 0);

  py::class_<BaselineResult>(m, "BaselineResult")
      .def_property_readonly("criterion", [](const BaselineResult& r) { return std::string(to_string(r.criterion)); })
      .def_readonly("value", &BaselineResult::value)
      .def_readonly("entangled", &BaselineResult::entangled);
  m.def("simon_criterion", &simon_criterion, py::arg("covariance"));
  m.def("duan_criterion", &duan_criterion, py::arg("covariance"));
  m.def(
      "state_covariance",
      [](const StateModel& s, std::optional<int> n_max) {
        return state_covariance(s, n_max ? std::optional<FockCutoff>(FockCutoff(*n_max)) : std::nullopt);
      },
      py::arg("state"), py::arg("n_max") = py::none());

  py::class_<GaResult>(m, "GaResult")
      .def_readonly("witness", &GaResult::witness)
      .def_readonly("report", &GaResult::report)
      .def_readonly("genes", &GaResult::genes)
      .def_readonly("best_fitness", &GaResult::best_fitness)
      .def_readonly("best_history", &GaResult::best_history);
  m.def(
      "ga_optimize",
      [](const StateModel& s, const PartitionSpec& p, int m_rows, const py::object& config) {
        const GaConfig c = config.is_none() ? GaConfig{} : io::ga_config_from_json(py_to_json(config));
        py::gil_scoped_release release;
        return ga_optimize(s, p, m_rows, c);
      },
      py::arg("state"), py::arg("partition"), py::arg("m"), py::arg("config") = py::none());

  m.def(
      "reproduce",
      [](const std::string& name, std::uint64_t seed) {
        const auto c = parse_reproduce_case(name);
        if (!c) throw py::value_error("unknown reproduce case \"" + name + "\"");
        ReproduceReport rep;
        {
          py::gil_scoped_release release;
          rep = reproduce(*c, {seed, 0});
        }
        py::list rows;
        for (const auto& r : rep.rows) {
          py::dict row;
          row["quantity"] = r.quantity;
          row["computed"] = r.computed;
          row["target"] = r.target;
          row["tolerance"] = r.tolerance;
          row["graded"] = r.graded;
          row["pass"] = r.pass;
          rows.append(row);
        }
        py::dict out;
        out["case"] = name;
        out["pass"] = rep.passed();
        out["seconds"] = rep.seconds;
        out["rows"] = rows;
        return out;
      },
      py::arg("case"), py::arg("seed") = 0);
  m.def("reproduce_cases", [] {
    std::vector<std::string> names;
    for (ReproduceCase c : all_reproduce_cases()) names.emplace_back(to_string(c));
    return names;
  });
  m.def("set_thread_count", &set_thread_count, py::arg("threads"));
  m.def("thread_count", &thread_count);
}

void bind_presets(py::module_& m) {
  auto p = m.def_submodule("presets", "Reference witness and state configurations");
  p.def("bell_witness", &presets::bell_witness, py::arg("gamma") = presets::kBellGamma);
  p.def("bell_symmetric_witness", &presets::bell_symmetric_witness, py::arg("gamma") = presets::kBellGamma);
  p.def("bell_state", &presets::bell_state, py::arg("epsilon") = presets::kBellEpsilon,
        py::arg("gamma") = presets::kBellGamma);
  p.def("bell_q_points", &presets::bell_q_points, py::arg("gamma") = presets::kBellGamma);
  p.def("tmsv_circle_witness", &presets::tmsv_circle_witness, py::arg("r"), py::arg("xi") = Complex{0.5, 0.0});
  p.def("tmsv_r_crit", &presets::tmsv_r_crit, py::arg("xi"));
  p.def("tmsv_r_max", &presets::tmsv_r_max, py::arg("xi"));
  p.def("subtracted_global_witness", &presets::subtracted_global_witness);
  p.def("subtracted_local_witness", &presets::subtracted_local_witness);
  p.def("swap_modes", &presets::swap_modes, py::arg("witness"));
  p.def("cat_witnesses", [] {
    py::dict out;
    for (const auto& nw : presets::cat_witnesses()) out[py::str(nw.name)] = nw.witness;
    return out;
  });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entanglement witnesses from displaced photon-number correlations";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() -> py::object { return py::exception<Error>(m, "WitnessForgeError", PyExc_RuntimeError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object exc = type(std::string(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  bind_models(m);
  bind_solvers(m);
  bind_tools(m);
  bind_presets(m);
}
