#include "witness_forge/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "witness_forge/baselines.hpp"
#include "witness_forge/error.hpp"
#include "witness_forge/io.hpp"
#include "witness_forge/measurement.hpp"
#include "witness_forge/optimizer.hpp"
#include "witness_forge/parallel.hpp"
#include "witness_forge/presets.hpp"
#include "witness_forge/reproduce.hpp"

namespace witness_forge::cli {

namespace {

using io::Json;

struct Shared {
  std::uint64_t seed = 0;
  int threads = 0;
  int cutoff = 0;
  std::string out_path;
  std::string format = "json";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string kPresetPrefix = "preset:";

WitnessSpec preset_witness(const std::string& name) {
  if (name == "bell") return presets::bell_witness();
  if (name == "bell_symmetric") return presets::bell_symmetric_witness();
  if (name == "tmsv_circle") return presets::tmsv_circle_witness(presets::tmsv_r_max(0.5));
  if (name == "subtracted_global") return presets::subtracted_global_witness();
  if (name == "subtracted_local") return presets::subtracted_local_witness();
  for (const auto& cat : presets::cat_witnesses()) {
    if (name == "cat_" + cat.name) return cat.witness;
  }
  throw UsageError("unknown witness preset \"" + name + "\"");
}

StateModel preset_state(const std::string& name) {
  if (name == "bell") return presets::bell_state();
  if (name == "tmsv") return Tmsv{0.5};
  if (name == "subtracted_global") return PhotonSubtractedTmsv{0.5, 0.5};
  if (name == "subtracted_local") return PhotonSubtractedTmsv{0.5, 1.0};
  if (name == "cat") return NoisyFourModeCat{presets::kCatGamma, 0.0};
  if (name == "vacuum") return CoherentSuperposition{2, {{Complex{1.0, 0.0}, {Complex{}, Complex{}}}}};
  throw UsageError("unknown state preset \"" + name + "\"");
}

WitnessSpec load_witness(const std::string& source) {
  if (source.rfind(kPresetPrefix, 0) == 0) return preset_witness(source.substr(kPresetPrefix.size()));
  return io::witness_from_json(io::load_json_file(source));
}

Json load_state_json(const std::string& source) {
  if (source.rfind(kPresetPrefix, 0) == 0) return io::state_to_json(preset_state(source.substr(kPresetPrefix.size())));
  return io::load_json_file(source);
}

StateModel load_state(const std::string& source) { return io::state_from_json(load_state_json(source)); }

// "0,1:2:3" -> {{0,1},{2},{3}}
PartitionSpec parse_partition(const std::string& text, int n_modes) {
  if (text.empty()) return PartitionSpec::full(n_modes);
  std::vector<std::vector<int>> blocks;
  std::stringstream blocks_in(text);
  std::string block;
  while (std::getline(blocks_in, block, ':')) {
    std::vector<int> modes;
    std::stringstream modes_in(block);
    std::string mode;
    while (std::getline(modes_in, mode, ',')) {
      try {
        modes.push_back(std::stoi(mode));
      } catch (const std::exception&) {
        throw UsageError("bad mode index \"" + mode + "\" in --partition");
      }
    }
    blocks.push_back(std::move(modes));
  }
  try {
    return PartitionSpec(n_modes, blocks);
  } catch (const Error& e) {
    throw UsageError(std::string("--partition: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number \"") + item + "\" in " + flag);
    }
  }
  return values;
}

class Output {
 public:
  Output(const Shared& shared, std::ostream& fallback) : shared_(shared), fallback_(fallback) {}

  void write(const std::string& text) {
    if (shared_.out_path.empty()) {
      fallback_ << text;
      return;
    }
    std::ofstream file(shared_.out_path);
    if (!file) throw UsageError("cannot write " + shared_.out_path);
    file << text;
  }
  void json(const Json& j) { write(j.dump(2) + "\n"); }

 private:
  const Shared& shared_;
  std::ostream& fallback_;
};

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement witnesses from displaced photon-number correlations", "witness_forge"};
  app.require_subcommand(1);
  app.fallthrough();

  Shared shared;
  app.add_option("--seed", shared.seed, "Seed for every randomized step");
  app.add_option("--threads", shared.threads, "Worker threads (default: WITNESS_FORGE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--cutoff", shared.cutoff, "Fock cutoff n_max for oracle-based steps (default: automatic)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", shared.out_path, "Write the result to this file instead of stdout");
  app.add_option("--format", shared.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  std::string witness_src, state_src;
  int starts = kDefaultSevStarts;
  bool no_quintic = false;

  auto* eval = app.add_subcommand("eval", "Evaluate <L>, g_min and the verdict for a witness on a state");
  eval->add_option("witness", witness_src, "Witness JSON file or preset:<name>")->required();
  eval->add_option("state", state_src, "State JSON file or preset:<name>")->required();
  eval->add_option("--starts", starts, "Multistart count for g_min")->check(CLI::PositiveNumber);

  auto* sev = app.add_subcommand("sev", "Solve for the separability bound g_min of a witness");
  sev->add_option("witness", witness_src, "Witness JSON file or preset:<name>")->required();
  sev->add_option("--starts", starts, "Multistart count")->check(CLI::PositiveNumber);
  sev->add_flag("--no-quintic", no_quintic, "Skip the exact collinear m=3 route");

  std::string partition_text, ga_config_path;
  int m = 3;
  std::optional<int> population, generations;
  std::string phases_text;
  bool optimize_lambdas = false;
  auto* optimize = app.add_subcommand("optimize", "Genetic optimization of a witness for a state");
  optimize->add_option("state", state_src, "State JSON file or preset:<name>")->required();
  optimize->add_option("--partition", partition_text, "Blocks as 0,1:2:3 (default: one block per mode)");
  optimize->add_option("--m", m, "Number of displacement rows")->check(CLI::PositiveNumber);
  optimize->add_option("--config", ga_config_path, "GA configuration JSON");
  optimize->add_option("--population", population, "Population size");
  optimize->add_option("--generations", generations, "Number of generations");
  optimize->add_option("--collinear-phases", phases_text, "Per-mode phases, comma separated");
  optimize->add_flag("--optimize-lambdas", optimize_lambdas, "Also evolve the row weights");

  std::string field = "/sigma", grid_text, ansatz;
  double from = 0.0, to = 0.2;
  int steps = 21;
  bool critical = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate a witness along a one-parameter state family");
  sweep_cmd->add_option("state", state_src, "Base state JSON file or preset:<name>")->required();
  sweep_cmd->add_option("--witness", witness_src, "Fixed witness (file or preset:<name>)");
  sweep_cmd->add_option("--ansatz", ansatz, "Per-point witness instead: tmsv_circle (parameter is the radius)");
  sweep_cmd->add_option("--field", field, "JSON pointer of the swept state field, e.g. /sigma, /xi/re");
  sweep_cmd->add_option("--from", from, "Grid start");
  sweep_cmd->add_option("--to", to, "Grid end");
  sweep_cmd->add_option("--steps", steps, "Number of grid points")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--grid", grid_text, "Explicit comma-separated grid (overrides --from/--to/--steps)");
  sweep_cmd->add_flag("--critical", critical, "Also bisect for the first sign change of <L> - g_min");

  long shots = 100000;
  std::string etas_text;
  int workers = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo of the randomized-displacement measurement");
  simulate_cmd->add_option("witness", witness_src, "Witness JSON file or preset:<name>")->required();
  simulate_cmd->add_option("state", state_src, "State JSON file or preset:<name>")->required();
  simulate_cmd->add_option("--shots", shots, "Number of shots")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--eta", etas_text, "Per-mode detection efficiencies, comma separated");
  simulate_cmd->add_option("--workers", workers, "Shot workers (default: --threads)");

  std::string criterion = "both";
  auto* baseline = app.add_subcommand("baseline", "Simon and Duan covariance criteria");
  baseline->add_option("state", state_src, "Two-mode state JSON file or preset:<name>")->required();
  baseline->add_option("--criterion", criterion, "simon, duan or both")->check(CLI::IsMember({"simon", "duan", "both"}));

  std::vector<std::string> cases;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "Recompute the reference results and grade them");
  reproduce_cmd->add_option("cases", cases, "Cases to run (default: all)");

  std::vector<std::string> argv_copy(args.rbegin(), args.rend());
  try {
    app.parse(argv_copy);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (shared.threads > 0) set_thread_count(shared.threads);
  const std::optional<FockCutoff> cutoff =
      shared.cutoff > 0 ? std::optional<FockCutoff>(FockCutoff(shared.cutoff)) : std::nullopt;
  const bool csv = shared.format == "csv";
  const bool explicit_format = app.get_option("--format")->count() > 0;
  Output output(shared, out);
  const SevOptions sev_opts{starts, shared.seed, !no_quintic};

  try {
    if (*eval) {
      const WitnessSpec w = load_witness(witness_src);
      const StateModel s = load_state(state_src);
      EvaluationReport r;
      if (cutoff) {
        if (mode_count(s) != w.n_modes()) expectation_L(s, w);  // raises the mismatch diagnostic
        r = make_report(fock_expectation_L(state_to_fock(s, *cutoff), w), solve_sev(w, sev_opts).g_min);
      } else {
        r = evaluate(w, s, sev_opts);
      }
      if (csv) {
        output.write(csv_line({"expectation", "g_min", "witness_value", "entangled"}) +
                     csv_line({io::format_double(r.expectation), io::format_double(r.g_min),
                               io::format_double(r.witness_value), csv_bool(r.entangled)}));
      } else {
        output.json(io::report_to_json(r));
      }
    } else if (*sev) {
      const WitnessSpec w = load_witness(witness_src);
      const SevSolution sol = solve_sev(w, sev_opts);
      if (csv) {
        std::string text = csv_line({"value", "amplitudes"});
        for (const auto& p : sol.stationary_points) {
          std::string amps;
          for (Eigen::Index j = 0; j < p.amplitudes.size(); ++j) {
            amps += (j ? " " : "") + io::format_double(p.amplitudes(j).real()) + (p.amplitudes(j).imag() < 0 ? "" : "+") +
                    io::format_double(p.amplitudes(j).imag()) + "i";
          }
          text += csv_line({io::format_double(p.value), amps});
        }
        output.write(text);
      } else {
        output.json(io::sev_to_json(sol));
      }
    } else if (*optimize) {
      const StateModel s = load_state(state_src);
      GaConfig config = ga_config_path.empty() ? GaConfig{} : io::ga_config_from_json(io::load_json_file(ga_config_path));
      // --seed applies unless the config file pins its own
      if (ga_config_path.empty() || !io::load_json_file(ga_config_path).contains("seed")) config.seed = shared.seed;
      if (population) config.population = *population;
      if (generations) config.generations = *generations;
      if (!phases_text.empty()) config.collinear_phases = parse_list(phases_text, "--collinear-phases");
      if (optimize_lambdas) config.optimize_lambdas = true;
      config.threads = shared.threads;
      const PartitionSpec partition = parse_partition(partition_text, mode_count(s));
      const GaResult res = ga_optimize(s, partition, m, config);
      if (csv) {
        std::string text = csv_line({"generation", "best_fitness"});
        for (size_t g = 0; g < res.best_history.size(); ++g) {
          text += csv_line({std::to_string(g), io::format_double(res.best_history[g])});
        }
        output.write(text);
      } else {
        output.json(Json{{"witness", io::witness_to_json(res.witness)},
                         {"report", io::report_to_json(res.report)},
                         {"best_fitness", res.best_fitness},
                         {"history", res.best_history},
                         {"config", io::ga_config_to_json(config)}});
      }
    } else if (*sweep_cmd) {
      if (witness_src.empty() == ansatz.empty()) throw UsageError("sweep needs exactly one of --witness or --ansatz");
      if (!ansatz.empty() && ansatz != "tmsv_circle") throw UsageError("unknown ansatz \"" + ansatz + "\"");
      const Json base = load_state_json(state_src);
      Json::json_pointer pointer;
      try {
        pointer = Json::json_pointer(field);
      } catch (const Json::exception&) {
        throw UsageError("--field must be a JSON pointer such as /sigma");
      }
      if (!base.contains(pointer) || !base.at(pointer).is_number()) {
        fail(ErrorCode::SchemaError, "state" + field + ": no numeric field to sweep");
      }
      StateFamily family = [&](double p) {
        Json j = base;
        j[pointer] = p;
        return io::state_from_json(j);
      };
      std::vector<double> grid;
      if (!grid_text.empty()) {
        grid = parse_list(grid_text, "--grid");
      } else {
        for (int i = 0; i < steps; ++i) grid.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
      }
      SweepResult result;
      std::optional<double> crit;
      auto bracket_critical = [&]() -> std::optional<size_t> {
        for (size_t i = 1; i < result.rows.size(); ++i) {
          if ((result.rows[i - 1].witness_value < 0.0) != (result.rows[i].witness_value < 0.0)) return i;
        }
        return std::nullopt;
      };
      if (!ansatz.empty()) {
        const Json xi_json = base.contains("xi") ? base["xi"] : Json(0.5);
        const Complex xi = io::complex_from_json(xi_json, "state.xi");
        WitnessFamily wf = [xi](double r) { return presets::tmsv_circle_witness(r, xi); };
        result = sweep(family, wf, grid, sev_opts, shared.threads);
        if (critical) {
          if (auto i = bracket_critical()) {
            crit = bisect_critical(family, wf, result.rows[*i - 1].param,
                                   result.rows[*i].param, 1e-6, sev_opts);
          }
        }
      } else {
        const WitnessSpec w = load_witness(witness_src);
        result = sweep(family, w, grid, sev_opts, shared.threads);
        if (critical) {
          if (auto i = bracket_critical()) {
            crit = bisect_critical(family, w, result.rows[*i - 1].param,
                                   result.rows[*i].param, 1e-6, sev_opts);
          }
        }
      }
      if (critical && !crit) err << "note: no sign change of <L> - g_min on the grid\n";
      if (csv) {
        output.write(io::sweep_to_csv(result));
        if (crit) err << "critical " << io::format_double(*crit) << "\n";
      } else {
        Json j = io::sweep_to_json(result);
        if (critical) j["critical"] = crit ? Json(*crit) : Json(nullptr);
        output.json(j);
      }
    } else if (*simulate_cmd) {
      const WitnessSpec w = load_witness(witness_src);
      const StateModel s = load_state(state_src);
      SimulationOptions opts;
      opts.cutoff = cutoff;
      if (!etas_text.empty()) opts.etas = parse_list(etas_text, "--eta");
      opts.workers = workers > 0 ? workers : shared.threads;
      const MeasurementEstimate e = simulate(w, s, shots, shared.seed, opts);
      if (csv) {
        output.write(csv_line({"mean", "stderr", "shots", "seed"}) +
                     csv_line({io::format_double(e.mean), io::format_double(e.std_error), std::to_string(e.shots),
                               std::to_string(e.seed)}));
      } else {
        output.json(io::estimate_to_json(e));
      }
    } else if (*baseline) {
      const StateModel s = load_state(state_src);
      const RMatrix cov = state_covariance(s, cutoff);
      std::vector<BaselineResult> results;
      if (criterion != "duan") results.push_back(simon_criterion(cov));
      if (criterion != "simon") results.push_back(duan_criterion(cov));
      if (csv) {
        std::string text = csv_line({"criterion", "value", "entangled"});
        for (const auto& r : results) {
          text += csv_line({std::string(to_string(r.criterion)), io::format_double(r.value), csv_bool(r.entangled)});
        }
        output.write(text);
      } else if (results.size() == 1) {
        output.json(io::baseline_to_json(results.front()));
      } else {
        Json arr = Json::array();
        for (const auto& r : results) arr.push_back(io::baseline_to_json(r));
        output.json(arr);
      }
    } else if (*reproduce_cmd) {
      std::vector<ReproduceCase> selected;
      if (cases.empty() || (cases.size() == 1 && cases.front() == "all")) {
        selected = all_reproduce_cases();
      } else {
        for (const auto& name : cases) {
          const auto c = parse_reproduce_case(name);
          if (!c) throw UsageError("unknown reproduce case \"" + name + "\"");
          selected.push_back(*c);
        }
      }
      bool all_pass = true;
      std::string text;
      Json arr = Json::array();
      for (ReproduceCase c : selected) {
        const ReproduceReport rep = reproduce(c, {shared.seed, shared.threads});
        all_pass = all_pass && rep.passed();
        if (csv) {
          if (text.empty()) text = csv_line({"case", "quantity", "computed", "target", "tolerance", "result"});
          for (const auto& r : rep.rows) {
            text += csv_line({std::string(to_string(c)), "\"" + r.quantity + "\"", io::format_double(r.computed),
                              r.graded && !std::isnan(r.target) ? io::format_double(r.target) : "",
                              r.graded && !std::isnan(r.tolerance) ? io::format_double(r.tolerance) : "",
                              !r.graded ? "info" : (r.pass ? "PASS" : "FAIL")});
          }
        } else if (explicit_format) {
          Json rows = Json::array();
          for (const auto& r : rep.rows) {
            Json row{{"quantity", r.quantity}, {"computed", r.computed}, {"graded", r.graded}, {"pass", r.pass}};
            if (!std::isnan(r.target)) row["target"] = r.target;
            if (!std::isnan(r.tolerance)) row["tolerance"] = r.tolerance;
            rows.push_back(std::move(row));
          }
          arr.push_back(Json{{"case", std::string(to_string(c))}, {"pass", rep.passed()}, {"seconds", rep.seconds},
                             {"rows", std::move(rows)}});
        } else {
          text += format_report(rep) + (rep.passed() ? "case PASS\n\n" : "case FAIL\n\n");
        }
      }
      if (!arr.empty()) {
        output.json(arr);
      } else {
        if (!csv) text += all_pass ? "all cases PASS\n" : "some cases FAIL\n";
        output.write(text);
      }
      return all_pass ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::SchemaError:
      case ErrorCode::ModelMismatch:
      case ErrorCode::InvalidArgument:
        return 2;
      default:
        return 1;
    }
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace witness_forge::cli
