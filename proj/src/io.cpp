#include "witness_forge/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "witness_forge/error.hpp"

namespace witness_forge::io {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  fail(ErrorCode::SchemaError, where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) schema(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) schema(where, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) schema(where, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& where) {
  if (!j.is_array()) schema(where, "expected an array");
  return j;
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  std::vector<double> out;
  for (size_t i = 0; i < array(j, where).size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Complex> complex_list(const Json& j, const std::string& where) {
  std::vector<Complex> out;
  for (size_t i = 0; i < array(j, where).size(); ++i) {
    out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json complex_list_json(const auto& values) {
  Json out = Json::array();
  for (const Complex& z : values) out.push_back(complex_to_json(z));
  return out;
}

// Library errors raised while building objects from valid JSON are still
// schema violations from the caller's perspective.
template <class Fn>
auto as_schema(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaError) throw;
    schema(where, e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

Json complex_to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) schema(where, "expected {\"re\": x, \"im\": y}");
  const double re = number(field(j, "re", where), where + ".re");
  const double im = j.contains("im") ? number(j["im"], where + ".im") : 0.0;
  return {re, im};
}

Json witness_to_json(const WitnessSpec& w) {
  Json rows = Json::array();
  for (int k = 0; k < w.m(); ++k) {
    Json row = Json::array();
    for (int j = 0; j < w.n_modes(); ++j) row.push_back(complex_to_json(w.displacement(k, j)));
    rows.push_back(std::move(row));
  }
  return Json{{"modes", w.n_modes()},
              {"partition", w.partition().blocks()},
              {"q_weights", w.q_weights()},
              {"lambda", w.lambdas()},
              {"displacements", std::move(rows)},
              {"scale", w.scale()}};
}

WitnessSpec witness_from_json(const Json& j) {
  const std::string root = "witness";
  const int n = integer(field(j, "modes", root), root + ".modes");
  if (n < 1) schema(root + ".modes", "must be >= 1");

  std::vector<std::vector<int>> blocks;
  if (j.contains("partition")) {
    const Json& p = array(j["partition"], root + ".partition");
    for (size_t l = 0; l < p.size(); ++l) {
      const std::string where = root + ".partition[" + std::to_string(l) + "]";
      std::vector<int> block;
      for (size_t i = 0; i < array(p[l], where).size(); ++i) {
        block.push_back(integer(p[l][i], where + "[" + std::to_string(i) + "]"));
      }
      blocks.push_back(std::move(block));
    }
  } else {
    for (int m = 0; m < n; ++m) blocks.push_back({m});
  }
  PartitionSpec partition = as_schema(root + ".partition", [&] { return PartitionSpec(n, blocks); });

  const Json& rows = array(field(j, "displacements", root), root + ".displacements");
  if (rows.empty()) schema(root + ".displacements", "needs at least one row");
  CMatrix d(static_cast<Eigen::Index>(rows.size()), n);
  for (size_t k = 0; k < rows.size(); ++k) {
    const std::string where = root + ".displacements[" + std::to_string(k) + "]";
    const std::vector<Complex> row = complex_list(rows[k], where);
    if (static_cast<int>(row.size()) != n) {
      schema(where, "has " + std::to_string(row.size()) + " entries, expected " + std::to_string(n));
    }
    for (int m = 0; m < n; ++m) d(static_cast<Eigen::Index>(k), m) = row[static_cast<size_t>(m)];
  }
  std::vector<double> lambdas;
  if (j.contains("lambda")) {
    lambdas = number_list(j["lambda"], root + ".lambda");
  } else {
    lambdas.assign(rows.size(), 1.0 / static_cast<double>(rows.size()));
  }
  std::optional<std::vector<double>> q;
  if (j.contains("q_weights")) q = number_list(j["q_weights"], root + ".q_weights");
  const double scale = j.contains("scale") ? number(j["scale"], root + ".scale") : 1.0;
  return as_schema(root, [&] { return WitnessSpec(partition, lambdas, d, q, scale); });
}

Json state_to_json(const StateModel& state) {
  if (const auto* s = std::get_if<CoherentSuperposition>(&state)) {
    Json terms = Json::array();
    for (const auto& t : s->terms) {
      terms.push_back(Json{{"coeff", complex_to_json(t.coeff)}, {"amplitudes", complex_list_json(t.amplitudes)}});
    }
    return Json{{"type", "coherent_superposition"}, {"modes", s->n_modes}, {"terms", std::move(terms)}};
  }
  if (const auto* s = std::get_if<Tmsv>(&state)) return Json{{"type", "tmsv"}, {"xi", complex_to_json(s->xi)}};
  if (const auto* s = std::get_if<PhotonSubtractedTmsv>(&state)) {
    return Json{{"type", "photon_subtracted_tmsv"}, {"xi", complex_to_json(s->xi)}, {"kappa", s->kappa}};
  }
  if (const auto* s = std::get_if<NoisyFourModeCat>(&state)) {
    return Json{{"type", "noisy_fourmode_cat"}, {"gamma", complex_to_json(s->gamma)}, {"sigma", s->sigma}};
  }
  const auto& rho = std::get<FockDensity>(state).matrix;
  Json rows = Json::array();
  for (long r = 0; r < rho.dim(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < rho.dim(); ++c) row.push_back(complex_to_json(rho.data()(r, c)));
    rows.push_back(std::move(row));
  }
  return Json{{"type", "fock_density"}, {"modes", rho.n_modes()}, {"n_max", rho.cutoff().n_max()}, {"matrix", rows}};
}

StateModel state_from_json(const Json& j) {
  const std::string root = "state";
  const Json& type_field = field(j, "type", root);
  if (!type_field.is_string()) schema(root + ".type", "expected a string");
  const std::string type = type_field.get<std::string>();
  StateModel state = [&]() -> StateModel {
    if (type == "coherent_superposition") {
      CoherentSuperposition s;
      s.n_modes = integer(field(j, "modes", root), root + ".modes");
      const Json& terms = array(field(j, "terms", root), root + ".terms");
      for (size_t t = 0; t < terms.size(); ++t) {
        const std::string where = root + ".terms[" + std::to_string(t) + "]";
        CoherentTerm term;
        term.coeff = terms[t].contains("coeff") ? complex_from_json(terms[t]["coeff"], where + ".coeff") : Complex{1.0, 0.0};
        term.amplitudes = complex_list(field(terms[t], "amplitudes", where), where + ".amplitudes");
        if (static_cast<int>(term.amplitudes.size()) != s.n_modes) {
          schema(where + ".amplitudes", "has " + std::to_string(term.amplitudes.size()) + " entries, expected " +
                                            std::to_string(s.n_modes));
        }
        s.terms.push_back(std::move(term));
      }
      return s;
    }
    if (type == "tmsv") return Tmsv{complex_from_json(field(j, "xi", root), root + ".xi")};
    if (type == "photon_subtracted_tmsv") {
      return PhotonSubtractedTmsv{complex_from_json(field(j, "xi", root), root + ".xi"),
                                  number(field(j, "kappa", root), root + ".kappa")};
    }
    if (type == "noisy_fourmode_cat") {
      return NoisyFourModeCat{complex_from_json(field(j, "gamma", root), root + ".gamma"),
                              j.contains("sigma") ? number(j["sigma"], root + ".sigma") : 0.0};
    }
    if (type == "fock_density") {
      const int n = integer(field(j, "modes", root), root + ".modes");
      const int n_max = integer(field(j, "n_max", root), root + ".n_max");
      const FockCutoff cutoff = as_schema(root + ".n_max", [&] { return FockCutoff(n_max); });
      if (n < 1) schema(root + ".modes", "must be >= 1");
      const long dim = fock_dimension(n, cutoff);
      const Json& rows = array(field(j, "matrix", root), root + ".matrix");
      if (static_cast<long>(rows.size()) != dim) {
        schema(root + ".matrix", "has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(dim));
      }
      CMatrix data(dim, dim);
      for (long r = 0; r < dim; ++r) {
        const std::string where = root + ".matrix[" + std::to_string(r) + "]";
        const std::vector<Complex> row = complex_list(rows[static_cast<size_t>(r)], where);
        if (static_cast<long>(row.size()) != dim) schema(where, "has wrong length");
        for (long c = 0; c < dim; ++c) data(r, c) = row[static_cast<size_t>(c)];
      }
      return FockDensity{as_schema(root + ".matrix", [&] { return DensityMatrix(n, cutoff, data); })};
    }
    schema(root + ".type", "unknown state type \"" + type + "\"");
  }();
  as_schema(root, [&] {
    validate_state(state);
    return 0;
  });
  return state;
}

Json ga_config_to_json(const GaConfig& c) {
  Json bounds = Json::array();
  for (const auto& b : c.bounds) bounds.push_back(Json::array({b.lo, b.hi}));
  Json j{{"population", c.population},
         {"generations", c.generations},
         {"mutation_sigma", c.mutation_sigma},
         {"mutation_decay", c.mutation_decay},
         {"crossover_rate", c.crossover_rate},
         {"elite_count", c.elite_count},
         {"tournament_size", c.tournament_size},
         {"seed", c.seed},
         {"bounds", bounds},
         {"optimize_lambdas", c.optimize_lambdas},
         {"fitness_starts", c.fitness_starts},
         {"report_starts", c.report_starts},
         {"polish_evaluations", c.polish_evaluations}};
  if (c.collinear_phases) j["collinear_phases"] = *c.collinear_phases;
  return j;
}

GaConfig ga_config_from_json(const Json& j) {
  const std::string root = "ga_config";
  if (!j.is_object()) schema(root, "expected an object");
  GaConfig c;
  auto opt_int = [&](const char* key, int& target) {
    if (j.contains(key)) target = integer(j[key], root + "." + key);
  };
  auto opt_num = [&](const char* key, double& target) {
    if (j.contains(key)) target = number(j[key], root + "." + key);
  };
  opt_int("population", c.population);
  opt_int("generations", c.generations);
  opt_num("mutation_sigma", c.mutation_sigma);
  opt_num("mutation_decay", c.mutation_decay);
  opt_num("crossover_rate", c.crossover_rate);
  opt_int("elite_count", c.elite_count);
  opt_int("tournament_size", c.tournament_size);
  opt_int("fitness_starts", c.fitness_starts);
  opt_int("report_starts", c.report_starts);
  opt_int("polish_evaluations", c.polish_evaluations);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) schema(root + ".seed", "expected an integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("optimize_lambdas")) {
    if (!j["optimize_lambdas"].is_boolean()) schema(root + ".optimize_lambdas", "expected a boolean");
    c.optimize_lambdas = j["optimize_lambdas"].get<bool>();
  }
  if (j.contains("bounds")) {
    c.bounds.clear();
    const Json& b = array(j["bounds"], root + ".bounds");
    for (size_t i = 0; i < b.size(); ++i) {
      const std::string where = root + ".bounds[" + std::to_string(i) + "]";
      const std::vector<double> pair = number_list(b[i], where);
      if (pair.size() != 2) schema(where, "expected [lo, hi]");
      c.bounds.push_back({pair[0], pair[1]});
    }
  }
  if (j.contains("collinear_phases")) c.collinear_phases = number_list(j["collinear_phases"], root + ".collinear_phases");
  as_schema(root, [&] {
    c.validate();
    return 0;
  });
  return c;
}

Json report_to_json(const EvaluationReport& r) {
  Json j{{"expectation", r.expectation},
         {"g_min", r.g_min},
         {"witness_value", r.witness_value},
         {"entangled", r.entangled}};
  j["margin_relative"] = r.margin_relative ? Json(*r.margin_relative) : Json(nullptr);
  return j;
}

Json sev_to_json(const SevSolution& s) {
  Json points = Json::array();
  for (const auto& p : s.stationary_points) {
    points.push_back(Json{{"amplitudes", complex_list_json(p.amplitudes)}, {"value", p.value}});
  }
  return Json{{"g_min", s.g_min},
              {"argmin", complex_list_json(s.argmin)},
              {"stationary_points", std::move(points)},
              {"residual", s.residual},
              {"starts_used", s.starts_used},
              {"method", std::string(to_string(s.method))}};
}

Json estimate_to_json(const MeasurementEstimate& e) {
  return Json{{"mean", e.mean},         {"stderr", e.std_error},         {"shots", e.shots},
              {"seed", e.seed},         {"per_k_counts", e.per_k_counts}, {"workers", e.workers},
              {"n_max", e.n_max},       {"mass_deficit", e.mass_deficit}};
}

Json baseline_to_json(const BaselineResult& r) {
  return Json{{"criterion", std::string(to_string(r.criterion))}, {"value", r.value}, {"entangled", r.entangled}};
}

Json sweep_to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    rows.push_back(Json{{"param", r.param}, {"expectation", r.expectation}, {"g_min", r.g_min},
                        {"witness_value", r.witness_value}});
  }
  return Json{{"rows", std::move(rows)}};
}

std::string sweep_to_csv(const SweepResult& s) {
  std::ostringstream out;
  out << "param,expectation,g_min,witness_value\n";
  for (const auto& r : s.rows) {
    out << format_double(r.param) << ',' << format_double(r.expectation) << ',' << format_double(r.g_min) << ','
        << format_double(r.witness_value) << '\n';
  }
  return out.str();
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const size_t upto = std::min(e.byte, text.size());
    size_t line = 1, column = 1;
    for (size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    fail(ErrorCode::SchemaError, source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                     ": invalid JSON");
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::SchemaError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path);
}

}  // namespace witness_forge::io
