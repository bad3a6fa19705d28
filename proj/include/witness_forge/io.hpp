#pragma once

// JSON schemas for witnesses, states and results; CSV for sweeps. Complex
// numbers are {"re": x, "im": y}. Mode indices in partitions are 0-based.
// Malformed input raises Error(SchemaError) naming the offending field.

#include <string>

#include "json.hpp"
#include "witness_forge/baselines.hpp"
#include "witness_forge/measurement.hpp"
#include "witness_forge/optimizer.hpp"
#include "witness_forge/states.hpp"
#include "witness_forge/witness.hpp"

namespace witness_forge::io {

using Json = nlohmann::json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& where = "$");

Json witness_to_json(const WitnessSpec& witness);
WitnessSpec witness_from_json(const Json& j);

Json state_to_json(const StateModel& state);
StateModel state_from_json(const Json& j);

Json ga_config_to_json(const GaConfig& config);
GaConfig ga_config_from_json(const Json& j);

Json report_to_json(const EvaluationReport& report);
Json sev_to_json(const SevSolution& solution);
Json estimate_to_json(const MeasurementEstimate& estimate);
Json baseline_to_json(const BaselineResult& result);
Json sweep_to_json(const SweepResult& sweep);

/// Header "param,expectation,g_min,witness_value", shortest round-trip floats.
std::string sweep_to_csv(const SweepResult& sweep);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

/// Parses text; syntax errors are reported with line and column.
Json parse_json(const std::string& text, const std::string& source = "<input>");
Json load_json_file(const std::string& path);

}  // namespace witness_forge::io
