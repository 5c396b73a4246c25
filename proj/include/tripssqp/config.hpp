#pragma once

#include <string>

#include <json.hpp>

#include "tripssqp/logistic.hpp"
#include "tripssqp/oracle.hpp"
#include "tripssqp/problem.hpp"
#include "tripssqp/solver.hpp"

namespace tripssqp {

using Json = nlohmann::ordered_json;

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& text);
std::string to_string(LogisticDataset kind);
LogisticDataset parse_logistic_dataset(const std::string& text);

// Field-by-field conversions. The readers start from `base` and overwrite
// only the keys present; any key that is not a field throws ConfigError.
Json to_json(const SolverConfig& config);
Json to_json(const OracleConfig& config);
Json to_json(const NoiseModel& noise);
Json to_json(const LogisticProblemConfig& config);

SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});
OracleConfig oracle_config_from_json(const Json& j, OracleConfig base = {});
NoiseModel noise_model_from_json(const Json& j, NoiseModel base = {});
LogisticProblemConfig logistic_config_from_json(const Json& j, LogisticProblemConfig base = {});

/// Parses a JSON file; throws ConfigError on I/O or syntax errors.
Json read_json_file(const std::string& path);

/// Throws ConfigError naming the first key of `j` outside `allowed`, or if
/// `j` is not an object.
void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace tripssqp
