#pragma once

#include <iosfwd>
#include <string>

#include "tripssqp/config.hpp"
#include "tripssqp/solver.hpp"

namespace tripssqp {

inline constexpr const char* kTraceCsvHeader = "# tripssqp-trace v1";
inline constexpr const char* kTraceJsonSchema = "tripssqp-trace/1";

/// {schema, problem, method, config, status, message, totals, final, iterations}
/// with one array per IterationRecord field under "iterations".
Json trace_to_json(const RunTrace& trace, const Json& config_echo);

/// Version comment line, column header, then one row per iteration.
void write_trace_csv(const RunTrace& trace, std::ostream& out);

}  // namespace tripssqp
