#pragma once

#include <cstdint>
#include <vector>

#include "tripssqp/problem.hpp"

namespace tripssqp {

/// Number of distinct problems in the built-in suite.
inline constexpr int kAnalyticSuiteSize = 10;

/// Small smooth test problems with embedded KKT solutions.
///
/// Problem i (mod kAnalyticSuiteSize) is returned at position i. Seed 0 keeps
/// the canonical starting points; any other seed jitters x0 deterministically,
/// which is also what distinguishes the repeated problems when
/// count > kAnalyticSuiteSize.
std::vector<ProblemInstance> make_analytic_suite(int count, std::uint64_t seed);

/// Looks a suite problem up by name (canonical start). Throws ConfigError.
ProblemInstance analytic_problem(const std::string& name);

}  // namespace tripssqp
