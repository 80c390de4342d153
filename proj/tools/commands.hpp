#pragma once

#include <ostream>

#include "scenario.hpp"
#include "table_io.hpp"

namespace cli {

// Exit codes shared by main: 0 ok, 2 config error, 3 unstable queue,
// 4 numeric failure.
enum ExitCode { kOk = 0, kConfigError = 2, kUnstable = 3, kNumericFailure = 4 };

Table cmd_bound(const Scenario& sc);
Table cmd_simulate(const Scenario& sc);
Table cmd_effcap(const Scenario& sc);
Table cmd_epsopt(const Scenario& sc);

/// Runs the oracle-equivalence / cross-form / ordering suite; prints one
/// PASS or FAIL line per check. Returns true when everything passed.
bool cmd_validate(const Scenario& sc, std::ostream& out);

/// True when every row of a bound table reports an unstable queue.
bool all_rows_unstable(const Table& t);

}  // namespace cli
