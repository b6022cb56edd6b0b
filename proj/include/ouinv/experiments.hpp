#pragma once

#include "ouinv/config.hpp"
#include "ouinv/csv.hpp"

namespace ouinv {

/// Dispatches to the configured experiment, writes the CSV report atomically,
/// and returns 0 when every assertion of that experiment passes. The first
/// failed assertion is named on stderr and the exit code is 1.
int run(const RunConfig& config);

/// The report of the last run (for tests); run() fills it before returning.
const CsvReport& last_report();

} // namespace ouinv
