#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadfun/estimators.hpp"

namespace quadfun {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInconsistent = 3 };

/// Runs one command line (without the program name). Machine output goes to
/// `out` as JSON or CSV, diagnostics and human summaries to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

/// Number rounded to 9 significant digits; non-finite values become the
/// strings "INF", "-INF" and "NAN".
nlohmann::json json_number(double value);

nlohmann::json report_to_json(const EstimateReport& report);
EstimateReport report_from_json(const nlohmann::json& doc);

}  // namespace quadfun
