#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gwh/analysis.hpp"
#include "gwh/ctgw.hpp"
#include "gwh/rde.hpp"

namespace gwh {

// All machine-readable output goes through ordered_json so key order, and
// therefore the byte stream, is deterministic for a given result set.
using Json = nlohmann::ordered_json;

Json to_json(const EstimatorReport& r);
Json to_json(const IdentityCheck& c);
Json to_json(const OdeResidual& r, double alpha);
Json to_json(const SpeedReport& s);
Json to_json(const ScanRow& row, const std::string& key_name);
Json to_json(const LaplaceCheck& c);
Json to_json(const ShapeFit& f);

// Convergence summary of a solve, without the samples themselves.
Json solve_summary(const SolveResult& res);

// Wrapper all CLI output shares: schema_version, tool, subcommand, config,
// results.  Wall-clock timestamps are opt-in because they break
// byte-identical reruns.
Json report_envelope(const std::string& subcommand, Json config, Json results,
                     bool with_timestamp = false);

// Serialize with a trailing newline; empty path or "-" prints to stdout.
void write_report(const Json& j, const std::string& path);

// "key,value,ci_low,ci_high" rows; same path convention as write_report.
void write_scan_csv(const std::vector<ScanRow>& rows, const std::string& key_name,
                    const std::string& path);

}  // namespace gwh
