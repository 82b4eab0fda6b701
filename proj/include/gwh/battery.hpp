#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace gwh {

// The verification battery runs the same fourteen checks at three scales.
// quick and smoke shrink pool sizes and replica counts; checks whose numeric
// targets are pinned to the full scale (fixed-point tolerance, estimator
// agreement, moment gap, entropy gap) still run there but are demoted to
// informational, so the quick exit code reflects only scale-free invariants.
enum class BatteryScale { full, quick, smoke };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool gating = true;  // informational results never flip the exit code
    double seconds = 0.0;
    std::string detail;  // deterministic for a fixed seed; no timings
};

struct BatteryOptions {
    BatteryScale scale = BatteryScale::full;
    std::uint64_t seed = 20240817;
    int threads = 0;
    std::string cli_path;  // binary spawned by the reproducibility check
    std::string workdir = "gwharm_battery_tmp";
};

const char* scale_name(BatteryScale s);

// Runs all criteria in order, streaming one log line each to `log`.
std::vector<CriterionResult> run_battery(const BatteryOptions& opts,
                                         std::ostream& log);

bool battery_passed(const std::vector<CriterionResult>& results);

// JSON body for the verify report.  Timings are deliberately left out so a
// rerun with the same seed is byte-identical.
nlohmann::ordered_json battery_json(const std::vector<CriterionResult>& results,
                                    const BatteryOptions& opts);

}  // namespace gwh
