// Acceptance battery driver: runs every verification criterion at full scale
// and prints one PASS/FAIL line each.  Exit code 0 means all gating criteria
// passed.  This is the same battery the `verify` subcommand exposes.

#include <cstdio>
#include <iostream>

#include "gwh/battery.hpp"

#ifndef GWHARM_CLI_PATH
#error "GWHARM_CLI_PATH must point at the command line binary"
#endif

int main() {
    gwh::BatteryOptions opts;
    opts.scale = gwh::BatteryScale::full;
    opts.cli_path = GWHARM_CLI_PATH;
    opts.workdir = "gwharm_acceptance_tmp";
    std::vector<gwh::CriterionResult> results = gwh::run_battery(opts, std::cout);
    bool pass = gwh::battery_passed(results);
    std::printf("acceptance: %s\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}
