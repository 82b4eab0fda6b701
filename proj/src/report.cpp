#include "gwh/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace gwh {

Json to_json(const EstimatorReport& r) {
    Json j;
    j["name"] = r.name;
    j["alpha"] = r.alpha;
    j["point"] = r.point;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["n_samples"] = r.n_samples;
    j["seed"] = r.seed;
    Json params = Json::object();
    for (const auto& [k, v] : r.parameters) params[k] = v;
    j["parameters"] = params;
    j["warnings"] = r.warnings;
    return j;
}

Json to_json(const IdentityCheck& c) {
    Json j;
    j["name"] = c.name;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["diff"] = c.diff;
    j["se"] = c.se;
    j["z"] = c.z;
    j["notes"] = c.notes;
    return j;
}

Json to_json(const OdeResidual& r, double alpha) {
    Json j;
    j["alpha"] = alpha;
    j["ell"] = r.ell;
    j["residual"] = r.residual;
    j["se"] = r.se;
    j["z"] = r.se > 0.0 ? r.residual / r.se : 0.0;
    return j;
}

Json to_json(const SpeedReport& s) {
    Json j;
    j["speed"] = to_json(s.speed);
    j["denominator"] = s.denominator;
    j["den_ci_low"] = s.den_ci_low;
    j["den_ci_high"] = s.den_ci_high;
    return j;
}

Json to_json(const ScanRow& row, const std::string& key_name) {
    Json j;
    j[key_name] = row.key;
    j["value"] = row.value;
    j["ci_low"] = row.ci_low;
    j["ci_high"] = row.ci_high;
    return j;
}

Json to_json(const LaplaceCheck& c) {
    Json j;
    j["empirical"] = c.empirical;
    j["closed_form"] = c.closed_form;
    j["se"] = c.se;
    j["z"] = c.z;
    return j;
}

Json to_json(const ShapeFit& f) {
    Json j;
    j["d"] = f.d;
    j["sup_err"] = f.sup_err;
    j["sup_z"] = f.sup_z;
    return j;
}

Json solve_summary(const SolveResult& res) {
    Json j;
    j["alpha"] = res.pool.alpha;
    j["pool_size"] = res.pool.size();
    j["iterations"] = res.pool.iterations;
    j["seed"] = res.pool.seed;
    j["converged"] = res.converged;
    j["final_d1"] = res.pool.final_d1;
    j["mean"] = res.pool.mean();
    j["min_sample"] = res.pool.min_sample();
    j["d1_history"] = res.d1_history;
    return j;
}

Json report_envelope(const std::string& subcommand, Json config, Json results,
                     bool with_timestamp) {
    Json j;
    j["schema_version"] = 1;
    j["tool"] = "gwharm";
    j["subcommand"] = subcommand;
    if (with_timestamp) {
        auto now = std::chrono::system_clock::now();
        std::time_t t = std::chrono::system_clock::to_time_t(now);
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["timestamp"] = buf;
    }
    j["config"] = std::move(config);
    j["results"] = std::move(results);
    return j;
}

void write_report(const Json& j, const std::string& path) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
}

void write_scan_csv(const std::vector<ScanRow>& rows, const std::string& key_name,
                    const std::string& path) {
    std::string text = key_name + ",value,ci_low,ci_high\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", r.key,
                      r.value, r.ci_low, r.ci_high);
        text += line;
    }
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << text;
}

}  // namespace gwh
