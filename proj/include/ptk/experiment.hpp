#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ptk/kernels.hpp"

namespace ptk {

struct ExperimentConfig {
    int schema_version = 1;
    std::string pipeline;  // cantor | champagne | verify | hausdorff | full
    std::string profile_kind = "riesz";
    int d = 2;
    double alpha = 1.0;
    std::string phi_family = "cap_over_log";  // cap_over_log | cap_times_power | power
    double phi_exponent = 1.0;
    double domain_R = 1.0;
    double delta = 0.1;
    double eta = 0.1;
    double kappa = 0.0625;
    int depth = 3;
    long long samples = 10000;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
};

// strict parse: schema_version required, unknown fields rejected, numeric
// ranges checked, seed mandatory
ExperimentConfig parse_config(const std::string& json_text);
std::string config_canonical(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

CapacityProfile profile_from_config(const ExperimentConfig& cfg);
MeasureFunction phi_from_config(const ExperimentConfig& cfg,
                                const CapacityProfile& p);

struct RunRecord {
    std::uint64_t config_hash = 0;
    std::string pipeline;
    std::string started_at, finished_at;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, bool>> verdicts;
    std::vector<std::string> artifacts;

    void metric(const std::string& name, double value);
    void verdict(const std::string& name, bool pass);
    bool passed() const;
    double metric_value(const std::string& name) const;  // throws if absent
};

// runs the configured pipeline, writes config.json, record.jsonl, CSV tables
// and SVG figures into cfg.out_dir
RunRecord run_pipeline(const ExperimentConfig& cfg);

void write_record(const RunRecord& rec, const std::string& path);
RunRecord read_record(const std::string& path);

// re-runs the pipeline persisted in record_dir and compares every metric
// bit-for-bit; mismatches appear as per-field verdicts
RunRecord replay(const std::string& record_dir);

std::string scatter_svg(const std::vector<std::pair<double, double>>& centers,
                        const std::vector<double>& radii, double extent);

} // namespace ptk
