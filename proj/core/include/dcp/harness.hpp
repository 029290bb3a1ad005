#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dcp/decompound.hpp"
#include "dcp/simulate.hpp"

namespace dcp {

// Monte Carlo experiment description. Serialized as JSON for the CLI.
struct ExperimentConfig {
    double theta = 1.0;
    double delta = 0.1;
    double horizon = 10000.0;
    JumpDensityModel model;
    std::vector<int> k_list{0, 1, 2, 3};
    double kappa = 1.0;
    int level_L = 8;
    Interval domain{-6.0, 6.0};
    double grid_step = 0.01;
    int replicates = 200;
    std::uint64_t master_seed = 1;
    TuneOn tune_on = TuneOn::total_nonzero;

    void validate() const;  // throws ParameterError
    EstimatorSettings estimator_settings() const;

    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json() const;
};

// One replicate: all estimators (oracle first, then each K in k_list order)
// evaluated on the same simulated trajectory.
struct ReplicateRecord {
    int index = -1;
    bool ok = false;
    std::string failure;

    std::size_t n_slots = 0;
    std::size_t n_nonzero = 0;
    std::size_t n_jumps = 0;
    double p_hat = 0.0;
    double theta_hat = 0.0;
    int j_effective = 0;
    double eta = 0.0;
    std::uint64_t path_checksum = 0;  // shared-trajectory witness

    std::vector<double> losses;            // [oracle, K...] squared L2 losses
    std::array<double, 3> pm_freq{};       // jump-count frequencies among nonzero slots
    std::vector<std::vector<double>> abs_err;  // per estimator, per grid point
    std::vector<std::vector<double>> curves;   // estimate values; kept for index 0 only
    std::vector<std::string> warnings;
};

struct PmEstimates {
    std::array<double, 3> mean{};
    std::array<double, 3> sd{};       // across replicates
    std::array<double, 3> se_mean{};  // sd / sqrt(n_used)
    std::size_t n_used = 0;
};

struct EstimatorSummary {
    std::string name;
    double mean_l2 = 0.0;
    double sd_l2 = 0.0;       // sample SD of per-replicate losses
    double se_mean = 0.0;     // sd / sqrt(n_ok)
    std::vector<double> replicate_losses;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::vector<int> failed_indices;
    bool sd_undefined = false;  // single usable replicate

    std::vector<EstimatorSummary> estimators;  // oracle first, then K order
    PmEstimates pm;

    int j_effective_min = 0;
    int j_effective_max = 0;
    double eta_mean = 0.0;

    std::vector<double> grid_x;
    std::vector<double> truth;
    std::vector<std::vector<double>> mae_curves;      // per estimator, per grid point
    std::vector<std::vector<double>> example_curves;  // first replicate's estimates
    std::vector<std::string> warnings;

    // Wall-clock metadata; deliberately left out of the exported files so
    // reports stay byte-identical across runs.
    double wall_seconds = 0.0;
    int threads_used = 1;
};

ReplicateRecord run_replicate(const ExperimentConfig& config, int replicate_index);

ExperimentReport run_experiment(const ExperimentConfig& config, int threads = 1);

PmEstimates estimate_pm_frequencies(const std::vector<ReplicateRecord>& records);

// report.csv, report.json, mae_curve.csv, estimate_example.csv. All outputs
// are byte-stable for fixed inputs.
void export_report(const ExperimentReport& report, const std::string& out_dir);

std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

// Re-reads the deterministic subset written by report_to_json.
struct ParsedReport {
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::vector<EstimatorSummary> estimators;
    PmEstimates pm;
};
ParsedReport report_from_json(const std::string& text);

}  // namespace dcp
