#include "dcp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dcp/errors.hpp"
#include "dcp/gridmath.hpp"

namespace dcp {

namespace {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a_doubles(const std::vector<double>& values) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFULL;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::vector<std::string> estimator_names(const ExperimentConfig& config) {
    std::vector<std::string> names{"oracle"};
    for (int k : config.k_list) names.push_back("K" + std::to_string(k));
    return names;
}

double sample_sd(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void ExperimentConfig::validate() const {
    std::string why;
    if (!(theta >= 0.0) || !std::isfinite(theta)) why = "theta must be a nonnegative number";
    else if (!(delta > 0.0) || !std::isfinite(delta)) why = "delta must be positive";
    else if (!(horizon > 0.0) || !std::isfinite(horizon)) why = "horizon must be positive";
    else if (delta > horizon) why = "delta must not exceed the horizon";
    else if (k_list.empty()) why = "K_list must not be empty";
    else if (std::any_of(k_list.begin(), k_list.end(), [](int k) { return k < 0; }))
        why = "correction orders must be nonnegative";
    else if (!(kappa > 0.0) || !std::isfinite(kappa)) why = "kappa must be positive";
    else if (level_L < 1 || level_L > 30) why = "L out of range";
    else if (!domain.valid()) why = "domain is degenerate";
    else if (!(grid_step > 0.0) || grid_step > domain.width()) why = "grid_step out of range";
    else if (replicates < 1) why = "replicates must be >= 1";
    if (!why.empty()) throw ParameterError("experiment config: " + why);
    if (model.components().empty()) throw ParameterError("experiment config: model is empty");
}

EstimatorSettings ExperimentConfig::estimator_settings() const {
    EstimatorSettings s;
    s.domain = domain;
    s.level_L = level_L;
    s.kappa = kappa;
    s.grid_step = grid_step;
    s.tune_on = tune_on;
    return s;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("config JSON parse error: ") + e.what());
    }
    ExperimentConfig c;
    c.theta = j.value("theta", c.theta);
    c.delta = j.value("delta", c.delta);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("model")) c.model = JumpDensityModel::from_json(j["model"].dump());
    if (j.contains("K_list")) c.k_list = j["K_list"].get<std::vector<int>>();
    c.kappa = j.value("kappa", c.kappa);
    c.level_L = j.value("L", c.level_L);
    if (j.contains("domain")) {
        const auto d = j["domain"];
        if (!d.is_array() || d.size() != 2) throw ParameterError("config: domain must be [lo, hi]");
        c.domain = Interval{d[0].get<double>(), d[1].get<double>()};
    }
    c.grid_step = j.value("grid_step", c.grid_step);
    c.replicates = j.value("replicates", c.replicates);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("tune_on")) {
        const std::string t = j["tune_on"].get<std::string>();
        if (t == "N_T") c.tune_on = TuneOn::total_nonzero;
        else if (t == "N_T_m") c.tune_on = TuneOn::per_group;
        else throw ParameterError("config: tune_on must be 'N_T' or 'N_T_m'");
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["theta"] = theta;
    j["delta"] = delta;
    j["horizon"] = horizon;
    j["model"] = nlohmann::json::parse(model.to_json());
    j["K_list"] = k_list;
    j["kappa"] = kappa;
    j["L"] = level_L;
    j["domain"] = {domain.lo, domain.hi};
    j["grid_step"] = grid_step;
    j["replicates"] = replicates;
    j["master_seed"] = master_seed;
    j["tune_on"] = tune_on == TuneOn::total_nonzero ? "N_T" : "N_T_m";
    return j.dump(2);
}

ReplicateRecord run_replicate(const ExperimentConfig& config, int replicate_index) {
    config.validate();
    ReplicateRecord rec;
    rec.index = replicate_index;

    const std::uint64_t seed =
        substream_seed(config.master_seed, static_cast<std::uint64_t>(replicate_index));
    const ObservationRecord path =
        simulate_path(config.theta, config.model, config.horizon, config.delta, seed);
    rec.n_slots = path.n_slots();
    rec.n_jumps = path.jumps.size();
    rec.path_checksum = fnv1a_doubles(path.increments);

    const NonzeroIncrements nonzero = extract_nonzero(path);
    rec.n_nonzero = nonzero.count();

    const int k_max = *std::max_element(config.k_list.begin(), config.k_list.end());
    if (rec.n_nonzero < static_cast<std::size_t>(k_max) + 1) {
        rec.failure = "fewer nonzero increments than K+1";
        return rec;
    }

    const IntensityEstimate intensity = estimate_intensity(nonzero, config.delta);
    rec.p_hat = intensity.p_hat;
    rec.theta_hat = intensity.theta_hat;

    const EstimatorSettings settings = config.estimator_settings();
    rec.j_effective = effective_resolution(rec.n_nonzero, settings.level_L);
    rec.eta = threshold_value(rec.n_nonzero, settings.kappa);

    // Every estimator is evaluated on this one trajectory.
    std::vector<DensityEstimate> estimates;
    std::vector<double> jump_sizes;
    jump_sizes.reserve(path.jumps.size());
    for (const Jump& j : path.jumps) jump_sizes.push_back(j.size);
    estimates.push_back(oracle_estimator(jump_sizes, settings));
    for (int k : config.k_list) {
        CorrectedEstimate corrected = corrected_estimator(nonzero, config.delta, k, settings);
        for (const auto& w : corrected.warnings) rec.warnings.push_back(w);
        estimates.push_back(std::move(corrected.estimate));
    }

    for (const DensityEstimate& est : estimates) {
        rec.losses.push_back(grid_l2_loss(est, config.model));
        std::vector<double> abs_err(est.values.size());
        for (std::size_t i = 0; i < est.values.size(); ++i)
            abs_err[i] = std::abs(est.values[i] - config.model.density(est.x_at(i)));
        rec.abs_err.push_back(std::move(abs_err));
        if (replicate_index == 0) rec.curves.push_back(est.values);
    }

    // Latent jump counts per nonzero slot, for the p_m diagnostics. Slot
    // membership is recovered by a single walk over the time-sorted jumps.
    std::array<std::size_t, 3> pm_counts{};
    std::size_t jt = 0;
    for (std::size_t i = 0; i < path.increments.size(); ++i) {
        const bool last = i + 1 == path.increments.size();
        const double boundary = static_cast<double>(i + 1) * config.delta;
        std::size_t m = 0;
        while (jt < path.jumps.size() && (last || path.jumps[jt].time < boundary)) {
            ++m;
            ++jt;
        }
        if (path.increments[i] != 0.0 && m >= 1 && m <= 3) ++pm_counts[m - 1];
    }
    for (std::size_t q = 0; q < 3; ++q)
        rec.pm_freq[q] = static_cast<double>(pm_counts[q]) / static_cast<double>(rec.n_nonzero);

    rec.ok = true;
    return rec;
}

PmEstimates estimate_pm_frequencies(const std::vector<ReplicateRecord>& records) {
    PmEstimates out;
    std::array<std::vector<double>, 3> samples;
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        for (std::size_t q = 0; q < 3; ++q) samples[q].push_back(rec.pm_freq[q]);
    }
    out.n_used = samples[0].size();
    if (out.n_used == 0) return out;
    for (std::size_t q = 0; q < 3; ++q) {
        double mean = 0.0;
        for (double v : samples[q]) mean += v;
        mean /= static_cast<double>(out.n_used);
        out.mean[q] = mean;
        out.sd[q] = sample_sd(samples[q], mean);
        out.se_mean[q] = out.sd[q] / std::sqrt(static_cast<double>(out.n_used));
    }
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const int n_threads = std::clamp(threads, 1, 256);

    std::vector<ReplicateRecord> records(static_cast<std::size_t>(config.replicates));
    if (n_threads == 1) {
        for (int i = 0; i < config.replicates; ++i)
            records[static_cast<std::size_t>(i)] = run_replicate(config, i);
    } else {
        std::atomic<int> next{0};
        std::atomic<std::size_t> progress{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= config.replicates) return;
                try {
                    records[static_cast<std::size_t>(i)] = run_replicate(config, i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
                progress.fetch_add(1);
            }
        };
        {
            std::vector<std::jthread> pool;
            pool.reserve(static_cast<std::size_t>(n_threads));
            for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        }
        if (first_error) std::rethrow_exception(first_error);
    }

    ExperimentReport report;
    report.config = config;
    report.threads_used = n_threads;

    for (const auto& rec : records) {
        if (rec.ok) ++report.n_ok;
        else {
            ++report.n_failed;
            report.failed_indices.push_back(rec.index);
        }
    }
    if (report.n_ok == 0)
        throw ExperimentError("every replicate failed; nothing to aggregate");
    report.sd_undefined = report.n_ok == 1;

    const std::vector<std::string> names = estimator_names(config);
    const std::size_t n_est = names.size();
    report.estimators.resize(n_est);
    for (std::size_t e = 0; e < n_est; ++e) {
        auto& s = report.estimators[e];
        s.name = names[e];
        for (const auto& rec : records) {
            if (rec.ok) s.replicate_losses.push_back(rec.losses[e]);
        }
        double mean = 0.0;
        for (double v : s.replicate_losses) mean += v;
        mean /= static_cast<double>(s.replicate_losses.size());
        s.mean_l2 = mean;
        s.sd_l2 = sample_sd(s.replicate_losses, mean);
        s.se_mean = s.sd_l2 / std::sqrt(static_cast<double>(s.replicate_losses.size()));
    }

    report.pm = estimate_pm_frequencies(records);

    bool have_j = false;
    double eta_sum = 0.0;
    std::set<std::string> warnings;
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        if (!have_j) {
            report.j_effective_min = report.j_effective_max = rec.j_effective;
            have_j = true;
        } else {
            report.j_effective_min = std::min(report.j_effective_min, rec.j_effective);
            report.j_effective_max = std::max(report.j_effective_max, rec.j_effective);
        }
        eta_sum += rec.eta;
        for (const auto& w : rec.warnings) warnings.insert(w);
    }
    report.eta_mean = eta_sum / static_cast<double>(report.n_ok);
    report.warnings.assign(warnings.begin(), warnings.end());

    // Grid, truth and curve aggregates (index-ordered fold, so the result is
    // independent of the thread count).
    const auto n_points =
        static_cast<std::size_t>(std::llround(config.domain.width() / config.grid_step)) + 1;
    report.grid_x.resize(n_points);
    report.truth.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        report.grid_x[i] = config.domain.lo + config.grid_step * static_cast<double>(i);
        report.truth[i] = config.model.density(report.grid_x[i]);
    }
    report.mae_curves.assign(n_est, std::vector<double>(n_points, 0.0));
    for (const auto& rec : records) {
        if (!rec.ok) continue;
        for (std::size_t e = 0; e < n_est; ++e)
            for (std::size_t i = 0; i < n_points; ++i)
                report.mae_curves[e][i] += rec.abs_err[e][i];
    }
    for (auto& curve : report.mae_curves)
        for (double& v : curve) v /= static_cast<double>(report.n_ok);
    if (!records.empty() && records.front().ok && !records.front().curves.empty())
        report.example_curves = records.front().curves;

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "estimator,mean_l2,sd_l2,n_ok,n_failed\n";
    for (const auto& e : report.estimators) {
        out += e.name;
        out += ',';
        out += format_double(e.mean_l2);
        out += ',';
        out += format_double(e.sd_l2);
        out += ',';
        out += std::to_string(report.n_ok);
        out += ',';
        out += std::to_string(report.n_failed);
        out += '\n';
    }
    return out;
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(report.config.to_json());
    j["n_ok"] = report.n_ok;
    j["n_failed"] = report.n_failed;
    j["failed_indices"] = report.failed_indices;
    j["sd_undefined"] = report.sd_undefined;
    nlohmann::json estimators = nlohmann::json::array();
    for (const auto& e : report.estimators) {
        estimators.push_back({{"name", e.name},
                              {"mean_l2", e.mean_l2},
                              {"sd_l2", e.sd_l2},
                              {"se_mean", e.se_mean},
                              {"losses", e.replicate_losses}});
    }
    j["estimators"] = estimators;
    j["pm"] = {{"mean", report.pm.mean},
               {"sd", report.pm.sd},
               {"se_mean", report.pm.se_mean},
               {"n_used", report.pm.n_used}};
    j["j_effective"] = {{"min", report.j_effective_min}, {"max", report.j_effective_max}};
    j["eta_mean"] = report.eta_mean;
    j["warnings"] = report.warnings;
    return j.dump(2);
}

ParsedReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("report JSON parse error: ") + e.what());
    }
    ParsedReport out;
    out.n_ok = j.at("n_ok").get<std::size_t>();
    out.n_failed = j.at("n_failed").get<std::size_t>();
    for (const auto& ej : j.at("estimators")) {
        EstimatorSummary s;
        s.name = ej.at("name").get<std::string>();
        s.mean_l2 = ej.at("mean_l2").get<double>();
        s.sd_l2 = ej.at("sd_l2").get<double>();
        s.se_mean = ej.at("se_mean").get<double>();
        s.replicate_losses = ej.at("losses").get<std::vector<double>>();
        out.estimators.push_back(std::move(s));
    }
    const auto& pm = j.at("pm");
    for (std::size_t q = 0; q < 3; ++q) {
        out.pm.mean[q] = pm.at("mean")[q].get<double>();
        out.pm.sd[q] = pm.at("sd")[q].get<double>();
        out.pm.se_mean[q] = pm.at("se_mean")[q].get<double>();
    }
    out.pm.n_used = pm.at("n_used").get<std::size_t>();
    return out;
}

void export_report(const ExperimentReport& report, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    const std::filesystem::path dir(out_dir);

    write_file((dir / "report.csv").string(), report_to_csv(report));
    write_file((dir / "report.json").string(), report_to_json(report));

    std::string mae = "x";
    for (const auto& e : report.estimators) mae += ",mae_" + e.name;
    mae += '\n';
    for (std::size_t i = 0; i < report.grid_x.size(); ++i) {
        mae += format_double(report.grid_x[i]);
        for (const auto& curve : report.mae_curves) {
            mae += ',';
            mae += format_double(curve[i]);
        }
        mae += '\n';
    }
    write_file((dir / "mae_curve.csv").string(), mae);

    std::string example = "x,truth";
    for (const auto& e : report.estimators) example += "," + e.name;
    example += '\n';
    if (!report.example_curves.empty()) {
        for (std::size_t i = 0; i < report.grid_x.size(); ++i) {
            example += format_double(report.grid_x[i]);
            example += ',';
            example += format_double(report.truth[i]);
            for (const auto& curve : report.example_curves) {
                example += ',';
                example += format_double(curve[i]);
            }
            example += '\n';
        }
    }
    write_file((dir / "estimate_example.csv").string(), example);
}

}  // namespace dcp
