#include "dcp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dcp/errors.hpp"

namespace dcp {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818685;

double gaussian_pdf(double x, const GaussianComponent& c) {
    const double z = (x - c.mean) / c.stdev;
    return kInvSqrt2Pi / c.stdev * std::exp(-0.5 * z * z);
}

double laplace_pdf(double x, const LaplaceComponent& c) {
    return 0.5 / c.scale * std::exp(-std::abs(x - c.location) / c.scale);
}

}  // namespace

JumpDensityModel::JumpDensityModel(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    validate();
}

JumpDensityModel JumpDensityModel::gaussian(double mean, double stdev) {
    return JumpDensityModel({MixtureComponent{GaussianComponent{mean, stdev}, 1.0}});
}

JumpDensityModel JumpDensityModel::laplace(double location, double scale) {
    return JumpDensityModel({MixtureComponent{LaplaceComponent{location, scale}, 1.0}});
}

void JumpDensityModel::validate() const {
    if (components_.empty()) throw ParameterError("jump density model has no components");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
            throw ParameterError("component weight must be a nonnegative number");
        total += c.weight;
        if (const auto* g = std::get_if<GaussianComponent>(&c.dist)) {
            if (!std::isfinite(g->mean) || !(g->stdev > 0.0))
                throw ParameterError("gaussian component needs finite mean and positive stdev");
        } else {
            const auto& l = std::get<LaplaceComponent>(c.dist);
            if (!std::isfinite(l.location) || !(l.scale > 0.0))
                throw ParameterError("laplace component needs finite location and positive scale");
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ParameterError("component weights must sum to one");
}

double JumpDensityModel::density(double x) const {
    double s = 0.0;
    for (const auto& c : components_) {
        if (const auto* g = std::get_if<GaussianComponent>(&c.dist)) {
            s += c.weight * gaussian_pdf(x, *g);
        } else {
            s += c.weight * laplace_pdf(x, std::get<LaplaceComponent>(c.dist));
        }
    }
    return s;
}

double JumpDensityModel::sample(Rng& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    const MixtureComponent* chosen = &components_.back();
    for (const auto& c : components_) {
        acc += c.weight;
        if (u < acc) {
            chosen = &c;
            break;
        }
    }
    if (const auto* g = std::get_if<GaussianComponent>(&chosen->dist))
        return rng.normal(g->mean, g->stdev);
    const auto& l = std::get<LaplaceComponent>(chosen->dist);
    return rng.laplace(l.location, l.scale);
}

double JumpDensityModel::mean() const {
    double s = 0.0;
    for (const auto& c : components_) {
        if (const auto* g = std::get_if<GaussianComponent>(&c.dist)) {
            s += c.weight * g->mean;
        } else {
            s += c.weight * std::get<LaplaceComponent>(c.dist).location;
        }
    }
    return s;
}

JumpDensityModel JumpDensityModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("model JSON parse error: ") + e.what());
    }
    if (!j.contains("components") || !j["components"].is_array())
        throw ParameterError("model JSON needs a 'components' array");
    std::vector<MixtureComponent> components;
    for (const auto& cj : j["components"]) {
        MixtureComponent c;
        c.weight = cj.value("weight", 1.0);
        const std::string kind = cj.value("kind", "");
        const auto params = cj.value("params", nlohmann::json::object());
        if (kind == "gaussian") {
            c.dist = GaussianComponent{params.value("mean", 0.0), params.value("stdev", 1.0)};
        } else if (kind == "laplace") {
            c.dist = LaplaceComponent{params.value("location", 0.0), params.value("scale", 1.0)};
        } else {
            throw ParameterError("unknown component kind: '" + kind + "'");
        }
        components.push_back(c);
    }
    return JumpDensityModel(std::move(components));
}

JumpDensityModel JumpDensityModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string JumpDensityModel::to_json() const {
    nlohmann::json components = nlohmann::json::array();
    for (const auto& c : components_) {
        nlohmann::json cj;
        cj["weight"] = c.weight;
        if (const auto* g = std::get_if<GaussianComponent>(&c.dist)) {
            cj["kind"] = "gaussian";
            cj["params"] = {{"mean", g->mean}, {"stdev", g->stdev}};
        } else {
            const auto& l = std::get<LaplaceComponent>(c.dist);
            cj["kind"] = "laplace";
            cj["params"] = {{"location", l.location}, {"scale", l.scale}};
        }
        components.push_back(cj);
    }
    return nlohmann::json{{"components", components}}.dump(2);
}

double ObservationRecord::increment_sum() const {
    double s = 0.0;
    for (double v : increments) s += v;
    return s;
}

double ObservationRecord::jump_sum() const {
    double s = 0.0;
    for (const Jump& j : jumps) s += j.size;
    return s;
}

ObservationRecord simulate_path(double theta, const JumpDensityModel& model, double horizon,
                                double delta, std::uint64_t seed) {
    if (!(theta >= 0.0) || !std::isfinite(theta))
        throw ParameterError("simulate_path: intensity must be a nonnegative number");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ParameterError("simulate_path: horizon must be positive");
    if (!(delta > 0.0) || delta > horizon)
        throw ParameterError("simulate_path: need 0 < delta <= horizon");

    // The epsilon keeps floor() from losing the last slot when horizon/delta
    // is an integer that rounds just below itself.
    const auto n_slots = static_cast<std::size_t>(std::floor(horizon / delta + 1e-9));

    ObservationRecord record;
    record.delta = delta;
    record.horizon = horizon;
    record.intensity_true = theta;
    record.increments.assign(n_slots, 0.0);

    Rng rng(seed);
    const double mean_per_slot = theta * delta;
    std::vector<std::pair<double, double>> slot_jumps;  // (uniform offset, size)
    for (std::size_t i = 0; i < n_slots; ++i) {
        const std::uint64_t k = rng.poisson(mean_per_slot);
        if (k == 0) continue;
        slot_jumps.clear();
        for (std::uint64_t q = 0; q < k; ++q) {
            const double u = rng.uniform01();
            const double size = model.sample(rng);
            slot_jumps.emplace_back(u, size);
        }
        std::sort(slot_jumps.begin(), slot_jumps.end());
        double sum = 0.0;
        for (const auto& [u, size] : slot_jumps) {
            record.jumps.push_back(Jump{(static_cast<double>(i) + u) * delta, size});
            sum += size;
        }
        record.increments[i] = sum;
    }
    return record;
}

NonzeroIncrements extract_nonzero(const ObservationRecord& record) {
    NonzeroIncrements out;
    out.total_slots = record.increments.size();
    for (double v : record.increments) {
        if (v != 0.0) out.values.push_back(v);
    }
    return out;
}

double density_eval(const JumpDensityModel& model, double x) { return model.density(x); }

double sample_jump(const JumpDensityModel& model, Rng& rng) { return model.sample(rng); }

}  // namespace dcp
