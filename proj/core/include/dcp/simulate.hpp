#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "dcp/rng.hpp"

namespace dcp {

struct GaussianComponent {
    double mean = 0.0;
    double stdev = 1.0;
};

struct LaplaceComponent {
    double location = 0.0;
    double scale = 1.0;  // density (1/(2b)) exp(-|x-mu|/b)
};

struct MixtureComponent {
    std::variant<GaussianComponent, LaplaceComponent> dist;
    double weight = 1.0;
};

// Jump-size density: a finite mixture of Gaussian and Laplace components.
// Weights must be nonnegative and sum to one.
class JumpDensityModel {
public:
    JumpDensityModel() = default;
    explicit JumpDensityModel(std::vector<MixtureComponent> components);

    static JumpDensityModel gaussian(double mean, double stdev);
    static JumpDensityModel laplace(double location, double scale);

    double density(double x) const;
    double sample(Rng& rng) const;
    double mean() const;

    const std::vector<MixtureComponent>& components() const { return components_; }

    // Model file format: {"components":[{"kind":"gaussian","params":{...},"weight":w}, ...]}
    static JumpDensityModel from_json(const std::string& text);
    static JumpDensityModel load(const std::string& path);
    std::string to_json() const;

private:
    void validate() const;
    std::vector<MixtureComponent> components_;
};

struct Jump {
    double time = 0.0;
    double size = 0.0;
};

// One discretely observed compound Poisson trajectory. `increments` has one
// entry per sampling slot (zeros included); `jumps` is the latent truth.
struct ObservationRecord {
    double delta = 0.0;
    double horizon = 0.0;
    double intensity_true = 0.0;
    std::vector<double> increments;
    std::vector<Jump> jumps;

    std::size_t n_slots() const { return increments.size(); }
    double increment_sum() const;
    double jump_sum() const;
};

// The nonzero increments, in occurrence order. `count()` is the effective
// sample size of the estimation problem.
struct NonzeroIncrements {
    std::vector<double> values;
    std::size_t total_slots = 0;

    std::size_t count() const { return values.size(); }
};

// Simulate a compound Poisson path observed on the delta-grid over [0, T].
// Per-slot jump counts are Poisson(theta*delta); jump times within a slot are
// uniform (exact for a Poisson process conditioned on its count). The output
// is a pure function of the arguments, including the seed.
ObservationRecord simulate_path(double theta, const JumpDensityModel& model, double horizon,
                                double delta, std::uint64_t seed);

NonzeroIncrements extract_nonzero(const ObservationRecord& record);

double density_eval(const JumpDensityModel& model, double x);
double sample_jump(const JumpDensityModel& model, Rng& rng);

}  // namespace dcp
