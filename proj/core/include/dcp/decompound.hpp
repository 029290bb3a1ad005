#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcp/simulate.hpp"
#include "dcp/wavelet.hpp"

namespace dcp {

// Conditional jump-count weights p_m = P(R_delta = m | R_delta != 0)
//                                    = (theta*delta)^m / ((e^{theta*delta}-1) m!).
struct CompoundingWeights {
    double theta = 0.0;
    double delta = 0.0;
    std::vector<double> weights;  // p_1..p_M

    double deficit() const;  // 1 - sum(weights)
};

// Truncated inverse-series coefficients
//   a_m = (-1)^{m+1} (e^{theta*delta}-1)^m / (m * theta*delta),  m = 1..K+1.
// The full series converges only for e^{theta*delta}-1 < 1; past that the
// truncated sum is still finite and we only flag it.
struct InverseCoefficients {
    double theta_hat = 0.0;
    double delta = 0.0;
    int order_K = 0;
    std::vector<double> values;  // a_1..a_{K+1}
    bool convergence_warning = false;
};

struct IntensityEstimate {
    double p_hat = 0.0;      // clamped fraction of nonzero slots
    double theta_hat = 0.0;  // -log(1 - p_hat)/delta
    std::size_t n_nonzero = 0;
    std::size_t n_slots = 0;
    bool clamped = false;    // p_hat hit the 1 - 1e-12 ceiling
};

enum class TuneOn {
    total_nonzero,  // J and eta from N_T for every convolution power (default)
    per_group,      // J and eta from N_{T,m} = floor(N_T/m)
};

// Everything the wavelet pipeline needs besides the data.
struct EstimatorSettings {
    WaveletBasis basis = WaveletBasis::sym4();
    Interval domain{-6.0, 6.0};
    int level_L = 8;
    double kappa = 1.0;
    double grid_step = 0.01;
    TuneOn tune_on = TuneOn::total_nonzero;
};

struct CorrectedEstimate {
    DensityEstimate estimate;
    double theta_used = 0.0;
    int order_K = 0;
    int j_effective = 0;
    double eta = 0.0;
    std::vector<std::string> warnings;
};

CompoundingWeights compounding_weights(double theta, double delta, int truncation_M);

InverseCoefficients inverse_coefficients(double theta, double delta, int order_K);

// Splits the nonzero increments into m blocks of N = floor(count/m) and
// returns the N across-block sums; sum i collects values[q*N + i] for
// q = 0..m-1. The resulting sums are i.i.d. draws from the m-th convolution
// power of the increment density.
std::vector<double> group_increments(const NonzeroIncrements& nonzero, int m);

IntensityEstimate estimate_intensity(const NonzeroIncrements& nonzero, double delta);

// Wavelet threshold estimate of the m-th convolution power of the nonzero
// increment density: group -> bin -> coefficients -> hard threshold ->
// reconstruct, with J and eta tuned per `settings.tune_on`.
DensityEstimate convolution_power_estimate(const NonzeroIncrements& nonzero, int m,
                                           const EstimatorSettings& settings);

// The order-K corrected estimator: sum_{m=1}^{K+1} a_m(theta, delta) times
// the m-th convolution power estimate. theta is estimated from the data
// unless an override (the known-intensity variant) is supplied.
CorrectedEstimate corrected_estimator(const NonzeroIncrements& nonzero, double delta, int order_K,
                                      const EstimatorSettings& settings,
                                      std::optional<double> theta_override = std::nullopt);

// The benchmark estimator computed from the latent jumps themselves, with J
// and eta tuned on the jump count.
DensityEstimate oracle_estimator(std::span<const double> jumps, const EstimatorSettings& settings);

struct RateExponent {
    enum class Branch { dense, sparse };
    double value = 0.0;
    Branch branch = Branch::dense;
};

// alpha(s, p, pi) = min{ s/(2s+1), (s + 1/p - 1/pi) / (2(s + 1/2 - 1/pi)) }.
RateExponent rate_exponent(double s, double p, double pi);

}  // namespace dcp
