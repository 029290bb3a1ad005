#include "dcp/decompound.hpp"

#include <algorithm>
#include <cmath>

#include "dcp/errors.hpp"

namespace dcp {

double CompoundingWeights::deficit() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return 1.0 - s;
}

CompoundingWeights compounding_weights(double theta, double delta, int truncation_M) {
    if (!(theta > 0.0) || !std::isfinite(theta) || !(delta > 0.0) || !std::isfinite(delta))
        throw ParameterError("compounding_weights: theta and delta must be positive");
    if (truncation_M < 1) throw ParameterError("compounding_weights: truncation must be >= 1");
    const double x = theta * delta;
    if (x > 700.0) throw ParameterError("compounding_weights: theta*delta overflows exp");

    CompoundingWeights out;
    out.theta = theta;
    out.delta = delta;
    out.weights.resize(static_cast<std::size_t>(truncation_M));
    // p_1 = x/expm1(x), then the ratio recursion p_{m+1} = p_m x/(m+1); stable
    // for small and large x alike.
    double p = x / std::expm1(x);
    for (int m = 1; m <= truncation_M; ++m) {
        out.weights[static_cast<std::size_t>(m - 1)] = p;
        p *= x / static_cast<double>(m + 1);
    }
    return out;
}

InverseCoefficients inverse_coefficients(double theta, double delta, int order_K) {
    if (!(theta > 0.0) || !std::isfinite(theta) || !(delta > 0.0) || !std::isfinite(delta))
        throw ParameterError("inverse_coefficients: theta and delta must be positive");
    if (order_K < 0) throw ParameterError("inverse_coefficients: order must be >= 0");
    const double x = theta * delta;
    if (x > 700.0) throw ParameterError("inverse_coefficients: theta*delta overflows exp");

    InverseCoefficients out;
    out.theta_hat = theta;
    out.delta = delta;
    out.order_K = order_K;
    const double y = std::expm1(x);
    out.convergence_warning = y >= 1.0;  // full series diverges; truncation still finite

    out.values.resize(static_cast<std::size_t>(order_K) + 1);
    double power = 1.0;
    for (int m = 1; m <= order_K + 1; ++m) {
        power *= y;
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        out.values[static_cast<std::size_t>(m - 1)] = sign * power / (static_cast<double>(m) * x);
    }
    return out;
}

std::vector<double> group_increments(const NonzeroIncrements& nonzero, int m) {
    if (m < 1) throw ParameterError("group_increments: m must be >= 1");
    const std::size_t n = nonzero.count();
    if (n < static_cast<std::size_t>(m))
        throw InsufficientDataError("group_increments: fewer nonzero increments than m");
    const std::size_t n_groups = n / static_cast<std::size_t>(m);
    std::vector<double> sums(n_groups, 0.0);
    for (std::size_t q = 0; q < static_cast<std::size_t>(m); ++q) {
        const std::size_t offset = q * n_groups;
        for (std::size_t i = 0; i < n_groups; ++i) sums[i] += nonzero.values[offset + i];
    }
    return sums;
}

IntensityEstimate estimate_intensity(const NonzeroIncrements& nonzero, double delta) {
    if (nonzero.total_slots == 0) throw ParameterError("estimate_intensity: no observation slots");
    if (!(delta > 0.0)) throw ParameterError("estimate_intensity: delta must be positive");
    if (nonzero.count() == 0)
        throw DegenerateEstimateError("estimate_intensity: no nonzero increments");

    IntensityEstimate out;
    out.n_nonzero = nonzero.count();
    out.n_slots = nonzero.total_slots;
    const double raw =
        static_cast<double>(out.n_nonzero) / static_cast<double>(out.n_slots);
    constexpr double ceiling = 1.0 - 1e-12;
    if (raw > ceiling) {
        out.p_hat = ceiling;
        out.clamped = true;
    } else {
        out.p_hat = raw;
    }
    out.theta_hat = -std::log1p(-out.p_hat) / delta;
    return out;
}

DensityEstimate convolution_power_estimate(const NonzeroIncrements& nonzero, int m,
                                           const EstimatorSettings& settings) {
    const std::size_t n_tune = settings.tune_on == TuneOn::total_nonzero
                                   ? nonzero.count()
                                   : nonzero.count() / static_cast<std::size_t>(m);
    const std::vector<double> sums = group_increments(nonzero, m);
    const int j_eff = effective_resolution(n_tune, settings.level_L);
    const double eta = threshold_value(n_tune, settings.kappa);
    const BinnedSample binned = bin_samples(sums, settings.domain, settings.level_L);
    const WaveletCoefficients coeffs = empirical_coefficients(binned, settings.basis, j_eff);
    return reconstruct(hard_threshold(coeffs, eta), settings.grid_step);
}

CorrectedEstimate corrected_estimator(const NonzeroIncrements& nonzero, double delta, int order_K,
                                      const EstimatorSettings& settings,
                                      std::optional<double> theta_override) {
    if (order_K < 0) throw ParameterError("corrected_estimator: order must be >= 0");
    if (nonzero.count() < static_cast<std::size_t>(order_K) + 1)
        throw InsufficientDataError("corrected_estimator: need at least K+1 nonzero increments");

    CorrectedEstimate out;
    out.order_K = order_K;
    if (theta_override) {
        if (!(*theta_override > 0.0))
            throw ParameterError("corrected_estimator: theta override must be positive");
        out.theta_used = *theta_override;
    } else {
        const IntensityEstimate intensity = estimate_intensity(nonzero, delta);
        out.theta_used = intensity.theta_hat;
        if (intensity.clamped)
            out.warnings.push_back("every slot had a jump; p_hat clamped below one");
    }

    const InverseCoefficients inverse = inverse_coefficients(out.theta_used, delta, order_K);
    if (inverse.convergence_warning)
        out.warnings.push_back(
            "theta*delta >= log(2): inverse series diverges, using the finite truncation");

    out.j_effective = effective_resolution(nonzero.count(), settings.level_L);
    out.eta = threshold_value(nonzero.count(), settings.kappa);

    for (int m = 1; m <= order_K + 1; ++m) {
        const DensityEstimate part = convolution_power_estimate(nonzero, m, settings);
        const double a_m = inverse.values[static_cast<std::size_t>(m - 1)];
        if (m == 1) {
            out.estimate = part;
            for (double& v : out.estimate.values) v *= a_m;
        } else {
            for (std::size_t i = 0; i < out.estimate.values.size(); ++i)
                out.estimate.values[i] += a_m * part.values[i];
        }
    }
    return out;
}

DensityEstimate oracle_estimator(std::span<const double> jumps, const EstimatorSettings& settings) {
    if (jumps.empty()) throw EmptyInputError("oracle_estimator: no jumps");
    const std::size_t n = jumps.size();
    const int j_eff = effective_resolution(n, settings.level_L);
    const double eta = threshold_value(n, settings.kappa);
    const BinnedSample binned = bin_samples(jumps, settings.domain, settings.level_L);
    const WaveletCoefficients coeffs = empirical_coefficients(binned, settings.basis, j_eff);
    return reconstruct(hard_threshold(coeffs, eta), settings.grid_step);
}

RateExponent rate_exponent(double s, double p, double pi) {
    if (!(pi > 0.0) || !(p >= 1.0) || !(s > 1.0 / pi))
        throw ParameterError("rate_exponent: need pi > 0, p >= 1, s > 1/pi");
    const double dense = s / (2.0 * s + 1.0);
    const double sparse = (s + 1.0 / p - 1.0 / pi) / (2.0 * (s + 0.5 - 1.0 / pi));
    RateExponent out;
    if (dense <= sparse) {
        out.value = dense;
        out.branch = RateExponent::Branch::dense;
    } else {
        out.value = sparse;
        out.branch = RateExponent::Branch::sparse;
    }
    return out;
}

}  // namespace dcp
