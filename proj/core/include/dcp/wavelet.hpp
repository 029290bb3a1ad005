#pragma once

#include <span>
#include <string>
#include <vector>

#include "dcp/interval.hpp"

namespace dcp {

// Orthonormal two-channel filter bank. `lowpass` is the scaling filter
// (taps sum to sqrt(2), unit l2 norm); `highpass` is its quadrature mirror
// g[n] = (-1)^n h[len-1-n]. Checked invariants live in the test suite.
struct WaveletBasis {
    std::string name;
    std::vector<double> lowpass;
    std::vector<double> highpass;
    double sup_norm_bound = 0.0;  // numeric estimate of the mother wavelet's sup norm
    int vanishing_moments = 0;

    // Builds the mirror filter and metadata from scaling-filter taps.
    static WaveletBasis from_lowpass(std::string name, std::vector<double> taps,
                                     int vanishing_moments);
    static WaveletBasis sym4();
};

// Samples linearly binned onto 2^L grid points (bin centers) spanning the
// domain. Each in-domain sample splits unit mass between its two nearest
// grid points; out-of-domain samples are dropped and tallied.
struct BinnedSample {
    Interval domain;
    int level_L = 0;
    std::vector<double> counts;   // size 2^L, sums to n_samples
    std::size_t n_samples = 0;    // in-domain samples
    std::size_t n_dropped = 0;

    double bin_width() const { return domain.width() / static_cast<double>(counts.size()); }
};

// Periodized wavelet coefficients of a function on `domain`, L2(domain)
// normalized: alpha0/betas estimate inner products against the basis
// functions, matching the scale of coefficients computed by direct sample
// sums. betas[j] holds the 2^j detail coefficients of level j; levels at or
// above max_level_J are zeroed (the estimate lives in the 2^max_level_J
// dimensional coarse space).
struct WaveletCoefficients {
    Interval domain;
    WaveletBasis basis;
    std::vector<double> alpha0;              // coarse scaling coefficients (size 1)
    std::vector<std::vector<double>> betas;  // betas[j], size 2^j, j = 0..level_L-1
    int max_level_J = 0;

    int level_L() const { return static_cast<int>(betas.size()); }
};

// Density values on the uniform grid lo, lo+step, ..., hi. Thresholding does
// not enforce positivity, so values may be negative.
struct DensityEstimate {
    Interval domain;
    double step = 0.01;
    std::vector<double> values;

    double x_at(std::size_t i) const { return domain.lo + step * static_cast<double>(i); }
};

// Low-level periodized pyramid transform on dyadic signals. The analysis
// operator is orthonormal for every dyadic length (filters wrap circularly),
// so synthesize is both adjoint and inverse.
namespace dwt {

// signal.size() must be 2^L; alpha receives 1 coefficient, details[j] the 2^j
// level-j details, j = 0 coarsest.
void analyze(std::span<const double> signal, const WaveletBasis& basis,
             std::vector<double>& alpha, std::vector<std::vector<double>>& details);

std::vector<double> synthesize(std::span<const double> alpha,
                               const std::vector<std::vector<double>>& details,
                               const WaveletBasis& basis);

}  // namespace dwt

BinnedSample bin_samples(std::span<const double> samples, const Interval& domain, int level_L);

// DWT of the binned empirical density, rescaled to L2(domain) normalization.
// Detail levels at or above J are dropped (zeroed). Requires J <= level_L.
WaveletCoefficients empirical_coefficients(const BinnedSample& binned, const WaveletBasis& basis,
                                           int J);

// Theorem-style threshold eta = kappa * n^{-1/2} * sqrt(log(n)/2).
double threshold_value(std::size_t n, double kappa);

// Largest J >= 0 with 2^J * log(sqrt(n))/n <= 1. Requires n >= 2.
int max_resolution(std::size_t n);

// Resolution actually used by the estimators: the rule above capped at the
// binning level L. For n == 1 the rule is vacuous and the cap decides.
int effective_resolution(std::size_t n, int level_L);

// Zeroes every beta with |beta| < eta; alphas and betas at or above eta are
// kept exactly.
WaveletCoefficients hard_threshold(const WaveletCoefficients& coeffs, double eta);

// Inverse transform back to the 2^L bin grid.
std::vector<double> reconstruct_grid(const WaveletCoefficients& coeffs);

// Inverse transform followed by linear interpolation onto the uniform mesh
// grid over the domain (constant extension within the half-bin margins).
DensityEstimate reconstruct(const WaveletCoefficients& coeffs, double step);

}  // namespace dcp
