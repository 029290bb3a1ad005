#include "dcp/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dcp/errors.hpp"

namespace dcp {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
    int l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

// Samples the mother wavelet through the refinement cascade: synthesize a
// unit detail coefficient at a mid-level of a fine dyadic grid and rescale.
double estimate_sup_norm(const WaveletBasis& basis) {
    const int levels = 14;
    const int j = 7;
    std::vector<double> alpha{0.0};
    std::vector<std::vector<double>> details(levels);
    for (int l = 0; l < levels; ++l) details[l].assign(std::size_t{1} << l, 0.0);
    details[j][(std::size_t{1} << j) / 2] = 1.0;
    const std::vector<double> grid = dwt::synthesize(alpha, details, basis);
    double m = 0.0;
    for (double v : grid) m = std::max(m, std::abs(v));
    const double n = static_cast<double>(grid.size());
    return std::sqrt(n) * m / std::pow(2.0, j / 2.0);
}

}  // namespace

WaveletBasis WaveletBasis::from_lowpass(std::string name, std::vector<double> taps,
                                        int vanishing_moments) {
    if (taps.size() < 2 || taps.size() % 2 != 0)
        throw ParameterError("scaling filter needs an even number of taps");
    WaveletBasis basis;
    basis.name = std::move(name);
    basis.lowpass = std::move(taps);
    basis.highpass.resize(basis.lowpass.size());
    const std::size_t n = basis.lowpass.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        basis.highpass[k] = sign * basis.lowpass[n - 1 - k];
    }
    basis.vanishing_moments = vanishing_moments;
    basis.sup_norm_bound = estimate_sup_norm(basis);
    return basis;
}

WaveletBasis WaveletBasis::sym4() {
    // Standard Symlet-4 scaling filter (sum sqrt(2), unit l2 norm); the
    // checksum test asserts both identities at 1e-10.
    static const WaveletBasis cached =
        from_lowpass("sym4",
                     {0.03222310060404270, -0.012603967262037833, -0.09921954357684722,
                      0.29785779560527736, 0.8037387518059161, 0.49761866763201545,
                      -0.02963552764599851, -0.07576571478927333},
                     4);
    return cached;
}

namespace dwt {

void analyze(std::span<const double> signal, const WaveletBasis& basis,
             std::vector<double>& alpha, std::vector<std::vector<double>>& details) {
    if (!is_power_of_two(signal.size()))
        throw ParameterError("dwt::analyze requires a dyadic signal length");
    const auto& h = basis.lowpass;
    const auto& g = basis.highpass;
    const int levels = log2_exact(signal.size());

    details.assign(static_cast<std::size_t>(levels), {});
    std::vector<double> a(signal.begin(), signal.end());
    for (int j = levels - 1; j >= 0; --j) {
        const std::size_t n = a.size();
        const std::size_t half = n / 2;
        std::vector<double> approx(half), detail(half);
        for (std::size_t k = 0; k < half; ++k) {
            double sa = 0.0, sd = 0.0;
            for (std::size_t t = 0; t < h.size(); ++t) {
                const double v = a[(2 * k + t) % n];
                sa += h[t] * v;
                sd += g[t] * v;
            }
            approx[k] = sa;
            detail[k] = sd;
        }
        details[static_cast<std::size_t>(j)] = std::move(detail);
        a = std::move(approx);
    }
    alpha = std::move(a);
}

std::vector<double> synthesize(std::span<const double> alpha,
                               const std::vector<std::vector<double>>& details,
                               const WaveletBasis& basis) {
    if (alpha.size() != 1) throw ParameterError("dwt::synthesize expects a single coarse coefficient");
    const auto& h = basis.lowpass;
    const auto& g = basis.highpass;

    std::vector<double> a(alpha.begin(), alpha.end());
    for (std::size_t j = 0; j < details.size(); ++j) {
        if (details[j].size() != a.size())
            throw ParameterError("dwt::synthesize: detail level size mismatch");
        const std::size_t n = 2 * a.size();
        std::vector<double> out(n, 0.0);
        for (std::size_t k = 0; k < a.size(); ++k) {
            for (std::size_t t = 0; t < h.size(); ++t) {
                out[(2 * k + t) % n] += h[t] * a[k] + g[t] * details[j][k];
            }
        }
        a = std::move(out);
    }
    return a;
}

}  // namespace dwt

BinnedSample bin_samples(std::span<const double> samples, const Interval& domain, int level_L) {
    if (samples.empty()) throw EmptyInputError("bin_samples: no samples");
    if (level_L < 1 || level_L > 30) throw ParameterError("bin_samples: level_L out of range");
    if (!domain.valid()) throw ParameterError("bin_samples: degenerate domain");

    BinnedSample out;
    out.domain = domain;
    out.level_L = level_L;
    const std::size_t n_bins = std::size_t{1} << level_L;
    out.counts.assign(n_bins, 0.0);
    const double w = domain.width() / static_cast<double>(n_bins);

    for (double x : samples) {
        if (!(x >= domain.lo && x <= domain.hi)) {
            ++out.n_dropped;
            continue;
        }
        // Continuous position in bin-center coordinates.
        const double p = (x - domain.lo) / w - 0.5;
        if (p <= 0.0) {
            out.counts.front() += 1.0;
        } else if (p >= static_cast<double>(n_bins - 1)) {
            out.counts.back() += 1.0;
        } else {
            const auto i0 = static_cast<std::size_t>(p);
            const double t = p - static_cast<double>(i0);
            out.counts[i0] += 1.0 - t;
            out.counts[i0 + 1] += t;
        }
        ++out.n_samples;
    }
    return out;
}

WaveletCoefficients empirical_coefficients(const BinnedSample& binned, const WaveletBasis& basis,
                                           int J) {
    if (J < 0) throw ParameterError("empirical_coefficients: J must be nonnegative");
    if (J > binned.level_L)
        throw ResolutionError("empirical_coefficients: J exceeds the binning level");
    if (binned.n_samples == 0)
        throw EmptyInputError("empirical_coefficients: binned sample is empty");

    const std::size_t n_bins = binned.counts.size();
    const double w = binned.bin_width();
    std::vector<double> density(n_bins);
    const double norm = 1.0 / (static_cast<double>(binned.n_samples) * w);
    for (std::size_t i = 0; i < n_bins; ++i) density[i] = binned.counts[i] * norm;

    WaveletCoefficients coeffs;
    coeffs.domain = binned.domain;
    coeffs.basis = basis;
    coeffs.max_level_J = J;
    dwt::analyze(density, basis, coeffs.alpha0, coeffs.betas);

    // Rescale so coefficients estimate L2(domain) inner products, the scale
    // the threshold rule is stated in.
    const double scale = std::sqrt(w);
    for (double& a : coeffs.alpha0) a *= scale;
    for (std::size_t j = 0; j < coeffs.betas.size(); ++j) {
        if (static_cast<int>(j) >= J) {
            std::fill(coeffs.betas[j].begin(), coeffs.betas[j].end(), 0.0);
        } else {
            for (double& b : coeffs.betas[j]) b *= scale;
        }
    }
    return coeffs;
}

double threshold_value(std::size_t n, double kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw ParameterError("threshold_value: kappa must be positive");
    if (n == 0) throw EmptyInputError("threshold_value: empty sample");
    if (n == 1) return 0.0;
    const double nd = static_cast<double>(n);
    return kappa / std::sqrt(nd) * std::sqrt(0.5 * std::log(nd));
}

int max_resolution(std::size_t n) {
    if (n < 2) throw ResolutionError("max_resolution: need at least two samples");
    const double bound = static_cast<double>(n) / (0.5 * std::log(static_cast<double>(n)));
    int j = 0;
    while (j < 62 && std::ldexp(1.0, j + 1) <= bound) ++j;
    return j;
}

int effective_resolution(std::size_t n, int level_L) {
    if (n == 0) throw EmptyInputError("effective_resolution: empty sample");
    if (level_L < 0) throw ParameterError("effective_resolution: negative level");
    if (n == 1) return level_L;  // the resolution rule is vacuous at n = 1
    return std::min(max_resolution(n), level_L);
}

WaveletCoefficients hard_threshold(const WaveletCoefficients& coeffs, double eta) {
    if (!(eta >= 0.0)) throw ParameterError("hard_threshold: eta must be nonnegative");
    WaveletCoefficients out = coeffs;
    for (auto& level : out.betas) {
        for (double& b : level) {
            if (std::abs(b) < eta) b = 0.0;
        }
    }
    return out;
}

std::vector<double> reconstruct_grid(const WaveletCoefficients& coeffs) {
    const int levels = coeffs.level_L();
    const std::size_t n_bins = std::size_t{1} << levels;
    const double w = coeffs.domain.width() / static_cast<double>(n_bins);
    const double scale = 1.0 / std::sqrt(w);

    std::vector<double> alpha(coeffs.alpha0);
    for (double& a : alpha) a *= scale;
    std::vector<std::vector<double>> details(coeffs.betas);
    for (auto& level : details)
        for (double& b : level) b *= scale;
    return dwt::synthesize(alpha, details, coeffs.basis);
}

DensityEstimate reconstruct(const WaveletCoefficients& coeffs, double step) {
    if (!(step > 0.0)) throw ParameterError("reconstruct: step must be positive");
    const std::vector<double> grid = reconstruct_grid(coeffs);
    const std::size_t n_bins = grid.size();
    const double w = coeffs.domain.width() / static_cast<double>(n_bins);

    DensityEstimate est;
    est.domain = coeffs.domain;
    est.step = step;
    const auto n_points =
        static_cast<std::size_t>(std::llround(coeffs.domain.width() / step)) + 1;
    est.values.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = coeffs.domain.lo + step * static_cast<double>(i);
        const double p = (x - coeffs.domain.lo) / w - 0.5;
        if (p <= 0.0) {
            est.values[i] = grid.front();
        } else if (p >= static_cast<double>(n_bins - 1)) {
            est.values[i] = grid.back();
        } else {
            const auto i0 = static_cast<std::size_t>(p);
            const double t = p - static_cast<double>(i0);
            est.values[i] = (1.0 - t) * grid[i0] + t * grid[i0 + 1];
        }
    }
    return est;
}

}  // namespace dcp
