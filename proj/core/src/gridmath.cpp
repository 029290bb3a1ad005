#include "dcp/gridmath.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "dcp/decompound.hpp"
#include "dcp/errors.hpp"

namespace dcp {

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Full linear convolution of two real sequences (unit spacing scale).
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n_out = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(n_out);
    const std::size_t n_freq = n / 2 + 1;

    double* in = fftw_alloc_real(n);
    auto* fa = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n_freq));
    auto* fb = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n_freq));

    fftw_plan fwd, inv;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), in,
                                   reinterpret_cast<fftw_complex*>(fa), FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                   reinterpret_cast<fftw_complex*>(fa), in, FFTW_ESTIMATE);
    }

    std::fill(in, in + n, 0.0);
    std::copy(a.begin(), a.end(), in);
    fftw_execute_dft_r2c(fwd, in, reinterpret_cast<fftw_complex*>(fa));
    std::fill(in, in + n, 0.0);
    std::copy(b.begin(), b.end(), in);
    fftw_execute_dft_r2c(fwd, in, reinterpret_cast<fftw_complex*>(fb));

    for (std::size_t i = 0; i < n_freq; ++i) fa[i] *= fb[i];
    fftw_execute_dft_c2r(inv, reinterpret_cast<fftw_complex*>(fa), in);

    std::vector<double> out(n_out);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n_out; ++i) out[i] = in[i] * scale;

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(in);
    fftw_free(fa);
    fftw_free(fb);
    return out;
}

// Restrict g onto the grid starting at `lo` with `n` points; grids must be
// commensurate. Values outside g's support read as zero.
std::vector<double> restrict_values(const GridFunction& g, double lo, std::size_t n) {
    const double offset = (lo - g.lo) / g.step;
    const auto shift = static_cast<long long>(std::llround(offset));
    if (std::abs(offset - static_cast<double>(shift)) > 1e-6)
        throw ParameterError("gridmath: grids are not aligned");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const long long src = shift + static_cast<long long>(i);
        if (src >= 0 && src < static_cast<long long>(g.values.size()))
            out[i] = g.values[static_cast<std::size_t>(src)];
    }
    return out;
}

void check_density_like(const GridFunction& g, const char* who) {
    if (g.values.empty() || !(g.step > 0.0)) throw ParameterError(std::string(who) + ": empty grid");
}

}  // namespace

GridFunction sample_grid(double lo, double hi, double step,
                         const std::function<double(double)>& f) {
    if (!(step > 0.0) || !(hi > lo)) throw ParameterError("sample_grid: bad grid spec");
    GridFunction g;
    g.lo = lo;
    g.step = step;
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = f(g.x_at(i));
    return g;
}

GridFunction sample_grid(double lo, double hi, double step, const JumpDensityModel& model) {
    return sample_grid(lo, hi, step, [&](double x) { return model.density(x); });
}

double grid_integral(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v;
    return s * g.step;
}

double grid_sup_diff(const GridFunction& a, const GridFunction& b) {
    if (a.values.size() != b.values.size() || std::abs(a.lo - b.lo) > 1e-9 ||
        std::abs(a.step - b.step) > 1e-12)
        throw ParameterError("grid_sup_diff: grid mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

GridFunction convolve(const GridFunction& g1, const GridFunction& g2) {
    check_density_like(g1, "convolve");
    check_density_like(g2, "convolve");
    if (std::abs(g1.step - g2.step) > 1e-12 * std::max(g1.step, g2.step))
        throw ParameterError("convolve: mesh mismatch");
    GridFunction out;
    out.lo = g1.lo + g2.lo;
    out.step = g1.step;
    out.values = fft_convolve(g1.values, g2.values);
    for (double& v : out.values) v *= g1.step;
    return out;
}

CompoundedDensity compound_forward(const GridFunction& f, double theta, double delta,
                                   int truncation_M) {
    check_density_like(f, "compound_forward");
    const CompoundingWeights weights = compounding_weights(theta, delta, truncation_M);

    CompoundedDensity out;
    out.value.lo = f.lo;
    out.value.step = f.step;
    out.value.values.assign(f.values.size(), 0.0);
    out.truncation_deficit = weights.deficit();

    GridFunction power = f;  // f^{*m}, restricted back to f's grid each step
    for (int m = 1; m <= truncation_M; ++m) {
        if (m > 1) {
            GridFunction next = convolve(power, f);
            power.values = restrict_values(next, f.lo, f.values.size());
            power.lo = f.lo;
            power.step = f.step;
        }
        const double pm = weights.weights[static_cast<std::size_t>(m - 1)];
        for (std::size_t i = 0; i < f.values.size(); ++i)
            out.value.values[i] += pm * power.values[i];
    }
    return out;
}

GridFunction inverse_truncated(const GridFunction& nu, double theta, double delta, int order_K) {
    check_density_like(nu, "inverse_truncated");
    const InverseCoefficients inverse = inverse_coefficients(theta, delta, order_K);

    GridFunction out;
    out.lo = nu.lo;
    out.step = nu.step;
    out.values.assign(nu.values.size(), 0.0);

    GridFunction power = nu;
    for (int m = 1; m <= order_K + 1; ++m) {
        if (m > 1) {
            GridFunction next = convolve(power, nu);
            power.values = restrict_values(next, nu.lo, nu.values.size());
            power.lo = nu.lo;
            power.step = nu.step;
        }
        const double a_m = inverse.values[static_cast<std::size_t>(m - 1)];
        for (std::size_t i = 0; i < nu.values.size(); ++i)
            out.values[i] += a_m * power.values[i];
    }
    return out;
}

double grid_l2_loss(const DensityEstimate& est, const JumpDensityModel& truth) {
    double s = 0.0;
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        const double d = est.values[i] - truth.density(est.x_at(i));
        s += d * d;
    }
    return s * est.step;
}

double grid_l2_loss(const DensityEstimate& est, const GridFunction& truth) {
    if (std::abs(est.step - truth.step) > 1e-12)
        throw ParameterError("grid_l2_loss: mesh mismatch");
    const double offset = (est.domain.lo - truth.lo) / truth.step;
    const auto shift = static_cast<long long>(std::llround(offset));
    if (std::abs(offset - static_cast<double>(shift)) > 1e-6 || shift < 0 ||
        static_cast<std::size_t>(shift) + est.values.size() > truth.values.size())
        throw ParameterError("grid_l2_loss: estimate grid not contained in truth grid");
    double s = 0.0;
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        const double d = est.values[i] - truth.values[static_cast<std::size_t>(shift) + i];
        s += d * d;
    }
    return s * est.step;
}

}  // namespace dcp
