#pragma once

#include <functional>
#include <vector>

#include "dcp/simulate.hpp"
#include "dcp/wavelet.hpp"

namespace dcp {

// Function values on the uniform grid lo, lo+step, .... Used by the
// brute-force oracles that validate the estimator path; never by the
// estimators themselves.
struct GridFunction {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> values;

    double hi() const { return lo + step * static_cast<double>(values.size() - 1); }
    double x_at(std::size_t i) const { return lo + step * static_cast<double>(i); }
};

GridFunction sample_grid(double lo, double hi, double step,
                         const std::function<double(double)>& f);
GridFunction sample_grid(double lo, double hi, double step, const JumpDensityModel& model);

double grid_integral(const GridFunction& g);
double grid_sup_diff(const GridFunction& a, const GridFunction& b);

// Exact discrete convolution scaled by the mesh (FFT with zero padding, full
// support: output spans [lo1+lo2, hi1+hi2]). Steps must match.
GridFunction convolve(const GridFunction& g1, const GridFunction& g2);

struct CompoundedDensity {
    GridFunction value;
    double truncation_deficit = 0.0;  // 1 - sum_{m<=M} p_m
};

// sum_{m<=M} p_m(delta) f^{*m}, accumulated on f's grid (each power is
// restricted back; the discarded tail mass is negligible on the wide oracle
// domains this is used with).
CompoundedDensity compound_forward(const GridFunction& f, double theta, double delta,
                                   int truncation_M);

// The order-K truncated inverse applied by FFT convolution powers:
// (1/(theta*delta)) sum_{m=1}^{K+1} ((-1)^{m+1}/m) (e^{theta*delta}-1)^m nu^{*m}.
GridFunction inverse_truncated(const GridFunction& nu, double theta, double delta, int order_K);

// The Riemann-sum squared L2 distance on the estimate's grid:
// sum_i (est(x_i) - truth(x_i))^2 * step.
double grid_l2_loss(const DensityEstimate& est, const JumpDensityModel& truth);
double grid_l2_loss(const DensityEstimate& est, const GridFunction& truth);

}  // namespace dcp
