#pragma once

#include <cmath>

namespace dcp {

// Closed interval [lo, hi] on the real line.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && hi > lo; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace dcp
