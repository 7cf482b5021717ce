#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hsim {

struct Peak {
    double position = 0.0;
    double height = 0.0;
    std::size_t index = 0;   // sample index of the local maximum
};

// Local maxima of a sampled non-negative curve, ascending by position.  Only
// maxima with height >= min_relative_height · max(y) are kept.  Positions are
// refined with a three-point parabola through 1/y, which is exact for a
// Lorentzian line.
std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_relative_height);

// Golden-section search for the maximum of a unimodal function on [a, b].
template <class F>
double golden_maximize(F&& f, double a, double b, int iterations = 80) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations && (b - a) > 1e-15 * (std::abs(a) + std::abs(b)); ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

} // namespace hsim
