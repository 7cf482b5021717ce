#include "hsim/peaks.hpp"

#include "hsim/errors.hpp"

#include <algorithm>

namespace hsim {

std::vector<Peak> find_peaks(std::span<const double> x, std::span<const double> y, double min_relative_height) {
    if (x.size() != y.size()) throw DataError("find_peaks: x and y differ in length");
    std::vector<Peak> peaks;
    const std::size_t n = y.size();
    if (n < 3) return peaks;
    const double top = *std::max_element(y.begin(), y.end());
    if (!(top > 0.0)) return peaks;
    const double threshold = min_relative_height * top;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]) || y[i] < threshold) continue;
        Peak p{x[i], y[i], i};
        if (y[i - 1] > 0.0 && y[i + 1] > 0.0) {
            // Vertex of the parabola through (x, 1/y); 1/Lorentzian is quadratic.
            const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
            const double u0 = 1.0 / y[i - 1], u1 = 1.0 / y[i], u2 = 1.0 / y[i + 1];
            const double d01 = (u1 - u0) / (x1 - x0);
            const double d12 = (u2 - u1) / (x2 - x1);
            const double curvature = (d12 - d01) / (x2 - x0);
            if (curvature > 0.0) {
                const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
                if (vertex > x0 && vertex < x2) {
                    const double u = u1 + d01 * (vertex - x1) + curvature * (vertex - x0) * (vertex - x1);
                    p.position = vertex;
                    if (u > 0.0) p.height = std::max(y[i], 1.0 / u);
                }
            }
        }
        peaks.push_back(p);
    }
    return peaks;
}

} // namespace hsim
