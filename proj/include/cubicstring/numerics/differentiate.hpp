#pragma once

// Differentiation of sampled data: fourth-order central differences on the
// interior (uniform grids), second-order one-sided stencils at the ends, with
// optional binomial pre-smoothing passes for noisy samples.

#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

inline std::vector<double> smooth_samples(std::vector<double> f, int passes) {
    const size_t n = f.size();
    for (int p = 0; p < passes; ++p) {
        std::vector<double> g = f;
        for (size_t i = 1; i + 1 < n; ++i) g[i] = 0.25 * f[i - 1] + 0.5 * f[i] + 0.25 * f[i + 1];
        f = std::move(g);
    }
    return f;
}

inline std::vector<double> differentiate_smooth(const std::vector<double>& samples,
                                                const std::vector<double>& grid,
                                                int smoothing_passes = 0) {
    const size_t n = samples.size();
    if (n != grid.size() || n < 5) throw invalid_input("differentiate_smooth: need >= 5 matching nodes");
    for (size_t i = 1; i < n; ++i)
        if (!(grid[i] > grid[i - 1])) throw invalid_input("differentiate_smooth: grid must increase");

    std::vector<double> f = smoothing_passes > 0 ? smooth_samples(samples, smoothing_passes) : samples;
    const double h = grid[1] - grid[0];
    std::vector<double> d(n);
    for (size_t i = 2; i + 2 < n; ++i)
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[1] = (f[2] - f[0]) / (2.0 * h);
    d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

}  // namespace cubicstring::numerics
