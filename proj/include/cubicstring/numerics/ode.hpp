#pragma once

// Adaptive Dormand-Prince 5(4) integration of the complex third-order scalar
// equation y''' = c(x) y as a first-order 3-system.  With
// c(x) = -i (lambda^3 - q(x)) this produces solutions of
// i y''' + q y = lambda^3 y; with c = +i(lambda^3 - q) the starred equation.
// Output lands exactly on the requested grid (steps are clamped to nodes).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

struct OdeTolerance {
    double rel = 1e-11;
    double abs = 1e-13;
    double max_step = 0.05;
    double min_step = 1e-12;
};

struct Trajectory {
    std::vector<double> grid;
    std::vector<cplx> y, dy, d2y;  // value, first, second derivative per node
};

namespace detail {

using State = std::array<cplx, 3>;

inline State axpy(const State& a, double c, const State& b) {
    return {a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
}

}  // namespace detail

inline Trajectory integrate_third_order(const std::function<cplx(double)>& coeff,
                                        std::array<cplx, 3> init,
                                        const std::vector<double>& grid,
                                        const OdeTolerance& tol = {}) {
    if (grid.empty()) throw invalid_input("integrate_third_order: empty grid");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw invalid_input("integrate_third_order: grid must be strictly increasing");

    using detail::State;
    auto rhs = [&](double x, const State& y) -> State {
        return {y[1], y[2], coeff(x) * y[0]};
    };

    // Dormand-Prince coefficients
    static const double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static const double a21 = 1. / 5;
    static const double a31 = 3. / 40, a32 = 9. / 40;
    static const double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static const double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
    static const double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                        a65 = -5103. / 18656;
    static const double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784, b6 = 11. / 84;
    static const double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                        e6 = 22. / 525, e7 = -1. / 40;

    Trajectory out;
    out.grid = grid;
    out.y.resize(grid.size());
    out.dy.resize(grid.size());
    out.d2y.resize(grid.size());

    double x = 0.0;
    State y = {init[0], init[1], init[2]};
    size_t gi = 0;
    if (grid[0] == 0.0) {
        out.y[0] = y[0]; out.dy[0] = y[1]; out.d2y[0] = y[2];
        gi = 1;
    }
    State k1 = rhs(x, y);
    double h = tol.max_step;

    auto scale_norm = [&](const State& err, const State& ynew) {
        double m = 0.0;
        for (int i = 0; i < 3; ++i) {
            double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
            m = std::max(m, std::abs(err[i]) / sc);
        }
        return m;
    };

    while (gi < grid.size()) {
        const double target = grid[gi];
        bool clipped = false;
        if (x + h >= target) { h = target - x; clipped = true; }
        if (h < tol.min_step && !clipped)
            throw numeric_error("integrate_third_order: step underflow at x=" + std::to_string(x));

        using detail::axpy;
        State y2 = axpy(y, h * a21, k1);
        State k2 = rhs(x + c2 * h, y2);
        State y3 = axpy(axpy(y, h * a31, k1), h * a32, k2);
        State k3 = rhs(x + c3 * h, y3);
        State y4 = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
        State k4 = rhs(x + c4 * h, y4);
        State y5 = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54, k4);
        State k5 = rhs(x + c5 * h, y5);
        State y6 = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3), h * a64, k4), h * a65, k5);
        State k6 = rhs(x + h, y6);
        State ynew = axpy(axpy(axpy(axpy(axpy(y, h * b1, k1), h * b3, k3), h * b4, k4), h * b5, k5), h * b6, k6);
        State k7 = rhs(x + h, ynew);
        State err = {0, 0, 0};
        for (int i = 0; i < 3; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        double en = scale_norm(err, ynew);
        if (en <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;  // FSAL
            if (clipped) {
                out.y[gi] = y[0]; out.dy[gi] = y[1]; out.d2y[gi] = y[2];
                ++gi;
            }
        }
        double fac = (en > 0) ? 0.9 * std::pow(en, -0.2) : 5.0;
        fac = std::min(5.0, std::max(0.2, fac));
        h = std::min(tol.max_step, h * fac);
        if (h < tol.min_step) h = tol.min_step;
    }
    return out;
}

// Convenience: solution and first two derivatives at a single point.
inline std::array<cplx, 3> integrate_to(const std::function<cplx(double)>& coeff,
                                        std::array<cplx, 3> init, double x,
                                        const OdeTolerance& tol = {}) {
    if (x == 0.0) return init;
    auto tr = integrate_third_order(coeff, init, {x}, tol);
    return {tr.y.back(), tr.dy.back(), tr.d2y.back()};
}

}  // namespace cubicstring::numerics
