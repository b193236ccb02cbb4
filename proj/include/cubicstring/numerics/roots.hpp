#pragma once

#include <functional>
#include <string>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

// Bisection with secant polish inside the retained bracket.  Requires a sign
// change on [a, b]; converges to |b-a|*tol + tol.
inline double find_bracketed_root(const std::function<double(double)>& f, double a, double b,
                                  double tol = 1e-14) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw numeric_error("find_bracketed_root: same-sign endpoints on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
    for (int it = 0; it < 200; ++it) {
        double mid;
        // secant proposal, fall back to bisection when it leaves the bracket
        double denom = fb - fa;
        if (denom != 0.0) {
            mid = (a * fb - b * fa) / denom;
            if (!(mid > a && mid < b)) mid = 0.5 * (a + b);
        } else {
            mid = 0.5 * (a + b);
        }
        // guard against stagnation at an endpoint
        double width = b - a;
        if (mid - a < 1e-3 * width) mid = a + 1e-3 * width;
        if (b - mid < 1e-3 * width) mid = b - 1e-3 * width;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fa * fm < 0.0) { b = mid; fb = fm; }
        else { a = mid; fa = fm; }
        if (b - a <= tol * (1.0 + std::abs(a) + std::abs(b))) break;
    }
    return 0.5 * (a + b);
}

// Newton iteration on a complex analytic function with numerical derivative;
// used to polish zeros off the real axis (e.g. the B1 zeros near iR).
inline cplx complex_newton(const std::function<cplx(cplx)>& f, cplx seed, double tol = 1e-13,
                           int max_iter = 60) {
    cplx z = seed;
    for (int it = 0; it < max_iter; ++it) {
        double h = 1e-7 * (1.0 + std::abs(z));
        cplx fz = f(z);
        cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (df == 0.0) break;
        cplx step = fz / df;
        z -= step;
        if (std::abs(step) <= tol * (1.0 + std::abs(z))) break;
    }
    return z;
}

}  // namespace cubicstring::numerics
