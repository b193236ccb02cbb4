#pragma once

// Complex exponential integral E1(z) = int_z^inf e^{-s}/s ds (|arg z| < pi).
// Power series for small |z|, modified-Lentz continued fraction otherwise.
// Needed in closed-form tails of oscillatory Cauchy integrals:
//   int_T^inf e^{i a t} / (t - b) dt = e^{i a b} E1(-i a (T - b)),  a real != 0.

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

inline cplx expint_e1(cplx z) {
    constexpr double euler_gamma = 0.5772156649015328606;
    if (z == 0.0) throw invalid_input("expint_e1: z = 0");
    if (std::abs(z) <= 2.0) {
        cplx sum = 0.0, term = 1.0;
        for (int k = 1; k <= 60; ++k) {
            term *= -z / double(k);
            sum += term / double(k);
            if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
        }
        return -euler_gamma - std::log(z) - sum;
    }
    // continued fraction: E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
    cplx b = z + 1.0;
    cplx c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 200; ++i) {
        cplx a = -double(i) * double(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-z);
}

// int_T^inf e^{i a t}/(t - b) dt for real a != 0, pole b off the tail.
inline cplx oscillatory_tail(double a, cplx b, double T) {
    return std::exp(cplx(0, 1) * a * b) * expint_e1(-cplx(0, 1) * a * (T - b));
}

}  // namespace cubicstring::numerics
