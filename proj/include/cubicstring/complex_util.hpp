#pragma once

#include <complex>
#include <cmath>
#include <stdexcept>

namespace cubicstring {

using cplx = std::complex<double>;
using namespace std::complex_literals;

// Cube roots of unity, zeta_k^3 = 1.  zeta1 + zeta2 + zeta3 = 0 and
// zeta2 - zeta3 = i*sqrt(3); these constants drive the whole symmetry
// lambda -> lambda*zeta2 of the third-order problem.
struct CubeRoots {
    static constexpr double sqrt3 = 1.7320508075688772935274463415058724;
    static constexpr cplx zeta1{1.0, 0.0};
    static constexpr cplx zeta2{-0.5, 0.5 * sqrt3};
    static constexpr cplx zeta3{-0.5, -0.5 * sqrt3};

    static constexpr cplx zeta(int k) {
        switch (k) {
            case 1: return zeta1;
            case 2: return zeta2;
            case 3: return zeta3;
        }
        return zeta1;
    }
};

inline constexpr double kSqrt3 = CubeRoots::sqrt3;
inline constexpr cplx kZeta1 = CubeRoots::zeta1;
inline constexpr cplx kZeta2 = CubeRoots::zeta2;
inline constexpr cplx kZeta3 = CubeRoots::zeta3;

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// f*(lambda) = conj(f(conj lambda)) applied to a stored value: the "star"
// reflection used throughout; callers pass f(conj lambda) and get f*(lambda).
inline cplx star_of(cplx value_at_conj) { return std::conj(value_at_conj); }

struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cubicstring
