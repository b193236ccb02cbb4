#pragma once

// Generalized trigonometric functions s_p(z), p = 0,1,2: the exponential
// averages
//     s_p(z) = (1/3) * sum_k zeta_k^{-p} exp(z zeta_k),
// solving y''' = y with s_p^{(j)}(0) = delta_{jp}.  They are the cos/sin
// analogues of the third-order problem; everything downstream (characteristic
// functions, spectra, jump kernels) is built on them.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::gtrig {

namespace detail {

// Taylor sum s_p(z) = sum_m z^{3m+p} / (3m+p)!, summed until the term falls
// below machine tail.  Used for moderate |z| where the exponential average
// cancels.
inline cplx s_taylor(int p, cplx z) {
    cplx term = 1.0;
    for (int j = 1; j <= p; ++j) term *= z / double(j);
    cplx sum = term;
    const cplx z3 = z * z * z;
    int n = p;
    for (int m = 0; m < 80; ++m) {
        term *= z3 / double((n + 1) * (n + 2) * (n + 3));
        n += 3;
        sum += term;
        if (std::abs(term) <= 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

inline cplx s_exponential(int p, cplx z) {
    const cplx w2 = (p == 0) ? kZeta1 : (p == 1 ? kZeta3 : kZeta2);  // zeta2^{-p}
    const cplx w3 = std::conj(w2);                                   // zeta3^{-p}
    return (std::exp(z) + w2 * std::exp(z * kZeta2) + w3 * std::exp(z * kZeta3)) / 3.0;
}

}  // namespace detail

// Switch radius between the Taylor series and the exponential average.  Both
// paths overlap on an annulus for cross-checking.
inline constexpr double kSeriesRadius = 1.5;

inline cplx s_eval(int p, cplx z) {
    if (p < 0 || p > 2) throw invalid_input("s_eval: p must be 0, 1 or 2");
    if (!is_finite(z)) throw invalid_input("s_eval: non-finite argument");
    if (std::abs(z) < kSeriesRadius) return detail::s_taylor(p, z);
    return detail::s_exponential(p, z);
}

// s_p(i lambda x) / (i lambda)^p with the removable lambda -> 0 limit x^p/p!.
inline cplx s_eval_scaled(int p, cplx lambda, double x) {
    if (p < 0 || p > 2) throw invalid_input("s_eval_scaled: p must be 0, 1 or 2");
    if (!is_finite(lambda) || !std::isfinite(x)) throw invalid_input("s_eval_scaled: non-finite argument");
    const cplx il = cplx(0, 1) * lambda;
    if (std::abs(il * x) < kSeriesRadius) {
        // series of s_p(ilx)/(il)^p = sum_m (il)^{3m} x^{3m+p} / (3m+p)!
        cplx xpow = 1.0;
        for (int j = 1; j <= p; ++j) xpow *= x / double(j);
        cplx term = xpow, sum = xpow;
        const cplx c = il * il * il;
        int n = p;
        for (int m = 0; m < 60; ++m) {
            term *= c * (x * x * x) / double((n + 1) * (n + 2) * (n + 3));
            n += 3;
            sum += term;
            if (std::abs(term) <= 1e-18 * (1.0 + std::abs(sum))) break;
        }
        return sum;
    }
    cplx pref = 1.0;
    for (int j = 0; j < p; ++j) pref *= il;
    return s_eval(p, il * x) / pref;
}

// ---------------------------------------------------------------------------
// zeros of s_p on the negative real ray: s_p(-x) = (1/3)[e^{-x} +
// 2 e^{x/2} cos(sqrt3 x/2 + phi_p)] with phi_0 = 0, phi_1 = 2pi/3,
// phi_2 = -2pi/3; zeros solve cos(sqrt3 x/2 + phi_p) = -e^{-3x/2}/2.

inline double phase_offset(int p) {
    if (p == 0) return 0.0;
    if (p == 1) return 2.0 * M_PI / 3.0;
    return -2.0 * M_PI / 3.0;
}

// Oscillatory part of s_p(-x), normalized to unit amplitude:
//   3 e^{-x/2} s_p(-x) / 2 = cos(sqrt3 x/2 + phi_p) + e^{-3x/2}/2.
inline double scaled_neg_axis(int p, double x) {
    return std::cos(0.5 * kSqrt3 * x + phase_offset(p)) + 0.5 * std::exp(-1.5 * x);
}

// k-th nonnegative zero x_p(k), k >= 1.  For p = 1,2 the first zero is x = 0
// exactly.  Each remaining zero is bracketed between consecutive sign changes
// of the scaled function (one root per half-period of the cosine), then
// polished by bisection + Newton.
inline double s_zero(int p, int k) {
    if (p < 0 || p > 2 || k < 1) throw invalid_input("s_zero: bad arguments");
    if ((p == 1 || p == 2) && k == 1) return 0.0;
    const int kk = (p == 0) ? k : k - 1;  // index among strictly positive zeros
    const double period = M_PI / (0.5 * kSqrt3);
    // theta = sqrt3 x/2 + phi_p passes -cos sign flips at theta = m pi.
    // Locate the kk-th positive root by scanning half-periods.
    auto f = [&](double x) { return scaled_neg_axis(p, x); };
    int found = 0;
    double a = 0.0, b = 0.0;
    double x0 = 1e-9;
    double step = period / 2.0;
    // align scan boundaries with theta = m pi to guarantee one root per cell
    double theta0 = 0.5 * kSqrt3 * x0 + phase_offset(p);
    double m0 = std::ceil(theta0 / M_PI + 1e-12);
    double lo = x0;
    for (int cell = 0; cell < kk + 64; ++cell) {
        double hi = (m0 + cell) * M_PI;
        hi = (hi - phase_offset(p)) / (0.5 * kSqrt3);
        if (hi <= lo + 1e-12) { continue; }
        if (f(lo) * f(hi) < 0.0) {
            ++found;
            if (found == kk) { a = lo; b = hi; break; }
        }
        lo = hi;
    }
    if (b <= a) throw numeric_error("s_zero: bracketing failed for p=" + std::to_string(p) +
                                    " k=" + std::to_string(k));
    // bisect then Newton-polish on the scaled function
    double fa = f(a);
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (a + b), fm = f(mid);
        if (fa * fm <= 0.0) b = mid; else { a = mid; fa = fm; }
    }
    double x = 0.5 * (a + b);
    for (int it = 0; it < 8; ++it) {
        double fx = f(x);
        double dfx = -0.5 * kSqrt3 * std::sin(0.5 * kSqrt3 * x + phase_offset(p)) - 0.75 * std::exp(-1.5 * x);
        if (dfx == 0.0) break;
        double nx = x - fx / dfx;
        if (nx > a - step && nx < b + step) x = nx;
    }
    return x;
}

// ---------------------------------------------------------------------------
// Sector geometry.  The classifier follows the angular ranges of the paper's
// sector list:
//   Omega1: (5pi/6, 11pi/6), Omega2: (pi/2, 5pi/6), Omega3: (-pi/6, pi/2),
// with OmegaMinus_k = -Omega_k and rays reported explicitly.  The dominance
// sectors used by the asymptotics (where exp(i lambda zeta_k x) dominates) are
// a different partition, exposed as dominant_root below: Omega1 would be
// (7pi/6, 11pi/6) there.  Asymptotic machinery must use dominant_root.

enum class SectorKind : std::uint8_t {
    Omega1, Omega2, Omega3, OmegaMinus1, OmegaMinus2, OmegaMinus3, RayBoundary
};

struct SectorId {
    SectorKind kind;
    int ray_index;  // 0..5 for rays at arg = pi/2 + m*pi/3, meaningful iff RayBoundary
};

inline constexpr double kRayTolerance = 1e-12;

inline SectorId sector_of(cplx lambda, double tol = kRayTolerance) {
    if (lambda == 0.0) throw invalid_input("sector_of: lambda must be nonzero");
    double a = std::arg(lambda);  // (-pi, pi]
    // rays at pi/2 + m pi/3 (il_{zeta_k} and their opposites)
    for (int m = 0; m < 6; ++m) {
        double ray = M_PI / 2.0 + m * (M_PI / 3.0);
        double d = std::remainder(a - ray, 2.0 * M_PI);
        if (std::abs(d) <= tol) return {SectorKind::RayBoundary, m};
    }
    auto in = [&](double lo, double hi) {
        double c = std::remainder(a - 0.5 * (lo + hi), 2.0 * M_PI);
        return std::abs(c) < 0.5 * (hi - lo);
    };
    const double pi = M_PI;
    if (in(5 * pi / 6, 11 * pi / 6)) return {SectorKind::Omega1, -1};
    if (in(pi / 2, 5 * pi / 6)) return {SectorKind::Omega2, -1};
    if (in(-pi / 6, pi / 2)) return {SectorKind::Omega3, -1};
    // complement of the printed ranges: the reflected sectors
    if (in(-pi / 6 + pi, pi / 2 + pi)) return {SectorKind::OmegaMinus3, -1};
    if (in(pi / 2 + pi, 5 * pi / 6 + pi)) return {SectorKind::OmegaMinus2, -1};
    return {SectorKind::OmegaMinus1, -1};
}

// Index k of the exponential exp(i lambda zeta_k x) that dominates as
// |lambda| -> inf, i.e. argmax_k Re(i lambda zeta_k).  This is the sector
// partition under which lim 3 zeta_k^p s_p(i lambda x) e^{-i lambda zeta_k x} = 1
// holds; its Omega1 = (7pi/6, 11pi/6) contains the negative imaginary axis.
inline int dominant_root(cplx lambda) {
    double best = -1e300;
    int kb = 1;
    for (int k = 1; k <= 3; ++k) {
        double r = (cplx(0, 1) * lambda * CubeRoots::zeta(k)).real();
        if (r > best) { best = r; kb = k; }
    }
    return kb;
}

// 3 zeta_k^p s_p(i lambda x) exp(-i lambda zeta_k x); tends to 1 as
// |lambda| -> inf when k = dominant_root(lambda).
inline cplx asymptotic_factor(int p, int k, cplx lambda, double x) {
    if (p < 0 || p > 2 || k < 1 || k > 3) throw invalid_input("asymptotic_factor: bad indices");
    cplx zk = CubeRoots::zeta(k);
    cplx zkp = 1.0;
    for (int j = 0; j < p; ++j) zkp *= zk;
    return 3.0 * zkp * s_eval(p, cplx(0, 1) * lambda * x) * std::exp(-cplx(0, 1) * lambda * zk * x);
}

// ---------------------------------------------------------------------------
// Identity catalogue (Lemma-style residuals).  Each entry evaluates
// |LHS - RHS| at (z, w); derivative identities use central differences.

inline const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {
        "deriv-s0", "deriv-s1", "deriv-s2",      // (i)
        "conj-s0", "conj-s1", "conj-s2",         // (ii)
        "p-even-s0", "p-even-s1", "p-even-s2",   // (iii)
        "euler-1", "euler-2", "euler-3",         // (iv)
        "main-identity",                          // (vi)
        "addition-s0", "addition-s1", "addition-s2",  // (vii)
        "prod-s0s0", "prod-s1s2", "prod-s1s0", "prod-s2s2", "prod-s2s0", "prod-s1s1",  // (viii)
        "square-s0", "square-s1", "square-s2",   // (ix)
        "reflect-s0", "reflect-s1", "reflect-s2",// (x)
        "taylor-s0", "taylor-s1", "taylor-s2",   // (xi)
        "eq130",
    };
    return names;
}

inline double identity_residual(const std::string& name, cplx z, cplx w) {
    if (!is_finite(z) || !is_finite(w)) throw invalid_input("identity_residual: non-finite input");
    auto s = [](int p, cplx v) { return s_eval(p, v); };
    const cplx z2 = kZeta2, z3 = kZeta3;
    auto deriv = [&](int p) {  // s_p'(z) vs s_{(p+2)%3}(z)
        const double h = 1e-4;
        cplx d = (s(p, z + h) - s(p, z - h)) / (2.0 * h);
        // Richardson with half step
        cplx d2 = (s(p, z + h / 2) - s(p, z - h / 2)) / h;
        cplx extrap = (4.0 * d2 - d) / 3.0;
        return std::abs(extrap - s((p + 2) % 3, z));
    };
    if (name == "deriv-s0") return deriv(0);
    if (name == "deriv-s1") return deriv(1);
    if (name == "deriv-s2") return deriv(2);
    if (name == "conj-s0") return std::abs(std::conj(s(0, z)) - s(0, std::conj(z)));
    if (name == "conj-s1") return std::abs(std::conj(s(1, z)) - s(1, std::conj(z)));
    if (name == "conj-s2") return std::abs(std::conj(s(2, z)) - s(2, std::conj(z)));
    if (name == "p-even-s0") return std::abs(s(0, z * z2) - s(0, z));
    if (name == "p-even-s1") return std::abs(s(1, z * z2) - z2 * s(1, z));
    if (name == "p-even-s2") return std::abs(s(2, z * z2) - z2 * z2 * s(2, z));
    if (name == "euler-1" || name == "euler-2" || name == "euler-3") {
        int k = name.back() - '0';
        cplx zk = CubeRoots::zeta(k);
        return std::abs(std::exp(z * zk) - (s(0, z) + zk * s(1, z) + zk * zk * s(2, z)));
    }
    if (name == "main-identity") {
        cplx a = s(0, z), b = s(1, z), c = s(2, z);
        return std::abs(a * a * a + b * b * b + c * c * c - 3.0 * a * b * c - 1.0);
    }
    if (name == "addition-s0")
        return std::abs(s(0, z + w) - (s(0, z) * s(0, w) + s(1, z) * s(2, w) + s(2, z) * s(1, w)));
    if (name == "addition-s1")
        return std::abs(s(1, z + w) - (s(0, z) * s(1, w) + s(1, z) * s(0, w) + s(2, z) * s(2, w)));
    if (name == "addition-s2")
        return std::abs(s(2, z + w) - (s(0, z) * s(2, w) + s(1, z) * s(1, w) + s(2, z) * s(0, w)));
    if (name == "prod-s0s0")
        return std::abs(3.0 * s(0, z) * s(0, w) - (s(0, z + w) + s(0, z + z2 * w) + s(0, z + z3 * w)));
    if (name == "prod-s1s2")
        return std::abs(3.0 * s(1, z) * s(2, w) - (s(0, z + w) + z2 * s(0, z + z2 * w) + z3 * s(0, z + z3 * w)));
    if (name == "prod-s1s0")
        return std::abs(3.0 * s(1, z) * s(0, w) - (s(1, z + w) + s(1, z + z2 * w) + s(1, z + z3 * w)));
    if (name == "prod-s2s2")
        return std::abs(3.0 * s(2, z) * s(2, w) - (s(1, z + w) + z2 * s(1, z + z2 * w) + z3 * s(1, z + z3 * w)));
    if (name == "prod-s2s0")
        return std::abs(3.0 * s(2, z) * s(0, w) - (s(2, z + w) + s(2, z + z2 * w) + s(2, z + z3 * w)));
    if (name == "prod-s1s1")
        return std::abs(3.0 * s(1, z) * s(1, w) - (s(2, z + w) + z3 * s(2, z + z2 * w) + z2 * s(2, z + z3 * w)));
    if (name == "square-s0") return std::abs(3.0 * s(0, z) * s(0, z) - (s(0, 2.0 * z) + 2.0 * s(0, -z)));
    if (name == "square-s1") return std::abs(3.0 * s(1, z) * s(1, z) - (s(2, 2.0 * z) + 2.0 * s(2, -z)));
    if (name == "square-s2") return std::abs(3.0 * s(2, z) * s(2, z) - (s(1, 2.0 * z) + 2.0 * s(1, -z)));
    if (name == "reflect-s0") return std::abs(s(0, z) * s(0, z) - s(1, z) * s(2, z) - s(0, -z));
    if (name == "reflect-s1") return std::abs(s(1, z) * s(1, z) - s(0, z) * s(2, z) - s(2, -z));
    if (name == "reflect-s2") return std::abs(s(2, z) * s(2, z) - s(0, z) * s(1, z) - s(1, -z));
    if (name == "taylor-s0") return std::abs(detail::s_taylor(0, z) - detail::s_exponential(0, z));
    if (name == "taylor-s1") return std::abs(detail::s_taylor(1, z) - detail::s_exponential(1, z));
    if (name == "taylor-s2") return std::abs(detail::s_taylor(2, z) - detail::s_exponential(2, z));
    if (name == "eq130") {
        // s2(z)s1(w) - s1(z)s2(w) = (1/(i sqrt3)) [s0(z + zeta2 w) - s0(z + zeta3 w)]
        cplx lhs = s(2, z) * s(1, w) - s(1, z) * s(2, w);
        cplx rhs = (s(0, z + z2 * w) - s(0, z + z3 * w)) / (cplx(0, 1) * kSqrt3);
        return std::abs(lhs - rhs);
    }
    throw invalid_input("identity_residual: unknown identity '" + name + "'");
}

}  // namespace cubicstring::gtrig
