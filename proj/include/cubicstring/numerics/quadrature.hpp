#pragma once

// Adaptive Gauss-Kronrod (7,15) quadrature for complex-valued integrands and
// a principal-value rule by singularity subtraction:
//   PV int_a^b f(t)/(t - s) dt = int (f(t)-f(s))/(t-s) dt + f(s) ln((b-s)/(s-a)).

#include <array>
#include <functional>
#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

namespace gk {
// Kronrod-15 nodes/weights on [-1,1] and embedded Gauss-7 weights.
inline constexpr std::array<double, 8> xk = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr std::array<double, 4> wg = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};
}  // namespace gk

struct QuadResult {
    cplx value;
    double error;
};

inline QuadResult gk15(const std::function<cplx(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    cplx ik = 0.0, ig = 0.0;
    for (int i = 0; i < 7; ++i) {
        cplx fp = f(c + h * gk::xk[i]), fm = f(c - h * gk::xk[i]);
        ik += gk::wk[i] * (fp + fm);
        if (i % 2 == 1) ig += gk::wg[i / 2] * (fp + fm);
    }
    cplx f0 = f(c);
    ik += gk::wk[7] * f0;
    ig += gk::wg[3] * f0;
    ik *= h;
    ig *= h;
    double err = std::abs(ik - ig);
    return {ik, std::pow(200.0 * err, 1.5) < err ? std::pow(200.0 * err, 1.5) : err};
}

inline cplx quad_adaptive(const std::function<cplx(double)>& f, double a, double b,
                          double tol = 1e-11, int max_intervals = 4000) {
    struct Seg { double a, b; cplx val; double err; };
    std::vector<Seg> segs;
    auto r0 = gk15(f, a, b);
    segs.push_back({a, b, r0.value, r0.error});
    cplx total = r0.value;
    double toterr = r0.error;
    int n = 1;
    while (toterr > tol * (1.0 + std::abs(total)) && n < max_intervals) {
        // split the worst segment
        size_t worst = 0;
        for (size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        Seg s = segs[worst];
        double m = 0.5 * (s.a + s.b);
        if (m == s.a || m == s.b) break;
        auto rl = gk15(f, s.a, m);
        auto rr = gk15(f, m, s.b);
        total += rl.value + rr.value - s.val;
        toterr += rl.error + rr.error - s.err;
        segs[worst] = {s.a, m, rl.value, rl.error};
        segs.push_back({m, s.b, rr.value, rr.error});
        ++n;
    }
    if (toterr > 1e-4 * (1.0 + std::abs(total)) && n >= max_intervals)
        throw numeric_error("quad_adaptive: failed to converge");
    return total;
}

inline cplx quad_principal_value(const std::function<cplx(double)>& f, double a, double b, double t,
                                 double tol = 1e-10) {
    if (!(a < t && t < b)) throw invalid_input("quad_principal_value: t must lie inside (a, b)");
    const cplx ft = f(t);
    auto g = [&](double tau) -> cplx {
        double d = tau - t;
        if (std::abs(d) < 1e-14 * (1.0 + std::abs(t))) {
            // difference quotient at the singular point = f'(t)
            double h = 1e-6 * (b - a);
            return (f(t + h) - f(t - h)) / (2.0 * h);
        }
        return (f(tau) - ft) / d;
    };
    // split at t so the Kronrod nodes never straddle the removable point badly
    cplx v = quad_adaptive(g, a, t, tol) + quad_adaptive(g, t, b, tol);
    return v + ft * std::log((b - t) / (t - a));
}

}  // namespace cubicstring::numerics
