#pragma once

// Spectral theory of the unperturbed operator L_0(theta): y -> i y''' with
// y(0) = 0, y'(l) = theta y'(0), y(l) = 0, theta = e^{2 i phi} on the unit
// circle.  Characteristic function
//   Delta_theta(0, lambda) = -(1/(i lambda)^2) [theta s2(i lambda l) + s2(-i lambda l)],
// real zeros lambda_n, eigenvalues lambda_n^3, eigenfunctions, resolvent and
// spectral projections.

#include <map>
#include <vector>

#include "cubicstring/complex_util.hpp"
#include "cubicstring/gtrig.hpp"
#include "cubicstring/numerics/products.hpp"
#include "cubicstring/numerics/roots.hpp"

namespace cubicstring::op_l0 {

struct L0Config {
    double l = 1.0;
    double phi = 0.0;  // theta = e^{2 i phi}, phi in [0, pi)

    cplx theta() const { return std::exp(cplx(0, 2.0 * phi)); }
};

inline cplx delta0(const L0Config& cfg, cplx lambda) {
    const double l = cfg.l;
    const cplx theta = cfg.theta();
    const cplx il = cplx(0, 1) * lambda;
    if (std::abs(il * l) < 0.1) {
        // Delta = -l^2 [theta P(i lambda l) + P(-i lambda l)], P(z) = s2(z)/z^2
        auto P = [](cplx z) {
            // P(z) = s2(z)/z^2 = sum_k z^{3k}/(3k+2)!
            cplx term = 0.5, sum = 0.5;
            const cplx z3 = z * z * z;
            for (int k = 0; k < 12; ++k) {
                double n = 3.0 * k + 2.0;
                term *= z3 / ((n + 1.0) * (n + 2.0) * (n + 3.0));
                sum += term;
                if (std::abs(term) < 1e-18) break;
            }
            return sum;
        };
        return -l * l * (theta * P(il * l) + P(-il * l));
    }
    return -(theta * gtrig::s_eval(2, il * l) + gtrig::s_eval(2, -il * l)) / (il * il);
}

// For real lambda, Delta_theta(0,lambda) = (e^{i phi}/lambda^2) * 2 Re(e^{i phi} s2(i lambda l)):
// the real function whose sign changes locate the zeros.
inline double delta0_real_form(const L0Config& cfg, double lambda) {
    cplx v = std::exp(cplx(0, cfg.phi)) * gtrig::s_eval(2, cplx(0, lambda * cfg.l));
    return 2.0 * v.real();
}

struct L0Spectrum {
    L0Config config;
    int n_lo = 0, n_hi = -1;
    std::vector<double> zeros;  // lambda_n for n = n_lo..n_hi

    double lambda(int n) const { return zeros.at(size_t(n - n_lo)); }
    double eigenvalue(int n) const { double z = lambda(n); return z * z * z; }
};

// Lemma 1.4: one zero per interval ((2/l)(pi n + phi), (2/l)(pi (n+1) + phi)),
// theta != +-1 (phi not a multiple of pi/2; at those values the endpoint
// functions degenerate and the interval localization fails).
inline L0Spectrum l0_real_zeros(const L0Config& cfg, int n_lo, int n_hi) {
    const double phi = cfg.phi, l = cfg.l;
    if (std::abs(std::remainder(2.0 * phi, M_PI)) < 1e-12)
        throw invalid_input("l0_real_zeros: theta = +-1 is degenerate");
    L0Spectrum sp;
    sp.config = cfg;
    sp.n_lo = n_lo;
    sp.n_hi = n_hi;
    auto g = [&](double lam) { return delta0_real_form(cfg, lam); };
    for (int n = n_lo; n <= n_hi; ++n) {
        double a = 2.0 / l * (M_PI * n + phi);
        double b = 2.0 / l * (M_PI * (n + 1) + phi);
        const double pad = 1e-9 * (1.0 + std::abs(a) + std::abs(b));
        double r = numerics::find_bracketed_root(g, a + pad, b - pad, 1e-15);
        sp.zeros.push_back(r);
    }
    return sp;
}

// Multiplicative representation (nondegenerate branch):
//   Delta_theta(0,lambda) = -(l^2/2)(theta + 1) prod_n (1 - lambda^3/lambda_n^3).
inline numerics::ProductResult delta0_product(const L0Config& cfg, cplx lambda,
                                              const L0Spectrum& spectrum) {
    std::map<int, cplx> zeros;
    for (int n = spectrum.n_lo; n <= spectrum.n_hi; ++n) zeros[n] = spectrum.lambda(n);
    auto pr = numerics::truncated_product(zeros, lambda, 2.0 * M_PI / cfg.l);
    cplx pref = -0.5 * cfg.l * cfg.l * (cfg.theta() + 1.0);
    return {pref * pr.value, pr.tail_bound};
}

// Unnormalized eigenfunction
//   u_n(x) = s2(ilx)/(il)^2 * s1(ill)/(il) - s1(ilx)/(il) * s2(ill)/(il)^2.
// Evaluated through the difference-of-cosines form (a consequence of the
// addition formulas),
//   u_n(x) = -(2/(3 i sqrt3 (i lambda)^3)) sum_k e^{i lambda zeta_k (x - l/2)}
//            sinh(sqrt3 lambda zeta_k l / 2),
// which keeps all intermediates at the size of u itself; the naive product
// form loses ~e^{sqrt3 |lambda| x / 2} digits to cancellation near x = l.
inline cplx eigenfunction0_raw(const L0Config& cfg, double lambda_n, double x) {
    if (std::abs(lambda_n) * cfg.l < 1.0) {
        using gtrig::s_eval_scaled;
        return s_eval_scaled(2, lambda_n, x) * s_eval_scaled(1, lambda_n, cfg.l) -
               s_eval_scaled(1, lambda_n, x) * s_eval_scaled(2, lambda_n, cfg.l);
    }
    const cplx il = cplx(0, 1) * lambda_n;
    cplx sum = 0.0;
    for (int k = 1; k <= 3; ++k) {
        const cplx zk = CubeRoots::zeta(k);
        sum += std::exp(il * zk * (x - 0.5 * cfg.l)) * std::sinh(0.5 * kSqrt3 * lambda_n * zk * cfg.l);
    }
    return -2.0 / (3.0 * cplx(0, kSqrt3) * il * il * il) * sum;
}

namespace detail {

// composite Simpson over n+1 uniformly spaced sample values on [0, L]
template <typename T>
inline T simpson(const std::vector<T>& f, double L) {
    const size_t n = f.size() - 1;  // must be even
    const double h = L / double(n);
    T acc = f[0] + f[n];
    for (size_t i = 1; i < n; i += 2) acc += 4.0 * f[i];
    for (size_t i = 2; i < n; i += 2) acc += 2.0 * f[i];
    return acc * (h / 3.0);
}

inline size_t grid_size_for(double lambda_l) {
    // resolve oscillations up to frequency sqrt3 |lambda| at ~1e-9 Simpson error
    size_t n = size_t(64 + 84.0 * std::abs(lambda_l));
    return n % 2 ? n + 1 : n;
}

// O(h^4) integration of uniformly sampled values over index range [j0, j1]:
// composite Simpson, with a 3/8 block when the panel count is odd.
template <typename T>
inline T simpson_range(const std::vector<T>& f, double h, size_t j0, size_t j1) {
    T acc{};
    size_t j = j0;
    if ((j1 - j0) % 2 == 1) {
        if (j1 - j0 >= 3) {
            acc += (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]) * (3.0 * h / 8.0);
            j += 3;
        } else {
            return 0.5 * h * (f[j0] + f[j1]);
        }
    }
    for (; j + 2 <= j1; j += 2) acc += (f[j] + 4.0 * f[j + 1] + f[j + 2]) * (h / 3.0);
    return acc;
}

}  // namespace detail

// L2-normalized eigenfunction psi_n at x (normalization by quadrature).
class Eigenfunction0 {
  public:
    Eigenfunction0(const L0Config& cfg, double lambda_n) : cfg_(cfg), lambda_(lambda_n) {
        const size_t n = detail::grid_size_for(lambda_n * cfg.l);
        std::vector<double> mod2(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            double x = cfg.l * double(i) / double(n);
            mod2[i] = std::norm(eigenfunction0_raw(cfg, lambda_n, x));
        }
        double nrm2 = detail::simpson(mod2, cfg.l);
        if (nrm2 <= 0.0) throw numeric_error("Eigenfunction0: zero norm (spurious root?)");
        scale_ = 1.0 / std::sqrt(nrm2);
    }

    cplx operator()(double x) const { return scale_ * eigenfunction0_raw(cfg_, lambda_, x); }
    double lambda() const { return lambda_; }

  private:
    L0Config cfg_;
    double lambda_;
    double scale_;
};

// Resolvent (L_0 - lambda^3)^{-1} f by quadrature of the kernel form; f given
// as samples on a uniform grid of [0, l] (size odd for Simpson).
inline std::vector<cplx> resolvent0(const L0Config& cfg, cplx lambda, const std::vector<cplx>& f,
                                    double near_tol = 1e-8) {
    const size_t n = f.size() - 1;
    if (n < 8 || n % 2) throw invalid_input("resolvent0: need even panel count");
    const double l = cfg.l;
    const cplx theta = cfg.theta();
    const cplx il = cplx(0, 1) * lambda;
    cplx dl = delta0(cfg, lambda);
    if (std::abs(dl) < near_tol)
        throw numeric_error("resolvent0: lambda too close to the spectrum, |Delta| = " +
                            std::to_string(std::abs(dl)));
    auto s2 = [&](cplx z) { return gtrig::s_eval(2, z); };
    std::vector<double> xs(n + 1);
    for (size_t i = 0; i <= n; ++i) xs[i] = l * double(i) / double(n);

    std::vector<cplx> out(n + 1);
    const cplx pref = cplx(0, 1) / (il * il * il * il * dl);
    const cplx s2l_p = s2(il * l), s2l_m = s2(-il * l);
    for (size_t i = 0; i <= n; ++i) {
        const double x = xs[i];
        std::vector<cplx> integ(n + 1);
        for (size_t j = 0; j <= n; ++j) {
            const double t = xs[j];
            cplx k = s2(il * (x - l)) * s2(-il * t) - theta * s2(il * x) * s2(il * (l - t));
            if (t <= x) k += theta * s2l_p * s2(il * (x - t));
            else k -= s2l_m * s2(il * (x - t));
            integ[j] = k * f[j];
        }
        // the kernel has a derivative kink at t = x (a grid node): integrate
        // [0, x] and [x, l] separately at fourth order
        const double h = l / double(n);
        cplx acc = 0.0;
        if (i > 0) acc += detail::simpson_range(integ, h, 0, i);
        if (i < n) acc += detail::simpson_range(integ, h, i, n);
        out[i] = pref * acc;
    }
    return out;
}

// Orthogonal projection E_n f = <f, psi_n> psi_n on the sample grid.
inline std::vector<cplx> projection0(const L0Config& cfg, const Eigenfunction0& psi,
                                     const std::vector<cplx>& f) {
    const size_t n = f.size() - 1;
    if (n % 2) throw invalid_input("projection0: need even panel count");
    std::vector<cplx> prod(n + 1);
    for (size_t i = 0; i <= n; ++i) {
        double x = cfg.l * double(i) / double(n);
        prod[i] = f[i] * std::conj(psi(x));
    }
    cplx coef = detail::simpson(prod, cfg.l);
    std::vector<cplx> out(n + 1);
    for (size_t i = 0; i <= n; ++i) {
        double x = cfg.l * double(i) / double(n);
        out[i] = coef * psi(x);
    }
    return out;
}

}  // namespace cubicstring::op_l0
