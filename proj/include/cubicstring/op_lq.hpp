#pragma once

// Spectral objects of the perturbed operator L_q(theta) y = i y''' + q y and
// the auxiliary family L_q(theta, h):
//  - fundamental system s_p(lambda, x) (i y''' + q y = lambda^3 y, unit data)
//    and starred variants s_p*(lambda, x) = conj(s_p(conj lambda, x)), which
//    solve i y''' - q y = -lambda^3 y,
//  - transformation-operator (Neumann series) oracle for s_p,
//  - characteristic functions Delta_theta(q, .), Delta_{theta,h}(q, .),
//  - real zeros seeded by the free spectrum, eigenfunctions, Green kernel and
//    resolvent.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "cubicstring/gtrig.hpp"
#include "cubicstring/numerics/ode.hpp"
#include "cubicstring/numerics/quadrature.hpp"
#include "cubicstring/numerics/roots.hpp"
#include "cubicstring/op_l0.hpp"
#include "cubicstring/potential.hpp"

namespace cubicstring::op_lq {

using numerics::OdeTolerance;
using numerics::Trajectory;

inline OdeTolerance default_ode_tol(cplx lambda, double l) {
    OdeTolerance t;
    t.rel = 1e-12;
    t.abs = 1e-14;
    t.max_step = std::min(0.05 * l, 0.5 / (1.0 + std::abs(lambda)));
    return t;
}

// value, first and second derivative of one solution at the right end
struct Solution3 {
    cplx y, dy, d2y;
};

namespace detail {

inline std::function<cplx(double)> coeff_unstarred(const Potential& pot, cplx lambda) {
    cplx l3 = lambda * lambda * lambda;
    return [&pot, l3](double x) { return -cplx(0, 1) * (l3 - pot.q(x)); };
}

inline std::function<cplx(double)> coeff_starred(const Potential& pot, cplx lambda) {
    cplx l3 = lambda * lambda * lambda;
    return [&pot, l3](double x) { return cplx(0, 1) * (l3 - pot.q(x)); };
}

}  // namespace detail

// s_p(lambda, .) at x = l for p = 0,1,2, and the starred family.
struct FundamentalSystem {
    cplx lambda;
    std::array<Solution3, 3> s;       // s_p(lambda, l), s_p', s_p''
    std::array<Solution3, 3> star;    // s_p*(lambda, l), ...

    cplx shat(int p) const {
        cplx il = cplx(0, 1) * lambda, f = 1.0;
        for (int j = 0; j < p; ++j) f *= il;
        return f * s[size_t(p)].y;
    }
    cplx shat_star(int p) const {
        cplx mil = -cplx(0, 1) * lambda, f = 1.0;
        for (int j = 0; j < p; ++j) f *= mil;
        return f * star[size_t(p)].y;
    }
};

inline Solution3 solve_one(const Potential& pot, cplx lambda, int p, double x, bool starred = false) {
    std::array<cplx, 3> init{0.0, 0.0, 0.0};
    init[size_t(p)] = 1.0;
    auto c = starred ? detail::coeff_starred(pot, lambda) : detail::coeff_unstarred(pot, lambda);
    auto v = numerics::integrate_to(c, init, x, default_ode_tol(lambda, pot.l()));
    return {v[0], v[1], v[2]};
}

inline FundamentalSystem fundamental_system(const Potential& pot, cplx lambda, bool with_star = true) {
    FundamentalSystem fs;
    fs.lambda = lambda;
    for (int p = 0; p < 3; ++p) fs.s[size_t(p)] = solve_one(pot, lambda, p, pot.l());
    if (with_star) {
        // s_p*(lambda, x) = conj(s_p(conj lambda, x))
        for (int p = 0; p < 3; ++p) {
            auto v = solve_one(pot, std::conj(lambda), p, pot.l());
            fs.star[size_t(p)] = {std::conj(v.y), std::conj(v.dy), std::conj(v.d2y)};
        }
    }
    return fs;
}

// trajectories of all three s_p (optionally starred) on a shared grid
inline std::array<Trajectory, 3> fundamental_grid(const Potential& pot, cplx lambda,
                                                  const std::vector<double>& grid,
                                                  bool starred = false) {
    std::array<Trajectory, 3> out;
    for (int p = 0; p < 3; ++p) {
        std::array<cplx, 3> init{0.0, 0.0, 0.0};
        init[size_t(p)] = 1.0;
        auto c = starred ? detail::coeff_starred(pot, lambda) : detail::coeff_unstarred(pot, lambda);
        out[size_t(p)] = numerics::integrate_third_order(c, init, grid, default_ode_tol(lambda, pot.l()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// characteristic functions

inline cplx delta_q(const Potential& pot, cplx theta, cplx lambda) {
    auto fs = fundamental_system(pot, lambda);
    return -(theta * fs.s[2].y + fs.star[2].y);
}

// real-lambda root function: Delta = -e^{i phi} * 2 Re(e^{i phi} s2(lambda,l))
inline double delta_q_real_form(const Potential& pot, double phi, double lambda) {
    auto s2 = solve_one(pot, lambda, 2, pot.l());
    return 2.0 * (std::exp(cplx(0, phi)) * s2.y).real();
}

inline cplx delta_qh(const Potential& pot, cplx theta, double h, cplx lambda) {
    auto fs = fundamental_system(pot, lambda);
    cplx d = -(theta * fs.s[2].y + fs.star[2].y);
    return d - cplx(0, 1) * h * (theta * fs.s[0].y - fs.star[0].y);
}

inline double delta_qh_real_form(const Potential& pot, double phi, double h, double lambda) {
    auto s2 = solve_one(pot, lambda, 2, pot.l());
    auto s0 = solve_one(pot, lambda, 0, pot.l());
    // -e^{-i phi} Delta_{theta,h} = 2 Re(e^{i phi} s2) - 2 h Im(e^{i phi} s0) for real lambda
    cplx e = std::exp(cplx(0, phi));
    return 2.0 * (e * s2.y).real() - 2.0 * h * (e * s0.y).imag();
}

// Delta_theta(q,.) - Delta_theta(0,.) - Q_theta(.), all pieces evaluated
// independently (validation-only).
inline double delta_q_decomposition_residual(const Potential& pot, cplx theta, cplx lambda,
                                             int panels = 400) {
    const double l = pot.l();
    std::vector<double> grid(size_t(panels) + 1);
    for (int i = 0; i <= panels; ++i) grid[size_t(i)] = l * double(i) / panels;
    auto tr = fundamental_grid(pot, lambda, grid, false);
    auto trs = fundamental_grid(pot, std::conj(lambda), grid, false);
    const cplx il = cplx(0, 1) * lambda;
    std::vector<cplx> integ(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        cplx s2t = tr[2].y[i];
        cplx s2st = std::conj(trs[2].y[i]);
        integ[i] = pot.q(t) * (theta * s2t * gtrig::s_eval(2, il * (l - t)) / (il * il) -
                               s2st * gtrig::s_eval(2, -il * (l - t)) / (il * il));
    }
    cplx Q = -cplx(0, 1) * op_l0::detail::simpson(integ, l);
    cplx dq = -(theta * tr[2].y.back() + std::conj(trs[2].y.back()));
    op_l0::L0Config cfg{l, 0.0};
    cplx d0 = -(theta * gtrig::s_eval(2, il * l) + gtrig::s_eval(2, -il * l)) / (il * il);
    (void)cfg;
    return std::abs(dq - d0 - Q);
}

// bound of Eq.-(2.41) type on |Q_theta(lambda)|
inline double q_theta_bound(const Potential& pot, cplx lambda) {
    double a = lambda.real(), b = lambda.imag(), l = pot.l();
    double d = std::exp(std::abs(b) * l) * std::cosh(0.5 * kSqrt3 * a * l);
    double s = pot.sigma(l), m2 = std::norm(lambda);
    return 2.0 / (m2 * m2) * d * (s + 0.5 * s * s / m2 * std::exp(s / m2));
}

// ---------------------------------------------------------------------------
// spectra

struct LqSpectrum {
    double l = 1.0;
    double phi = 0.0;                  // theta = e^{2 i phi}
    std::optional<double> h;           // present for the L_q(theta, h) family
    int n_lo = 0, n_hi = -1;
    std::vector<double> zeros;
    cplx a = 0.0;                      // s2(0, l)
    cplx b = 0.0;                      // s0(0, l)

    cplx theta() const { return std::exp(cplx(0, 2.0 * phi)); }
    cplx theta0() const { return std::conj(a) / a; }
    cplx theta1() const { return std::conj(b) / b; }
    double lambda(int n) const { return zeros.at(size_t(n - n_lo)); }
};

// admissibility per the lambda = 0 exclusion rules
inline void check_admissible(const LqSpectrum& sp) {
    if (std::abs(sp.a) < 1e-12) throw numeric_error("spectrum: a = s2(0,l) vanishes");
    if (std::abs(sp.theta() + sp.theta0()) < 1e-9)
        throw numeric_error("spectrum: theta + theta0 = 0 (0 in the spectrum)");
    if (sp.h) {
        cplx v = sp.a * (sp.theta() + sp.theta0()) +
                 cplx(0, 1) * *sp.h * sp.b * (sp.theta() - sp.theta1());
        if (std::abs(v) < 1e-9) throw numeric_error("spectrum: a(theta+theta0)+ihb(theta-theta1) = 0");
    }
}

// Real zeros of Delta_theta(q, .) (or Delta_{theta,h}) bracketed around the
// free zeros; window half-width 0.4 * free gap, doubled up to 3 times.
inline LqSpectrum lq_real_zeros(const Potential& pot, double phi, std::optional<double> h, int n_lo,
                                int n_hi) {
    LqSpectrum sp;
    sp.l = pot.l();
    sp.phi = phi;
    sp.h = h;
    sp.n_lo = n_lo;
    sp.n_hi = n_hi;
    {
        auto a3 = solve_one(pot, 0.0, 2, pot.l());
        auto a0 = solve_one(pot, 0.0, 0, pot.l());
        sp.a = a3.y;
        sp.b = a0.y;
    }
    op_l0::L0Config cfg{pot.l(), phi};
    auto free_sp = op_l0::l0_real_zeros(cfg, n_lo - 1, n_hi + 1);
    auto g = [&](double lam) {
        return h ? delta_qh_real_form(pot, phi, *h, lam) : delta_q_real_form(pot, phi, lam);
    };
    const double gap = M_PI / pot.l();  // half of the mean zero spacing 2 pi / l
    for (int n = n_lo; n <= n_hi; ++n) {
        double seed = free_sp.lambda(n);
        double w = 0.4 * gap;
        bool ok = false;
        for (int attempt = 0; attempt < 4 && !ok; ++attempt, w *= 2.0) {
            double a = seed - w, b = seed + w;
            // stay within neighbor windows so each root is claimed once
            a = std::max(a, 0.5 * (free_sp.lambda(n - 1) + seed));
            b = std::min(b, 0.5 * (free_sp.lambda(n + 1) + seed));
            double ga = g(a), gb = g(b);
            if (ga * gb < 0.0) {
                sp.zeros.push_back(numerics::find_bracketed_root(g, a, b, 1e-15));
                ok = true;
            }
        }
        if (!ok)
            throw numeric_error("lq_real_zeros: no sign change near free zero index " +
                                std::to_string(n));
    }
    for (size_t i = 1; i < sp.zeros.size(); ++i)
        if (!(sp.zeros[i] > sp.zeros[i - 1]))
            throw numeric_error("lq_real_zeros: window collision, zeros not increasing");
    check_admissible(sp);
    return sp;
}

// multiplicative representation -a(theta+theta0) prod (1 - lambda^3/lambda_n^3)
inline numerics::ProductResult delta_q_product(const LqSpectrum& sp, cplx lambda) {
    std::map<int, cplx> zeros;
    for (int n = sp.n_lo; n <= sp.n_hi; ++n) zeros[n] = sp.lambda(n);
    auto pr = numerics::truncated_product(zeros, lambda, 2.0 * M_PI / sp.l);
    return {-sp.a * (sp.theta() + sp.theta0()) * pr.value, pr.tail_bound};
}

// ---------------------------------------------------------------------------
// Neumann-series (transformation-operator) oracle for s_p(lambda, x):
// iterated kernels K_1(lambda,x,t) = s2(i lambda (x-t))/(i lambda)^2,
// K_{n+1}(x,t) = int_t^x K_1(x,s) q(s) K_n(s,t) ds, summed as
// s_p = free + int_0^x [sum i^n K_n](x,t) q(t) free(t) dt.

struct NeumannEstimate {
    std::array<cplx, 3> s;   // estimates of s_p(lambda, x)
    double tail_bound;       // rigorous bound on the dropped terms
};

inline NeumannEstimate neumann_oracle(const Potential& pot, cplx lambda, double x, int n_terms,
                                      int panels = 64) {
    if (n_terms < 1 || n_terms > 6) throw invalid_input("neumann_oracle: n_terms must be 1..6");
    const cplx il = cplx(0, 1) * lambda;
    const int M = panels;
    std::vector<double> g(size_t(M) + 1);
    for (int i = 0; i <= M; ++i) g[size_t(i)] = x * double(i) / M;
    const double hstep = x / M;

    auto K1 = [&](double xx, double tt) { return gtrig::s_eval(2, il * (xx - tt)) / (il * il); };

    // K[n][i][j] ~ K_n(g_i, g_j) on the triangle j <= i
    std::vector<std::vector<cplx>> Kn(size_t(M) + 1, std::vector<cplx>(size_t(M) + 1, 0.0));
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= i; ++j) Kn[size_t(i)][size_t(j)] = K1(g[size_t(i)], g[size_t(j)]);

    std::vector<std::vector<cplx>> acc = Kn;  // sum_n i^n K_n, n = 1 term: i * K1
    for (auto& row : acc)
        for (auto& v : row) v *= cplx(0, 1);

    cplx in_pow = cplx(0, 1);
    auto prev = Kn;
    for (int n = 2; n <= n_terms; ++n) {
        in_pow *= cplx(0, 1);
        std::vector<std::vector<cplx>> next(size_t(M) + 1, std::vector<cplx>(size_t(M) + 1, 0.0));
        for (int i = 0; i <= M; ++i) {
            for (int j = 0; j < i; ++j) {
                // int_{g_j}^{g_i} K1(g_i, s) q(s) K_{n-1}(s, g_j) ds  (trapezoid on the grid)
                cplx v = 0.0;
                for (int m = j; m < i; ++m) {
                    cplx f1 = K1(g[size_t(i)], g[size_t(m)]) * pot.q(g[size_t(m)]) * prev[size_t(m)][size_t(j)];
                    cplx f2 = K1(g[size_t(i)], g[size_t(m + 1)]) * pot.q(g[size_t(m + 1)]) * prev[size_t(m + 1)][size_t(j)];
                    v += 0.5 * (f1 + f2) * hstep;
                }
                next[size_t(i)][size_t(j)] = v;
            }
        }
        for (int i = 0; i <= M; ++i)
            for (int j = 0; j <= i; ++j) acc[size_t(i)][size_t(j)] += in_pow * next[size_t(i)][size_t(j)];
        prev = std::move(next);
    }

    NeumannEstimate out;
    for (int p = 0; p < 3; ++p) {
        std::vector<cplx> integ(size_t(M) + 1);
        for (int j = 0; j <= M; ++j)
            integ[size_t(j)] = acc[size_t(M)][size_t(j)] * pot.q(g[size_t(j)]) *
                               gtrig::s_eval_scaled(p, lambda, g[size_t(j)]);
        cplx corr = 0.0;
        for (int j = 0; j < M; ++j) corr += 0.5 * (integ[size_t(j)] + integ[size_t(j + 1)]) * hstep;
        out.s[size_t(p)] = gtrig::s_eval_scaled(p, lambda, x) + corr;
    }
    // tail bound from |K_n| <= d(lambda(x-t)) sigma^{n-1}(x)/(|lambda|^{2n} (n-1)!):
    // dropped |sum_{n>m} ...| <= d(lambda x) sigma^m/(|lambda|^{2(m+1)} m!) e^{sigma/|lambda|^2}
    //                            * int |q| |free| with |free| <= d(lambda t)/|lambda|^p
    double a = lambda.real(), b = lambda.imag();
    auto dfun = [&](double s) { return std::exp(std::abs(b) * s) * std::cosh(0.5 * kSqrt3 * a * s); };
    double m2 = std::norm(lambda), sx = pot.sigma(x);
    double fact = 1.0;
    for (int j = 1; j <= n_terms; ++j) fact *= j;
    double tail = dfun(x) * std::pow(sx, n_terms) / (std::pow(m2, n_terms + 1) * fact) *
                  std::exp(sx / m2) * sx * dfun(x);
    out.tail_bound = tail;
    return out;
}

// T(lambda,x,t)/(x-t)^2 -> i q(x)/2 as t -> x: evaluated via the kernel sum at
// t = x - eps (validation of the transformation-kernel diagonal limit).
inline cplx kernel_diagonal_ratio(const Potential& pot, cplx lambda, double x, double eps) {
    // T = N q with N = sum i^n K_n; near the diagonal the n = 1 term dominates:
    // compute the full 2-term sum at (x, x-eps)
    const cplx il = cplx(0, 1) * lambda;
    auto K1 = [&](double xx, double tt) { return gtrig::s_eval(2, il * (xx - tt)) / (il * il); };
    double t = x - eps;
    cplx k1 = K1(x, t);
    cplx k2 = numerics::quad_adaptive(
        [&](double s) { return K1(x, s) * pot.q(s) * K1(s, t); }, t, x, 1e-13);
    cplx T = (cplx(0, 1) * k1 - k2) * pot.q(t);
    return T / (eps * eps);
}

// ---------------------------------------------------------------------------
// eigenfunctions / Green kernel / resolvent

class EigenfunctionQ {
  public:
    EigenfunctionQ(const Potential& pot, double lambda_n, size_t panels = 0) : lambda_(lambda_n) {
        const double l = pot.l();
        size_t n = panels ? panels : op_l0::detail::grid_size_for(lambda_n * l);
        grid_.resize(n + 1);
        for (size_t i = 0; i <= n; ++i) grid_[i] = l * double(i) / double(n);
        std::vector<double> positive(grid_.begin() + 1, grid_.end());
        auto tr = fundamental_grid(pot, lambda_n, positive, false);
        cplx s1l = tr[1].y.back(), s2l = tr[2].y.back();
        vals_.resize(n + 1);
        vals_[0] = 0.0;
        for (size_t i = 1; i <= n; ++i) vals_[i] = tr[2].y[i - 1] * s1l - tr[1].y[i - 1] * s2l;
        std::vector<double> mod2(n + 1);
        for (size_t i = 0; i <= n; ++i) mod2[i] = std::norm(vals_[i]);
        double nrm2 = op_l0::detail::simpson(mod2, l);
        if (nrm2 <= 0.0) throw numeric_error("EigenfunctionQ: zero norm");
        an_ = std::sqrt(nrm2);
        for (auto& v : vals_) v /= an_;
    }

    // sample access on the construction grid
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return vals_; }
    double lambda() const { return lambda_; }
    double a_n() const { return an_; }  // normalization constant ||u||

  private:
    double lambda_;
    std::vector<double> grid_;
    std::vector<cplx> vals_;
    double an_;
};

// a_n^2 from the removable-limit expression
//   a_n^2 = -Delta_theta(q,lambda) s2(lambda,l)/(i(lambda_n^3 - lambda^3)),
// evaluated at lambda = lambda_n (1 - eps), Richardson-extrapolated in eps.
inline double an_squared_limit(const Potential& pot, cplx theta, double lambda_n) {
    auto value = [&](double eps) {
        double lam = lambda_n * (1.0 - eps);
        auto fs = fundamental_system(pot, lam);
        cplx dq = -(theta * fs.s[2].y + fs.star[2].y);
        cplx l3 = cplx(lambda_n * lambda_n * lambda_n) - cplx(lam * lam * lam);
        return (dq * fs.s[2].y / (cplx(0, 1) * l3)).real();
    };
    double v1 = value(1e-5), v2 = value(5e-6);
    return 2.0 * v2 - v1;
}

struct GreenEvaluator {
    // separable kernel G(lambda,x,t) = s0(x)s2*(t) - s1(x)s1*(t) + s2(x)s0*(t)
    std::vector<double> grid;
    std::array<std::vector<cplx>, 3> sx;   // s_p on grid
    std::array<std::vector<cplx>, 3> st;   // s_p* on grid
    cplx lambda;

    GreenEvaluator(const Potential& pot, cplx lam, size_t panels) : lambda(lam) {
        const double l = pot.l();
        grid.resize(panels + 1);
        for (size_t i = 0; i <= panels; ++i) grid[i] = l * double(i) / double(panels);
        std::vector<double> positive(grid.begin() + 1, grid.end());
        auto tr = fundamental_grid(pot, lam, positive, false);
        auto trs = fundamental_grid(pot, std::conj(lam), positive, false);
        for (int p = 0; p < 3; ++p) {
            sx[size_t(p)].resize(panels + 1);
            st[size_t(p)].resize(panels + 1);
            sx[size_t(p)][0] = (p == 0) ? 1.0 : 0.0;
            st[size_t(p)][0] = (p == 0) ? 1.0 : 0.0;
            for (size_t i = 1; i <= panels; ++i) {
                sx[size_t(p)][i] = tr[size_t(p)].y[i - 1];
                st[size_t(p)][i] = std::conj(trs[size_t(p)].y[i - 1]);
            }
        }
    }

    cplx G(size_t ix, size_t it) const {
        return sx[0][ix] * st[2][it] - sx[1][ix] * st[1][it] + sx[2][ix] * st[0][it];
    }
};

inline cplx green_kernel(const Potential& pot, cplx lambda, double x, double t) {
    auto at = [&](double pos, bool star) -> std::array<cplx, 3> {
        std::array<cplx, 3> v;
        for (int p = 0; p < 3; ++p) {
            if (pos == 0.0) {
                v[size_t(p)] = (p == 0) ? 1.0 : 0.0;
            } else if (!star) {
                v[size_t(p)] = solve_one(pot, lambda, p, pos).y;
            } else {
                v[size_t(p)] = std::conj(solve_one(pot, std::conj(lambda), p, pos).y);
            }
        }
        return v;
    };
    auto a = at(x, false), b = at(t, true);
    return a[0] * b[2] - a[1] * b[1] + a[2] * b[0];
}

// resolvent of L_q(theta) on a uniform sample grid (even panel count)
inline std::vector<cplx> resolvent_q(const Potential& pot, cplx theta, cplx lambda,
                                     const std::vector<cplx>& f, double near_tol = 1e-8) {
    const size_t n = f.size() - 1;
    if (n < 8 || n % 2) throw invalid_input("resolvent_q: need even panel count");
    const double l = pot.l();
    GreenEvaluator ge(pot, lambda, n);
    cplx s2l = ge.sx[2][n];
    cplx s2sl = ge.st[2][n];
    cplx dq = -(theta * s2l + s2sl);
    if (std::abs(dq) < near_tol)
        throw numeric_error("resolvent_q: lambda too close to the spectrum, |Delta| = " +
                            std::to_string(std::abs(dq)));
    const double h = l / double(n);
    std::vector<cplx> out(n + 1);
    std::vector<cplx> integ(n + 1);
    for (size_t i = 0; i <= n; ++i) {
        for (size_t j = 0; j <= n; ++j) {
            cplx k = ge.G(i, n) * ge.st[2][j] - theta * ge.G(n, j) * ge.sx[2][i];
            if (j <= i) k += theta * ge.G(i, j) * s2l;
            else k -= ge.G(i, j) * s2sl;
            integ[j] = k * f[j];
        }
        cplx acc = 0.0;
        if (i > 0) acc += op_l0::detail::simpson_range(integ, h, 0, i);
        if (i < n) acc += op_l0::detail::simpson_range(integ, h, i, n);
        out[i] = cplx(0, 1) / dq * acc;
    }
    return out;
}

}  // namespace cubicstring::op_lq
