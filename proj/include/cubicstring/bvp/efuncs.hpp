#pragma once

// Exponential-type solutions e_k(lambda, x) of i y''' + q y = lambda^3 y with
// data (1, i lambda zeta_k, (i lambda zeta_k)^2), their normalized versions
// E_k = e_k e^{-i lambda zeta_k x}, the expansion coefficients
//   B_k(lambda) = (zeta_k shat1(lambda,l) - zeta_k^2 shat2(lambda,l))/3,
// the ratios c_2 = B_2/B_1, c_3 = B_3/B_1, the zero set of B_1*(., l) near
// the free seeds 2 pi i n / (sqrt3 l), and the catalogue of jump relations
// connecting E_k across the rays i l_{zeta_k}.
//
// Everything consumes the spectral coefficients through SCoeffs so that the
// same machinery runs from ODE data (forward) or from recovered entire
// functions (inverse).

#include <functional>
#include <memory>
#include <map>
#include <string>
#include <vector>

#include "cubicstring/numerics/roots.hpp"
#include "cubicstring/op_lq.hpp"

namespace cubicstring::bvp {

// shat_p(lambda) = (i lambda)^p s_p(lambda, l) for p = 1, 2 (and p = 0 where
// available); the only lambda-dependent inputs of the Section-3 machinery.
struct SCoeffs {
    std::function<cplx(cplx)> shat1;
    std::function<cplx(cplx)> shat2;

    cplx B(int k, cplx lam) const {
        cplx zk = CubeRoots::zeta(k);
        return (zk * shat1(lam) - zk * zk * shat2(lam)) / 3.0;
    }
    cplx Bstar(int k, cplx lam) const { return std::conj(B(k, std::conj(lam))); }
    cplx c2(cplx lam) const { return B(2, lam) / B(1, lam); }
    cplx c3(cplx lam) const { return B(3, lam) / B(1, lam); }
    cplx c2s(cplx lam) const { return Bstar(2, lam) / Bstar(1, lam); }
    cplx c3s(cplx lam) const { return Bstar(3, lam) / Bstar(1, lam); }
};

// ODE-backed coefficients with a per-lambda cache.
class OdeSCoeffs {
  public:
    explicit OdeSCoeffs(const Potential& pot) : pot_(&pot) {}

    SCoeffs coeffs() const {
        auto self = *this;
        return {[self](cplx lam) { return self.shat(1, lam); },
                [self](cplx lam) { return self.shat(2, lam); }};
    }

    cplx shat(int p, cplx lam) const {
        auto key = std::pair<double, double>(lam.real(), lam.imag());
        auto it = cache_->find(key);
        if (it == cache_->end()) {
            cplx s1 = op_lq::solve_one(*pot_, lam, 1, pot_->l()).y;
            cplx s2 = op_lq::solve_one(*pot_, lam, 2, pot_->l()).y;
            it = cache_->emplace(key, std::pair<cplx, cplx>{s1, s2}).first;
        }
        cplx il = cplx(0, 1) * lam;
        return p == 1 ? il * it->second.first : il * il * it->second.second;
    }

  private:
    const Potential* pot_;
    std::shared_ptr<std::map<std::pair<double, double>, std::pair<cplx, cplx>>> cache_ =
        std::make_shared<std::map<std::pair<double, double>, std::pair<cplx, cplx>>>();
};

// ---------------------------------------------------------------------------
// e_k solutions (forward / ODE side)

struct EkValue {
    cplx e, de;  // e_k and its x-derivative
};

inline EkValue e_k(const Potential& pot, int k, cplx lambda, double x) {
    if (k < 1 || k > 3) throw invalid_input("e_k: k must be 1..3");
    cplx mu = cplx(0, 1) * lambda * CubeRoots::zeta(k);
    auto v = numerics::integrate_to(op_lq::detail::coeff_unstarred(pot, lambda), {1.0, mu, mu * mu},
                                    x, op_lq::default_ode_tol(lambda, pot.l()));
    return {v[0], v[1]};
}

inline EkValue e_k_star(const Potential& pot, int k, cplx lambda, double x) {
    auto v = e_k(pot, k, std::conj(lambda), x);
    return {std::conj(v.e), std::conj(v.de)};
}

// E_k(lambda, x) = e_k(lambda, x) e^{-i lambda zeta_k x}; tends to 1 when
// exp(i lambda zeta_k x) dominates.
inline cplx E_k(const Potential& pot, int k, cplx lambda, double x) {
    return e_k(pot, k, lambda, x).e * std::exp(-cplx(0, 1) * lambda * CubeRoots::zeta(k) * x);
}

// residual of the Wronskian representations
//   W^e_{1,2} = sqrt3 lambda zeta3 e2*,  W^e_{2,3} = sqrt3 lambda zeta1 e1*,
//   W^e_{3,1} = sqrt3 lambda zeta2 e3*.
inline double wronskian_e_residual(const Potential& pot, cplx lambda, double x, int k, int s) {
    auto a = e_k(pot, k, lambda, x);
    auto b = e_k(pot, s, lambda, x);
    cplx W = a.e * b.de - b.e * a.de;
    cplx rhs;
    if (k == 1 && s == 2) rhs = kSqrt3 * lambda * kZeta3 * e_k_star(pot, 2, lambda, x).e;
    else if (k == 2 && s == 3) rhs = kSqrt3 * lambda * kZeta1 * e_k_star(pot, 1, lambda, x).e;
    else if (k == 3 && s == 1) rhs = kSqrt3 * lambda * kZeta2 * e_k_star(pot, 3, lambda, x).e;
    else throw invalid_input("wronskian_e_residual: pair must be (1,2), (2,3) or (3,1)");
    return std::abs(W - rhs);
}

// ---------------------------------------------------------------------------
// zeros of B1*(. , l) and residue constants

struct LambdaQ {
    std::vector<cplx> mu;        // zeros of B1* in the lower half of iR (near -2 pi i n/(sqrt3 l))
    std::vector<cplx> b1s_dot;   // d/dlambda B1* at each mu
    std::vector<cplx> a_m;       // Bdot1*(mu)/B3*(mu)
    std::vector<cplx> b_m;       // Bdot1*(mu)/B2*(mu)
};

// Finds count zeros mu_n of B1*(lambda, l), n = 1..count, seeded at the free
// values -2 pi i n/(sqrt3 l).  For real q they sit on (or exponentially close
// to) the negative imaginary axis; a complex Newton polish captures the small
// real offsets that a nonzero q induces.
inline LambdaQ lambda_q_zeros(const SCoeffs& sc, double l, int count) {
    LambdaQ out;
    auto f = [&](cplx z) { return sc.Bstar(1, z); };
    for (int n = 1; n <= count; ++n) {
        cplx seed = -cplx(0, 1) * 2.0 * M_PI * double(n) / (kSqrt3 * l);
        cplx mu = numerics::complex_newton(f, seed, 1e-14);
        if (std::abs(mu - seed) > 0.45 * 2.0 * M_PI / (kSqrt3 * l))
            throw numeric_error("lambda_q_zeros: zero escaped its seed window at n=" +
                                std::to_string(n));
        double h = 1e-6 * std::abs(mu);
        cplx dot = (f(mu + h) - f(mu - h)) / (2.0 * h);
        out.mu.push_back(mu);
        out.b1s_dot.push_back(dot);
        out.a_m.push_back(dot / sc.Bstar(3, mu));
        out.b_m.push_back(dot / sc.Bstar(2, mu));
    }
    return out;
}

// ---------------------------------------------------------------------------
// jump-relation catalogue: each relation ties E_k across one ray through the
// c* coefficients.  All quantities are computed independently by ODE, so the
// residual is a forward validation of the Section-3 identities.
//
//   A: E1 - f23 = z3 e^{i lam(z3-z1)x} c3*(lam z3) E3      (ray i l_{zeta3})
//   B: E1 - g32 = z2 e^{i lam(z2-z1)x} c2*(lam z2) E2      (ray i l_{zeta2})
//   C: E3 - f31 = z3 e^{i lam(z2-z3)x} c3*(lam z2) E2      (ray i l_{zeta1})
//   D: E2 - g21 = z2 e^{i lam(z3-z2)x} c2*(lam z3) E3      (ray i l_{zeta1})
//   E: E2 - f12 = z3 e^{i lam(z1-z2)x} c3*(lam) E1         (ray i l_{zeta2})
//   F: E3 - g13 = z2 e^{i lam(z1-z3)x} c2*(lam) E1         (ray i l_{zeta3})
// with f/g built from the omega-Wronskians; "3.17i".."3.18iii" address the
// omega-form relations directly.

namespace detail {

inline cplx omega_ps_star(const Potential& pot, const SCoeffs& sc, int p, int s, cplx lambda,
                          double x) {
    // omega_{p,s}* (lambda, x) = conj(omega_{p,s}(conj lambda, x)),
    // omega_{p,s} = (w e_s' - w' e_s)/B_p, w = shat2(.,x) shat1(l) - shat1(.,x) shat2(l)
    cplx lam = std::conj(lambda);
    auto tr = op_lq::fundamental_grid(pot, lam, {x}, false);
    cplx il = cplx(0, 1) * lam;
    cplx s1l = sc.shat1(lam), s2l = sc.shat2(lam);
    cplx w = il * il * tr[2].y[0] * s1l - il * tr[1].y[0] * s2l;
    cplx wd = il * il * tr[2].dy[0] * s1l - il * tr[1].dy[0] * s2l;
    auto es = e_k(pot, s, lam, x);
    return std::conj((w * es.de - wd * es.e) / sc.B(p, lam));
}

}  // namespace detail

inline const std::vector<std::string>& jump_relation_names() {
    static const std::vector<std::string> names = {
        "3.17i", "3.17ii", "3.17iii", "3.18i", "3.18ii", "3.18iii",
        "3.25", "3.31", "3.32", "3.33", "3.34", "3.35",
    };
    return names;
}

inline double jump_residual(const Potential& pot, const std::string& name, cplx lam, double x) {
    OdeSCoeffs osc(pot);
    auto sc = osc.coeffs();
    auto Ow = [&](int p, int s) { return detail::omega_ps_star(pot, sc, p, s, lam, x); };
    auto OwU = [&](int p, int s) {  // unstarred omega_{p,s}
        return std::conj(detail::omega_ps_star(pot, sc, p, s, std::conj(lam), x));
    };
    auto es = [&](int k) { return e_k_star(pot, k, lam, x).e; };
    const cplx z2 = kZeta2, z3 = kZeta3;
    const cplx i1 = cplx(0, 1);

    if (name == "3.17i")
        return std::abs(sc.c2(lam) * es(1) - z2 * es(3) - OwU(1, 3) / (kSqrt3 * lam));
    if (name == "3.17ii")
        return std::abs(sc.c2(lam * z2) * es(3) - z2 * es(2) - z3 * OwU(2, 1) / (kSqrt3 * lam));
    if (name == "3.17iii")
        return std::abs(sc.c2(lam * z3) * es(2) - z2 * es(1) - z2 * OwU(3, 2) / (kSqrt3 * lam));
    if (name == "3.18i")
        return std::abs(sc.c3(lam) * es(1) - z3 * es(2) + OwU(1, 2) / (kSqrt3 * lam));
    if (name == "3.18ii")
        return std::abs(sc.c3(lam * z2) * es(3) - z3 * es(1) + z3 * OwU(2, 3) / (kSqrt3 * lam));
    if (name == "3.18iii")
        return std::abs(sc.c3(lam * z3) * es(2) - z3 * es(3) + z2 * OwU(3, 1) / (kSqrt3 * lam));

    auto E = [&](int k) { return E_k(pot, k, lam, x); };
    auto ex = [&](cplx c) { return std::exp(i1 * lam * c * x); };
    if (name == "3.25") {  // E2 - f12 = z3 e^{i lam(z1-z2)x} c3*(lam) E1
        cplx f12 = (z3 / (kSqrt3 * lam)) * std::exp(-i1 * lam * z2 * x) * Ow(1, 2);
        return std::abs(E(2) - f12 - z3 * ex(kZeta1 - z2) * sc.c3s(lam) * E(1));
    }
    if (name == "3.31") {  // E1 - f23 = z3 e^{i lam(z3-z1)x} c3*(lam z3) E3
        cplx f23 = (1.0 / (kSqrt3 * lam)) * std::exp(-i1 * lam * x) * Ow(2, 3);
        return std::abs(E(1) - f23 - z3 * ex(z3 - kZeta1) * sc.c3s(lam * z3) * E(3));
    }
    if (name == "3.32") {  // E3 - f31 = z3 e^{i lam(z2-z3)x} c3*(lam z2) E2
        cplx f31 = (z2 / (kSqrt3 * lam)) * std::exp(-i1 * lam * z3 * x) * Ow(3, 1);
        return std::abs(E(3) - f31 - z3 * ex(z2 - z3) * sc.c3s(lam * z2) * E(2));
    }
    if (name == "3.33") {  // E3 - g13 = z2 e^{i lam(z1-z3)x} c2*(lam) E1
        cplx g13 = -(z2 / (kSqrt3 * lam)) * std::exp(-i1 * lam * z3 * x) * Ow(1, 3);
        return std::abs(E(3) - g13 - z2 * ex(kZeta1 - z3) * sc.c2s(lam) * E(1));
    }
    if (name == "3.34") {  // E2 - g21 = z2 e^{i lam(z3-z2)x} c2*(lam z3) E3
        cplx g21 = -(z3 / (kSqrt3 * lam)) * std::exp(-i1 * lam * z2 * x) * Ow(2, 1);
        return std::abs(E(2) - g21 - z2 * ex(z3 - z2) * sc.c2s(lam * z3) * E(3));
    }
    if (name == "3.35") {  // E1 - g32 = z2 e^{i lam(z2-z1)x} c2*(lam z2) E2
        cplx g32 = -(1.0 / (kSqrt3 * lam)) * std::exp(-i1 * lam * x) * Ow(3, 2);
        return std::abs(E(1) - g32 - z2 * ex(z2 - kZeta1) * sc.c2s(lam * z2) * E(2));
    }
    throw invalid_input("jump_residual: unknown relation '" + name + "'");
}

}  // namespace cubicstring::bvp
