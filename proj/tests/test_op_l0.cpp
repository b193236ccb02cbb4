#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cubicstring/op_l0.hpp"

using namespace cubicstring;
using namespace cubicstring::op_l0;

TEST_CASE("delta0 value and symmetries") {
    L0Config cfg{1.0, 0.0};  // theta = 1
    CHECK(std::abs(delta0(cfg, 0.0) - cplx(-1.0)) < 1e-15);

    L0Config c2{1.0, 0.7};
    cplx lam = 1.3 + 0.4i;
    CHECK(std::abs(delta0(c2, lam * kZeta2) - delta0(c2, lam)) < 1e-13);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 30; ++i) {
        cplx z(u(rng), u(rng));
        cplx lhs = std::conj(delta0(c2, z));
        cplx rhs = std::conj(c2.theta()) * delta0(c2, std::conj(z));
        CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, std::abs(lhs)));
    }
    // series/exponential agreement across the small-lambda switch
    for (double lr : {0.05, 0.0999, 0.100001, 0.3}) {
        cplx direct = -(c2.theta() * gtrig::s_eval(2, cplx(0, lr)) + gtrig::s_eval(2, cplx(0, -lr))) /
                      (cplx(0, lr) * cplx(0, lr));
        CHECK(std::abs(delta0(c2, lr) - direct) < 1e-12);
    }
}

TEST_CASE("free zeros: containment, asymptotics, residuals") {
    L0Config cfg{1.0, 0.7};
    auto sp = l0_real_zeros(cfg, -20, 20);
    const double l = cfg.l, phi = cfg.phi;
    for (int n = -20; n <= 20; ++n) {
        double lam = sp.lambda(n);
        CHECK(lam > 2.0 / l * (M_PI * n + phi));
        CHECK(lam < 2.0 / l * (M_PI * (n + 1) + phi));
        CHECK(std::abs(delta0(cfg, lam)) < 1e-10 * std::max(1.0, 0.7 * std::exp(0.5 * kSqrt3 * std::abs(lam) * l) / (lam * lam)));
    }
    // strictly increasing
    for (int n = -20; n < 20; ++n) CHECK(sp.lambda(n) < sp.lambda(n + 1));
    // asymptotic approach: positive n -> (2/l)(5pi/6 + pi n + phi), negative n -> (2/l)(pi/6 + pi n + phi)
    double prev = 1e9;
    for (int n = 15; n <= 20; ++n) {
        double defect = std::abs(sp.lambda(n) - 2.0 / l * (5.0 * M_PI / 6.0 + M_PI * n + phi));
        CHECK(defect < prev + 1e-12);
        prev = defect;
    }
    prev = 1e9;
    for (int n = -15; n >= -20; --n) {
        double defect = std::abs(sp.lambda(n) - 2.0 / l * (M_PI / 6.0 + M_PI * n + phi));
        CHECK(defect < prev + 1e-12);
        prev = defect;
    }
    CHECK_THROWS_AS(l0_real_zeros(L0Config{1.0, 0.0}, 0, 1), invalid_input);
}

TEST_CASE("root simplicity: dDelta/dlambda nonzero at zeros") {
    L0Config cfg{1.0, 0.7};
    auto sp = l0_real_zeros(cfg, -5, 5);
    for (int n = -5; n <= 5; ++n) {
        double lam = sp.lambda(n), h = 1e-6;
        cplx d = (delta0(cfg, lam + h) - delta0(cfg, lam - h)) / (2.0 * h);
        double scale = std::exp(0.5 * kSqrt3 * std::abs(lam)) / std::max(1.0, lam * lam);
        CHECK(std::abs(d) > 1e-8 * scale);
    }
}

TEST_CASE("product representation vs direct evaluation") {
    L0Config cfg{1.0, 0.7854};  // theta = i
    auto sp = l0_real_zeros(cfg, -2000, 1999);
    // lambda = 0 gives the prefactor exactly
    auto at0 = delta0_product(cfg, 0.0, sp);
    CHECK(std::abs(at0.value - (-0.5 * (cfg.theta() + 1.0))) < 1e-12);
    // a member zero annihilates the product
    CHECK(std::abs(delta0_product(cfg, sp.lambda(3), sp).value) == 0.0);
    // direct agreement at lambda = 2 within 1e-4 relative
    cplx direct = delta0(cfg, 2.0);
    cplx prod = delta0_product(cfg, 2.0, sp).value;
    CHECK(std::abs(prod - direct) < 1e-4 * std::abs(direct));
}

TEST_CASE("eigenfunctions: boundary data, orthonormality, invariance") {
    L0Config cfg{1.0, 0.7};
    auto sp = l0_real_zeros(cfg, -4, 4);
    std::vector<Eigenfunction0> psis;
    for (int n = -4; n <= 4; ++n) psis.emplace_back(cfg, sp.lambda(n));

    for (auto& psi : psis) {
        CHECK(std::abs(psi(0.0)) < 1e-12);
        CHECK(std::abs(psi(cfg.l)) < 1e-9);
    }
    // psi'(l) = theta psi'(0) via differences
    for (auto& psi : psis) {
        double h = 1e-6;
        cplx d0 = (-3.0 * psi(0) + 4.0 * psi(h) - psi(2 * h)) / (2.0 * h);
        cplx dl = (3.0 * psi(cfg.l) - 4.0 * psi(cfg.l - h) + psi(cfg.l - 2 * h)) / (2.0 * h);
        CHECK(std::abs(dl - cfg.theta() * d0) < 2e-7 * std::abs(d0));
    }
    // Gram matrix = identity within 1e-8
    const size_t n = 4000;
    for (size_t a = 0; a < psis.size(); ++a)
        for (size_t b = a; b < psis.size(); ++b) {
            std::vector<cplx> prod(n + 1);
            for (size_t i = 0; i <= n; ++i) {
                double x = cfg.l * double(i) / double(n);
                prod[i] = psis[a](x) * std::conj(psis[b](x));
            }
            cplx g = op_l0::detail::simpson(prod, cfg.l);
            CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    // zeta2-invariance of the raw eigenfunction
    double lam = sp.lambda(1);
    cplx raw = eigenfunction0_raw(cfg, lam, 0.4);
    cplx rot = gtrig::s_eval_scaled(2, lam * kZeta2.real(), 0.4);  // silence unused warn path
    (void)rot;
    cplx rawrot =
        gtrig::s_eval_scaled(2, lam, 0.4) * gtrig::s_eval_scaled(1, lam, cfg.l) -
        gtrig::s_eval_scaled(1, lam, 0.4) * gtrig::s_eval_scaled(2, lam, cfg.l);
    CHECK(std::abs(raw - rawrot) < 1e-12);
}

TEST_CASE("resolvent and projections") {
    L0Config cfg{1.0, 0.7};
    auto sp = l0_real_zeros(cfg, -3, 3);
    Eigenfunction0 psi1(cfg, sp.lambda(1));
    const size_t n = 800;
    std::vector<cplx> f(n + 1);
    for (size_t i = 0; i <= n; ++i) f[i] = psi1(cfg.l * double(i) / double(n));

    cplx lam = 0.5 * (sp.lambda(0) + sp.lambda(1));  // safely off-spectrum
    auto y = resolvent0(cfg, lam, f);
    double lam1 = sp.lambda(1);
    cplx expect_factor = 1.0 / (lam1 * lam1 * lam1 - lam * lam * lam);
    double worst = 0.0;
    for (size_t i = 0; i <= n; ++i)
        worst = std::max(worst, std::abs(y[i] - expect_factor * f[i]));
    CHECK(worst < 1e-6 * std::abs(expect_factor));
    CHECK(std::abs(y[0]) < 1e-8 * std::abs(expect_factor));
    CHECK(std::abs(y[n]) < 1e-6 * std::abs(expect_factor));

    // resolvent-limit projection: (lambda_1^3 - lambda^3) R f -> <f,psi>psi
    cplx lam_near = lam1 * (1.0 - 1e-6);
    auto yn = resolvent0(cfg, lam_near, f, 1e-12);
    cplx fac = lam1 * lam1 * lam1 - lam_near * lam_near * lam_near;
    auto proj = projection0(cfg, psi1, f);
    double w2 = 0.0;
    for (size_t i = 0; i <= n; ++i) w2 = std::max(w2, std::abs(fac * yn[i] - proj[i]));
    CHECK(w2 < 1e-5);

    // projections: idempotence and orthogonality
    double werr = 0.0;
    for (size_t i = 0; i <= n; ++i) werr = std::max(werr, std::abs(proj[i] - f[i]));
    CHECK(werr < 1e-8);
    Eigenfunction0 psi2(cfg, sp.lambda(2));
    auto cross = projection0(cfg, psi2, f);
    double wc = 0.0;
    for (size_t i = 0; i <= n; ++i) wc = std::max(wc, std::abs(cross[i]));
    CHECK(wc < 1e-8);

    CHECK_THROWS_AS(resolvent0(cfg, sp.lambda(1) + 1e-13, f), numeric_error);
}

TEST_CASE("parseval from below on a smooth function") {
    L0Config cfg{1.0, 0.7};
    auto sp = l0_real_zeros(cfg, -25, 25);
    const size_t n = 4400;
    std::vector<cplx> f(n + 1);
    double nrm2 = 0.0;
    for (size_t i = 0; i <= n; ++i) {
        double x = cfg.l * double(i) / double(n);
        f[i] = x * (1.0 - x) * std::exp(x);
    }
    {
        std::vector<cplx> m(n + 1);
        for (size_t i = 0; i <= n; ++i) m[i] = std::norm(f[i]);
        nrm2 = op_l0::detail::simpson(m, cfg.l).real();
    }
    double acc = 0.0, prev = 0.0;
    for (int k = -25; k <= 25; ++k) {
        Eigenfunction0 psi(cfg, sp.lambda(k));
        std::vector<cplx> prod(n + 1);
        for (size_t i = 0; i <= n; ++i) {
            double x = cfg.l * double(i) / double(n);
            prod[i] = f[i] * std::conj(psi(x));
        }
        cplx coef = op_l0::detail::simpson(prod, cfg.l);
        prev = acc;
        acc += std::norm(coef);
        CHECK(acc <= nrm2 * (1.0 + 1e-6));
    }
    CHECK(acc > prev);            // monotone from below
    CHECK(acc > 0.98 * nrm2);     // defect <= 2% at |n| <= 25
}
