#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cubicstring/gtrig.hpp"
#include "cubicstring/numerics/differentiate.hpp"
#include "cubicstring/numerics/expint.hpp"
#include "cubicstring/numerics/ode.hpp"
#include "cubicstring/numerics/products.hpp"
#include "cubicstring/numerics/quadrature.hpp"
#include "cubicstring/numerics/roots.hpp"

using namespace cubicstring;
using namespace cubicstring::numerics;

TEST_CASE("integrator reproduces s_p for y''' = y") {
    // c == 1, init (1,0,0) -> s_0(x)
    auto tr = integrate_to([](double) { return cplx(1.0); }, {1.0, 0.0, 0.0}, 1.0);
    CHECK(std::abs(tr[0] - gtrig::s_eval(0, 1.0)) < 1e-10 * std::abs(tr[0]));

    // c == 0, init (0,1,0) -> y(x) = x
    auto lin = integrate_to([](double) { return cplx(0.0); }, {0.0, 1.0, 0.0}, 0.7);
    CHECK(std::abs(lin[0] - 0.7) < 1e-12);

    // c = -i lambda^3, lambda = 2, init (0,0,1) -> s_2(2ix)/(2i)^2
    cplx lam = 2.0;
    cplx c = -1.0i * lam * lam * lam;
    auto s2 = integrate_to([c](double) { return c; }, {0.0, 0.0, 1.0}, 1.0);
    CHECK(std::abs(s2[0] - gtrig::s_eval_scaled(2, lam, 1.0)) < 1e-9 * std::abs(s2[0]));
}

TEST_CASE("integrator order: tighter tolerance shrinks endpoint error") {
    auto run = [&](double rel) {
        OdeTolerance t;
        t.rel = rel;
        t.abs = rel * 1e-2;
        t.max_step = 0.5;  // let the tolerance, not the step cap, bind
        auto v = integrate_to([](double) { return cplx(1.0); }, {1.0, 0.0, 0.0}, 1.0, t);
        return std::abs(v[0] - gtrig::s_eval(0, 1.0));
    };
    double e1 = run(1e-6), e2 = run(1e-9);
    CHECK(e2 < 0.05 * e1);
}

TEST_CASE("wronskian of the fundamental triple stays 1") {
    // c(x) = -i(lambda^3 - q), cosine q
    cplx lam = 1.9;
    auto q = [](double x) { return 0.3 * std::cos(2.0 * M_PI * x); };
    auto c = [&](double x) { return -1.0i * (lam * lam * lam - q(x)); };
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
    std::array<numerics::Trajectory, 3> t;
    for (int p = 0; p < 3; ++p) {
        std::array<cplx, 3> init{0.0, 0.0, 0.0};
        init[size_t(p)] = 1.0;
        t[size_t(p)] = integrate_third_order(c, init, grid);
    }
    for (size_t i = 0; i < grid.size(); ++i) {
        cplx det = t[0].y[i] * (t[1].dy[i] * t[2].d2y[i] - t[2].dy[i] * t[1].d2y[i]) -
                   t[1].y[i] * (t[0].dy[i] * t[2].d2y[i] - t[2].dy[i] * t[0].d2y[i]) +
                   t[2].y[i] * (t[0].dy[i] * t[1].d2y[i] - t[1].dy[i] * t[0].d2y[i]);
        CHECK(std::abs(det - 1.0) < 1e-9);
    }
}

TEST_CASE("find_bracketed_root") {
    CHECK(std::abs(find_bracketed_root([](double x) { return std::cos(x); }, 1.0, 2.0) - M_PI / 2) < 1e-14);
    CHECK(std::abs(find_bracketed_root([](double x) { return x * x * x - 2.0; }, 1.0, 2.0) -
                   std::cbrt(2.0)) < 1e-14);
    CHECK_THROWS_AS(find_bracketed_root([](double x) { return 1.0 + x * x; }, 0.0, 1.0), numeric_error);
}

TEST_CASE("quad_adaptive") {
    CHECK(std::abs(quad_adaptive([](double) { return cplx(1.0); }, 0.0, 1.0) - 1.0) < 1e-13);

    // oscillatory product vs 40-panel composite Simpson oracle
    auto f = [](double x) { return gtrig::s_eval(1, cplx(0, x)) * gtrig::s_eval(2, cplx(0, -x)); };
    cplx oracle = 0.0;
    const int n = 160;
    for (int i = 0; i < n; i += 2) {
        double a = double(i) / n, m = double(i + 1) / n, b = double(i + 2) / n;
        oracle += (f(a) + 4.0 * f(m) + f(b)) / (3.0 * n);
    }
    CHECK(std::abs(quad_adaptive(f, 0.0, 1.0) - oracle) < 1e-10);

    // integrable endpoint singularity x^{-1/2}
    cplx v = quad_adaptive([](double x) { return cplx(1.0 / std::sqrt(x)); }, 1e-12, 1.0, 1e-9);
    CHECK(std::abs(v - 2.0) < 1e-5);
}

TEST_CASE("principal value quadrature") {
    CHECK(std::abs(quad_principal_value([](double) { return cplx(1.0); }, 0.0, 2.0, 1.0)) < 1e-12);
    CHECK(std::abs(quad_principal_value([](double t) { return cplx(t); }, 0.0, 2.0, 1.0) - 2.0) < 1e-12);

    // epsilon-excision oracle on a smooth f
    auto f = [](double t) { return cplx(std::exp(0.3 * t) * std::cos(t), 0.2 * t); };
    double t0 = 0.8, a = 0.0, b = 2.0;
    auto pv_excise = [&](double eps) {
        return quad_adaptive([&](double t) { return f(t) / (t - t0); }, a, t0 - eps, 1e-12) +
               quad_adaptive([&](double t) { return f(t) / (t - t0); }, t0 + eps, b, 1e-12);
    };
    // Richardson in eps (linear in eps cancels as excision is symmetric; halve twice)
    cplx p1 = pv_excise(1e-4), p2 = pv_excise(5e-5);
    cplx oracle = 2.0 * p2 - p1;
    cplx mine = quad_principal_value(f, a, b, t0);
    CHECK(std::abs(mine - oracle) < 1e-8);

    CHECK_THROWS_AS(quad_principal_value(f, 0.0, 2.0, 2.5), invalid_input);

    // antisymmetry under mirroring f(tau) -> f(2t - tau)
    auto g = [&](double t) { return f(2.0 * t0 - t); };
    cplx left = quad_principal_value(f, t0 - 0.6, t0 + 0.6, t0);
    cplx right = quad_principal_value(g, t0 - 0.6, t0 + 0.6, t0);
    CHECK(std::abs(left + right) < 1e-10);
}

TEST_CASE("truncated products") {
    std::map<int, cplx> zeros;
    for (int n = 1; n <= 40; ++n) {
        zeros[n] = 2.0 * M_PI * n;
        zeros[-n] = -2.0 * M_PI * n;
    }
    CHECK(truncated_product(zeros, 0.0, 2.0 * M_PI).value == cplx(1.0));
    CHECK(std::abs(truncated_product(zeros, zeros[3], 2.0 * M_PI).value) == 0.0);
    std::map<int, cplx> bad = {{0, 0.0}};
    CHECK_THROWS_AS(truncated_product(bad, 1.0, 1.0), invalid_input);
}

TEST_CASE("differentiate_smooth") {
    const int n = 50;
    std::vector<double> grid(n), f(n), g(n);
    for (int i = 0; i < n; ++i) {
        grid[size_t(i)] = double(i) / (n - 1);
        f[size_t(i)] = grid[size_t(i)] * grid[size_t(i)];
        g[size_t(i)] = 0.3 * std::sin(2.0 * M_PI * grid[size_t(i)]) / (2.0 * M_PI);
    }
    auto df = differentiate_smooth(f, grid);
    for (int i = 0; i < n; ++i) CHECK(std::abs(df[size_t(i)] - 2.0 * grid[size_t(i)]) < 1e-6);
    auto dg = differentiate_smooth(g, grid);
    for (int i = 3; i < n - 3; ++i)
        CHECK(std::abs(dg[size_t(i)] - 0.3 * std::cos(2.0 * M_PI * grid[size_t(i)])) < 1e-4);

    // noise amplification stays bounded by the documented factor ~ 3/h * noise
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> noise(-1e-6, 1e-6);
    auto fn = f;
    for (auto& v : fn) v += noise(rng);
    auto dfn = differentiate_smooth(fn, grid);
    double h = grid[1] - grid[0];
    for (int i = 3; i < n - 3; ++i)
        CHECK(std::abs(dfn[size_t(i)] - 2.0 * grid[size_t(i)]) < 1e-6 + 3.0 * 1e-6 / h);

    CHECK_THROWS_AS(differentiate_smooth({1, 2, 3}, {0, 1, 2}), invalid_input);
}

TEST_CASE("complex exponential integral") {
    // E1(1) = 0.21938393439552027
    CHECK(std::abs(expint_e1(1.0) - 0.21938393439552027) < 1e-14);
    // compare small-|z| series and CF on the crossover circle against quadrature
    for (double ang : {-1.2, 0.3, 1.4}) {
        cplx z = std::polar(2.0, ang);
        // E1(z) = int_0^1 exp(-z/u)/u du  (u = z/s substitution, path-free for Re z > 0)
        cplx ref = quad_adaptive([&](double u) { return std::exp(-z / u) / u; }, 1e-6, 1.0, 1e-12);
        CHECK(std::abs(expint_e1(z) - ref) < 1e-9);
    }
    // oscillatory tail: int_T^inf e^{iat}/(t-b) dt vs brute segment + smaller tail
    double a = 0.9, T = 30.0;
    cplx b = 2.0 - 5.0i;
    cplx brute = quad_adaptive([&](double t) { return std::exp(1.0i * a * t) / (t - b); }, T, 400.0, 1e-11);
    brute += oscillatory_tail(a, b, 400.0);
    CHECK(std::abs(oscillatory_tail(a, b, T) - brute) < 1e-8);
}
