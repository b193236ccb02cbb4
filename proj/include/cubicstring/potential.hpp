#pragma once

// Real potential q on [0, l] with its accumulated modulus
// sigma(x) = int_0^x |q|.  Callable or sampled (cubic-interpolated) backends;
// a few builtin families used across the test corpus and the CLI.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring {

class Potential {
  public:
    Potential() : l_(1.0), q_([](double) { return 0.0; }) { build_sigma(); }

    Potential(double l, std::function<double(double)> q) : l_(l), q_(std::move(q)) {
        if (!(l_ > 0)) throw invalid_input("Potential: l must be positive");
        build_sigma();
    }

    // sampled potential on a uniform grid, piecewise-cubic (Catmull-Rom)
    static Potential from_samples(double l, const std::vector<double>& samples) {
        if (samples.size() < 4) throw invalid_input("Potential: need >= 4 samples");
        auto v = std::make_shared<std::vector<double>>(samples);
        return Potential(l, [v, l](double x) {
            const auto& s = *v;
            const size_t n = s.size();
            double u = std::clamp(x / l, 0.0, 1.0) * double(n - 1);
            size_t i = std::min(size_t(u), n - 2);
            double t = u - double(i);
            double p0 = s[i == 0 ? 0 : i - 1], p1 = s[i], p2 = s[i + 1],
                   p3 = s[i + 2 < n ? i + 2 : n - 1];
            double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
            double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
            double c = -0.5 * p0 + 0.5 * p2;
            return ((a * t + b) * t + c) * t + p1;
        });
    }

    double l() const { return l_; }
    double q(double x) const { return q_(x); }
    double operator()(double x) const { return q_(x); }

    // sigma(x) = int_0^x |q|, nondecreasing with sigma(0) = 0
    double sigma(double x) const {
        x = std::clamp(x, 0.0, l_);
        double u = x / l_ * double(sigma_.size() - 1);
        size_t i = std::min(size_t(u), sigma_.size() - 2);
        double t = u - double(i);
        return (1.0 - t) * sigma_[i] + t * sigma_[i + 1];
    }

  private:
    void build_sigma() {
        const int n = 2048;
        sigma_.assign(n + 1, 0.0);
        const double h = l_ / n;
        for (int i = 1; i <= n; ++i) {
            double a = (i - 1) * h, b = i * h;
            // Simpson on |q|
            sigma_[i] = sigma_[i - 1] + h / 6.0 * (std::abs(q_(a)) + 4.0 * std::abs(q_(0.5 * (a + b))) +
                                                   std::abs(q_(b)));
        }
    }

    double l_;
    std::function<double(double)> q_;
    std::vector<double> sigma_;
};

namespace potentials {

inline Potential zero(double l = 1.0) {
    return Potential(l, [](double) { return 0.0; });
}

inline Potential cosine(double l = 1.0, double amplitude = 0.3, int k = 1) {
    return Potential(l, [=](double x) { return amplitude * std::cos(2.0 * M_PI * k * x / l); });
}

inline Potential gaussian_bump(double l = 1.0, double amplitude = 0.5, double center = 0.5,
                               double width = 0.12) {
    return Potential(l, [=](double x) {
        double u = (x - center * l) / (width * l);
        return amplitude * std::exp(-u * u);
    });
}

inline Potential step(double l = 1.0, double amplitude = 0.4, double edge = 0.5) {
    return Potential(l, [=](double x) { return x < edge * l ? 0.0 : amplitude; });
}

// "name:params" parser used by the CLI: zero | cos:a,k | gauss:a,c,w | step:a,e
inline Potential builtin(const std::string& desc, double l) {
    auto colon = desc.find(':');
    std::string name = desc.substr(0, colon);
    std::vector<double> p;
    if (colon != std::string::npos) {
        std::string rest = desc.substr(colon + 1);
        size_t pos = 0;
        while (pos < rest.size()) {
            size_t comma = rest.find(',', pos);
            p.push_back(std::stod(rest.substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    auto arg = [&](size_t i, double def) { return i < p.size() ? p[i] : def; };
    if (name == "zero") return zero(l);
    if (name == "cos" || name == "cosine") return cosine(l, arg(0, 0.3), int(arg(1, 1)));
    if (name == "gauss" || name == "gaussian") return gaussian_bump(l, arg(0, 0.5), arg(1, 0.5), arg(2, 0.12));
    if (name == "step") return step(l, arg(0, 0.4), arg(1, 0.5));
    throw invalid_input("unknown builtin potential '" + name + "'");
}

}  // namespace potentials
}  // namespace cubicstring
