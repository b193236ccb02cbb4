#pragma once

// Canonical function of the ray-i l_{zeta1} jump.  The raw boundary datum
//   d(it, x) = -zeta2 e^{i sqrt3 t x} B1*(i t zeta2)/B1*(i t zeta3)
// carries the elementary factor zeta2 e^{sqrt3 lambda x} whose phase grows
// linearly along the ray; a Cauchy-integral canonical solution of the full
// datum would diverge.  The implementation therefore factorizes
//   d = zeta2 e^{sqrt3 lambda x} * dhat,   dhat(it) = -B1*(it zeta2)/B1*(it zeta3),
// where dhat -> 1 at infinity (log-integrable, x-independent), and builds
//   chihat(lambda) = exp{ (1/(2 pi i)) int_0^inf ln dhat(i tau) / (tau + i lambda) dtau }.
// The elementary factor stays explicit in the jump kernels.  ln dhat is
// unwrapped continuously with the branch pinned to 0 at infinity; the value
// at tau = 0+ is then i pi/3.

#include <vector>

#include "cubicstring/bvp/efuncs.hpp"
#include "cubicstring/numerics/expint.hpp"

namespace cubicstring::bvp {

struct ChiConfig {
    double t_max = 130.0;     // grid cutoff for ln dhat
    double fine_to = 4.0;     // fine-grid region near the origin
    double h_fine = 0.003;
    double h_mid = 0.02;      // up to mid_to
    double mid_to = 40.0;
    double h_far = 0.1;
};

class CanonicalChi {
  public:
    using Config = ChiConfig;

    CanonicalChi(const SCoeffs& sc, double l, const ChiConfig& cfg = {})
        : CanonicalChi([sc](double t) { return dhat(sc, t); }, cfg) {
        (void)l;
    }

    // synthetic datum (tests, alternative factorizations)
    explicit CanonicalChi(const std::function<cplx(double)>& datum, const ChiConfig& cfg = {}) {
        build_grid(cfg);
        lnd_.resize(tau_.size());
        cplx prev = std::log(datum(tau_.front()));
        for (size_t i = 0; i < tau_.size(); ++i) {
            cplx d = datum(tau_[i]);
            cplx ln = std::log(d);
            double k = std::round((prev.imag() - ln.imag()) / (2.0 * M_PI));
            ln += cplx(0, 2.0 * M_PI * k);
            lnd_[i] = ln;
            prev = ln;
        }
        // pin the branch at infinity: ln dhat -> 0
        double shift = 2.0 * M_PI * std::round(lnd_.back().imag() / (2.0 * M_PI));
        if (shift != 0.0)
            for (auto& v : lnd_) v -= cplx(0, shift);
        // algebraic tail coefficient: ln dhat ~ c2 / tau^2
        tail_c2_ = lnd_.back() * tau_.back() * tau_.back();
    }

    static cplx dhat(const SCoeffs& sc, double t) {
        return -sc.Bstar(1, cplx(0, t) * kZeta2) / sc.Bstar(1, cplx(0, t) * kZeta3);
    }

    // chihat at lambda off the positive imaginary axis
    cplx operator()(cplx lambda) const {
        const cplx b = cplx(0, 1) * lambda;
        cplx acc = 0.0;
        for (size_t i = 0; i + 1 < tau_.size(); ++i) {
            acc += 0.5 * (lnd_[i] / (tau_[i] + b) + lnd_[i + 1] / (tau_[i + 1] + b)) *
                   (tau_[i + 1] - tau_[i]);
        }
        acc += tail_integral(b);
        return std::exp(acc / (2.0 * M_PI * cplx(0, 1)));
    }

    // boundary values on the ray: side +1 approaches from Omega2 (arg > pi/2),
    // side -1 from Omega3.  chi_+ / chi_- = dhat(it).
    // PV by singularity subtraction; the panel containing t is integrated
    // exactly with the density taken linear there, which keeps the node
    // ratios finite however close t sits to a grid node.
    cplx boundary(double t, int side) const {
        if (!(t > tau_.front() && t < tau_.back() - 1.0))
            throw invalid_input("CanonicalChi::boundary: t outside the stored ray grid");
        size_t hi = size_t(std::upper_bound(tau_.begin(), tau_.end(), t) - tau_.begin());
        if (hi == 0) hi = 1;
        if (hi >= tau_.size()) hi = tau_.size() - 1;
        const size_t lo = hi - 1;
        const cplx slope = (lnd_[hi] - lnd_[lo]) / (tau_[hi] - tau_[lo]);
        const cplx ld = lnd_[lo] + slope * (t - tau_[lo]);
        cplx pv = slope * (tau_[hi] - tau_[lo]);  // exact PV over the containing panel
        for (size_t i = 0; i + 1 < tau_.size(); ++i) {
            if (i == lo) continue;
            cplx f0 = (lnd_[i] - ld) / (tau_[i] - t);
            cplx f1 = (lnd_[i + 1] - ld) / (tau_[i + 1] - t);
            pv += 0.5 * (f0 + f1) * (tau_[i + 1] - tau_[i]);
        }
        pv += ld * std::log((tau_.back() - t) / t);
        pv += tail_integral(cplx(-t, 0.0));
        return std::exp(pv / (2.0 * M_PI * cplx(0, 1)) + 0.5 * double(side) * ld);
    }

    cplx lnd_at(double t) const {
        if (t <= tau_.front()) return lnd_.front();
        if (t >= tau_.back()) return tail_c2_ / (t * t);
        size_t lo = size_t(std::lower_bound(tau_.begin(), tau_.end(), t) - tau_.begin());
        if (lo == 0) lo = 1;
        double w = (t - tau_[lo - 1]) / (tau_[lo] - tau_[lo - 1]);
        return (1.0 - w) * lnd_[lo - 1] + w * lnd_[lo];
    }

    const std::vector<double>& grid() const { return tau_; }
    const std::vector<cplx>& lnd() const { return lnd_; }

  private:
    void build_grid(const ChiConfig& cfg) {
        double t = 1e-6;
        while (t < cfg.fine_to) { tau_.push_back(t); t += cfg.h_fine; }
        while (t < cfg.mid_to) { tau_.push_back(t); t += cfg.h_mid; }
        while (t <= cfg.t_max) { tau_.push_back(t); t += cfg.h_far; }
    }

    // int_T^inf (c2/tau^2)/(tau + b) dtau = c2 (1/T - ln(1 + b/T)/b)/b
    cplx tail_integral(cplx b) const {
        double T = tau_.back();
        if (std::abs(b) < 1e-8) return tail_c2_ * 0.5 / (T * T);
        return tail_c2_ * (1.0 / T - std::log(1.0 + b / T) / b) / b;
    }

    std::vector<double> tau_;
    std::vector<cplx> lnd_;
    cplx tail_c2_ = 0.0;
};

}  // namespace cubicstring::bvp
