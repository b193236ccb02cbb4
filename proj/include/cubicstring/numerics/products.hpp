#pragma once

// Truncated Hadamard-type products over indexed real zero families:
//   prod_{|n| <= N} (1 - lambda^3 / lambda_n^3),
// with n and -n factors multiplied in pairs to accelerate convergence.  The
// reported tail bound uses the asymptotic zero spacing 2*pi/l.

#include <map>
#include <vector>

#include "cubicstring/complex_util.hpp"

namespace cubicstring::numerics {

struct ProductResult {
    cplx value;
    double tail_bound;  // estimate of |log| of the dropped tail
};

// zeros: map from index n to lambda_n (nonzero reals or complex).  Indices
// beyond the stored window contribute to the tail estimate only.
inline ProductResult truncated_product(const std::map<int, cplx>& zeros, cplx lambda,
                                       double spacing) {
    const cplx l3 = lambda * lambda * lambda;
    cplx prod = 1.0;
    int nmax = 0;
    // pair n with -n where both exist
    for (auto& [n, zn] : zeros) {
        if (zn == 0.0) throw invalid_input("truncated_product: zero entry lambda_n = 0");
        if (n < 0 && zeros.count(-n)) continue;  // handled with its partner
        cplx f = 1.0 - l3 / (zn * zn * zn);
        if (n > 0 && zeros.count(-n)) {
            cplx zm = zeros.at(-n);
            f *= 1.0 - l3 / (zm * zm * zm);
        }
        prod *= f;
        nmax = std::max(nmax, std::abs(n));
    }
    double tail = 0.0;
    if (nmax > 0 && spacing > 0.0) {
        // |sum_{|n|>N} lambda^3/lambda_n^3| ~ 2 |lambda|^3 / (spacing^3) * sum_{n>N} n^-3
        double N = double(nmax);
        tail = 2.0 * std::pow(std::abs(lambda) / spacing, 3.0) / (2.0 * N * N);
    }
    return {prod, tail};
}

inline ProductResult truncated_product(const std::vector<cplx>& zeros, cplx lambda,
                                       double spacing = 0.0) {
    std::map<int, cplx> m;
    int i = 1;
    for (auto z : zeros) m[i++] = z;
    return truncated_product(m, lambda, spacing);
}

}  // namespace cubicstring::numerics
