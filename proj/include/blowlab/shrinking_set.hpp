#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace blowlab {

// Time-indexed trap bounds for every coordinate of the decomposition. The
// null mode carries a ln s factor and the two growing modes get the tightest
// bound; everything else decays polynomially with order-dependent powers.
struct ShrinkingSetConfig {
    double A = 2.5;
    double K0 = 2.0;
    int M = 14;

    void validate() const {
        if (!(A >= 1.0)) throw std::invalid_argument("ShrinkingSetConfig: A >= 1");
        if (!(K0 > 0.0)) throw std::invalid_argument("ShrinkingSetConfig: K0 > 0");
        if (M < 4 || M % 2 != 0)
            throw std::invalid_argument("ShrinkingSetConfig: M even and >= 4");
    }

    double outer_bound(double s) const { return std::pow(A, M + 2) / std::sqrt(s); }
    double remainder_bound(double s) const {
        return std::pow(A, M + 1) * std::pow(s, -0.5 * (M + 2));
    }
    double gradient_remainder_bound(double s) const {
        return std::pow(A, M + 2) * std::pow(s, -0.5 * (M + 2));
    }
    double theta_bound(int j, double s) const {
        if (j <= 1) return A / (s * s);
        if (j == 2) return std::pow(A, 4) * std::log(s) / (s * s);
        return std::pow(A, j) * std::pow(s, -0.5 * (j + 1));
    }
    double theta_tilde_bound(int j, double s) const {
        if (j <= 2) return A * A / (s * s);
        return std::pow(A, j) * std::pow(s, -0.5 * (j + 1));
    }
};

}  // namespace blowlab
