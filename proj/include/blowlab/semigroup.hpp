#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blowlab/hermite.hpp"

namespace blowlab {

// Heat semigroup of L_eta via its Gaussian (Mehler-type) kernel,
//   (e^{tau L} g)(y) = int K(y,x) g(x) dx,
//   K(y,x) = (4 pi eta (1-e^{-tau}))^{-1/2} exp(-(y e^{-tau/2} - x)^2 / (4 eta (1-e^{-tau}))),
// normalized so constants are fixed. Substituting
//   x = y e^{-tau/2} + 2 sqrt(eta (1-e^{-tau})) u
// reduces the convolution to a standard Gauss-Hermite sum, exact for
// polynomial inputs within the rule's degree. Eigen-decay:
//   e^{tau L} h_n^{(eta)} = e^{-n tau / 2} h_n^{(eta)}.
class Semigroup {
  public:
    Semigroup(double eta, int quad_order = 48) : eta_(eta) {
        if (!(eta > 0.0)) throw std::invalid_argument("Semigroup: eta must be > 0");
        gauss_hermite_raw(quad_order, x_, w_);
        const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
        for (auto& wi : w_) wi *= inv_sqrt_pi;
    }

    double apply(const std::function<double(double)>& g, double tau, double y) const {
        if (!(tau > 0.0)) throw std::domain_error("Semigroup: tau must be > 0");
        const double decay = std::exp(-0.5 * tau);
        const double spread = 2.0 * std::sqrt(eta_ * (1.0 - std::exp(-tau)));
        double acc = 0.0;
        for (size_t i = 0; i < x_.size(); ++i) acc += w_[i] * g(y * decay + spread * x_[i]);
        return acc;
    }

    std::vector<double> apply(const std::function<double(double)>& g, double tau,
                              const std::vector<double>& ys) const {
        std::vector<double> out(ys.size());
        for (size_t i = 0; i < ys.size(); ++i) out[i] = apply(g, tau, ys[i]);
        return out;
    }

    double eta() const { return eta_; }

  private:
    double eta_;
    std::vector<double> x_, w_;
};

inline std::vector<double> semigroup_apply(const std::function<double(double)>& g, double tau,
                                           double eta, const std::vector<double>& ys) {
    return Semigroup(eta).apply(g, tau, ys);
}

}  // namespace blowlab
