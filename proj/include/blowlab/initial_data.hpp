#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/eigensystem.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/params.hpp"
#include "blowlab/profiles.hpp"

namespace blowlab {

// Smooth cutoff: 1 on [0,1], exp(1 - 1/(1-(r-1)^2)) decay on (1,2), 0 beyond.
inline double cutoff(double r) {
    r = std::fabs(r);
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double u = r - 1.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

// chi(y, s): equals 1 inside |y| <= K0 sqrt(s), vanishes beyond 2 K0 sqrt(s).
inline double blowup_cutoff(double y, double s, double K0) {
    return cutoff(std::fabs(y) / (K0 * std::sqrt(s)));
}

// Far-field seed pair: a log singular core matched to the flat-ODE constants,
//   qu*(x) = ln(4(mu+1)|ln|x|| / (p|x|^2))             for |x| <= 1/2,
//   qu*(x) = -ln(1 + a |x|^2)                          for |x| >= 1,
// bridged by a C^1 cubic Hermite blend in between. Returns the pair
// (q u*, p v*), i.e. the logs of the two exponentiated components.
struct FarFieldData {
    Params pr;
    double a = 1.0;

    static constexpr double kCoreEdge = 0.5;

    double qu(double x) const { return branch(std::fabs(x), pr.p); }
    double pv(double x) const { return branch(std::fabs(x), pr.q); }

  private:
    double core(double ax, double expo) const {
        if (!(ax > 0.0) || !(ax < 1.0))
            throw std::domain_error("FarFieldData: log branch needs 0 < |x| < 1");
        return std::log(4.0 * (pr.mu + 1.0) * std::fabs(std::log(ax)) / (expo * ax * ax));
    }
    double far(double ax) const { return -std::log(1.0 + a * ax * ax); }

    double branch(double ax, double expo) const {
        if (ax <= kCoreEdge) return core(ax, expo);
        if (ax >= 1.0) return far(ax);
        // C^1 Hermite bridge on (1/2, 1)
        const double t = (ax - kCoreEdge) / (1.0 - kCoreEdge);
        const double h = 1e-6;
        const double f0 = core(kCoreEdge, expo), f1 = far(1.0);
        const double d0 = (core(kCoreEdge + h, expo) - core(kCoreEdge - h, expo)) / (2 * h) *
                          (1.0 - kCoreEdge);
        const double d1 = (far(1.0 + h) - far(1.0 - h)) / (2 * h) * (1.0 - kCoreEdge);
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 +
               (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * d1;
    }
};

// Similarity-variable value of the far-field pair: Phi = e^{-s} e^{qu*(x)}
// with x = y e^{-s/2}. This is also the Dirichlet value the solver holds at
// the outer edge of the computational box.
inline ProfileValue outer_similarity_value(double y, double s, const Params& pr,
                                           const FarFieldData& far) {
    const double x = std::fabs(y) * std::exp(-0.5 * s);
    if (!(x > 0.0)) throw std::domain_error("outer_similarity_value: y = 0 has no far field");
    const double es = std::exp(-s);
    return {es * std::exp(far.qu(x)), es * std::exp(far.pv(x))};
}

// Tunable two-parameter family of prepared data. The (d0, d1) bump excites
// the two growing modes; everything else starts essentially on the corrected
// profile inside the blowup region and on the far-field pair outside.
struct InitialDataSpec {
    double d0 = 0.0, d1 = 0.0;
    double A = 2.5;
    double s0 = 20.0;
    double K0 = 2.0;
    double eps0 = 0.1;
    double a = 1.0;  // far-field decay parameter
    // rescale the bump so the measured growing-mode coordinates at s0 are
    // exactly A d_i / s0^2 (the narrow cutoff otherwise attenuates them at
    // desk-scale s0)
    bool normalize_gain = true;

    void validate() const {
        if (!(A >= 1.0)) throw std::invalid_argument("InitialDataSpec: A >= 1 required");
        if (!(K0 >= 1.0)) throw std::invalid_argument("InitialDataSpec: K0 >= 1 required");
        if (!(2.0 * K0 * std::sqrt(s0) < s0))
            throw std::invalid_argument(
                "InitialDataSpec: cutoff supports unordered, need 2 K0 sqrt(s0) < s0");
    }
};

// Pointwise evaluators for the prepared pair in similarity variables at s0.
struct InitialData {
    std::function<double(double)> Phi, Psi;
    double gain0 = 1.0, gain1 = 1.0;  // measured bump-to-mode gains
};

inline InitialData make_initial_data(const InitialDataSpec& spec, const Params& pr,
                                     const EigenSystem& sys, const HermiteBasis& basis1,
                                     const HermiteBasis& basis_mu) {
    spec.validate();
    const double s0 = spec.s0, A = spec.A, K0 = spec.K0;
    const FarFieldData far{pr, spec.a};

    // bump shape: (d0 f0 + d1 f1, d0 g0 + d1 g1) (A/s0^2) chi(16 y, s0)
    auto bump_pair = [=](double d0, double d1) {
        auto chi16 = [=](double y) { return cutoff(16.0 * std::fabs(y) / (K0 * std::sqrt(s0))); };
        auto f = [=](double y) { return (d0 * pr.q + d1 * pr.q * y) * (A / (s0 * s0)) * chi16(y); };
        auto g = [=](double y) { return (d0 * pr.p + d1 * pr.p * y) * (A / (s0 * s0)) * chi16(y); };
        return std::pair{std::function<double(double)>(f), std::function<double(double)>(g)};
    };

    double gain0 = 1.0, gain1 = 1.0;
    if (spec.normalize_gain) {
        auto [f0, g0] = bump_pair(1.0, 0.0);
        auto md0 = project_modes(f0, g0, sys, basis1, basis_mu);
        gain0 = md0.theta[0] / (A / (s0 * s0));
        auto [f1, g1] = bump_pair(0.0, 1.0);
        auto md1 = project_modes(f1, g1, sys, basis1, basis_mu);
        gain1 = md1.theta[1] / (A / (s0 * s0));
        if (!(gain0 > 0.0) || !(gain1 > 0.0))
            throw std::runtime_error("make_initial_data: degenerate bump gain");
    }

    auto [bf, bg] = bump_pair(spec.d0 / gain0, spec.d1 / gain1);
    auto bump_f = bf;
    auto bump_g = bg;

    auto phi_fun = [=](double y) {
        const double inner = approx_profile(y, s0, pr).phi + bump_f(y);
        const double chi1 = cutoff(std::fabs(y) / s0);
        if (chi1 >= 1.0) {
            if (!(inner > 0.0))
                throw std::runtime_error("initial data: nonpositive log argument at y = " +
                                         std::to_string(y));
            return inner;
        }
        const double outer = outer_similarity_value(y, s0, pr, far).phi;
        if (chi1 <= 0.0) return outer;
        if (!(inner > 0.0))
            throw std::runtime_error("initial data: nonpositive log argument at y = " +
                                     std::to_string(y));
        // the data is prescribed in log space, so blend geometrically
        return std::pow(inner, chi1) * std::pow(outer, 1.0 - chi1);
    };
    auto psi_fun = [=](double y) {
        const double inner = approx_profile(y, s0, pr).psi + bump_g(y);
        const double chi1 = cutoff(std::fabs(y) / s0);
        if (chi1 >= 1.0) {
            if (!(inner > 0.0))
                throw std::runtime_error("initial data: nonpositive log argument at y = " +
                                         std::to_string(y));
            return inner;
        }
        const double outer = outer_similarity_value(y, s0, pr, far).psi;
        if (chi1 <= 0.0) return outer;
        if (!(inner > 0.0))
            throw std::runtime_error("initial data: nonpositive log argument at y = " +
                                     std::to_string(y));
        return std::pow(inner, chi1) * std::pow(outer, 1.0 - chi1);
    };

    return {phi_fun, psi_fun, gain0, gain1};
}

}  // namespace blowlab
