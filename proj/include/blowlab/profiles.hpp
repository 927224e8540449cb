#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "blowlab/params.hpp"

namespace blowlab {

// Self-similar blowup profile pair
//   p*Phi*(z) = q*Psi*(z) = (1 + b z^2)^{-1},  b = 1/(2(mu+1)).
inline ProfileValue profile_star(double z, const Params& pr) {
    const double w = 1.0 / (1.0 + pr.b() * z * z);
    return {w / pr.p, w / pr.q};
}

// d/dz and d2/dz2 of the common factor (1 + b z^2)^{-1}.
inline double star_factor(double z, double b) { return 1.0 / (1.0 + b * z * z); }
inline double star_factor_d1(double z, double b) {
    const double w = star_factor(z, b);
    return -2.0 * b * z * w * w;
}
inline double star_factor_d2(double z, double b) {
    const double w = star_factor(z, b);
    return (-2.0 * b + 6.0 * b * b * z * z) * w * w * w;
}

// Corrected approximate profile in similarity variables,
//   phi(y,s) = Phi*(y/sqrt(s)) + mu/(p(1+mu)s),
//   psi(y,s) = Psi*(y/sqrt(s)) + 1/(q(1+mu)s).
inline ProfileValue approx_profile(double y, double s, const Params& pr) {
    if (!(s > 0.0)) throw std::domain_error("approx_profile: s must be > 0");
    const double z = y / std::sqrt(s);
    const double w = star_factor(z, pr.b());
    const double cphi = pr.mu / (pr.p * (1.0 + pr.mu) * s);
    const double cpsi = 1.0 / (pr.q * (1.0 + pr.mu) * s);
    return {w / pr.p + cphi, w / pr.q + cpsi};
}

// Hand-differentiated derivatives of the approximate profile. Everything the
// residual needs is closed-form; no grid differencing enters here.
struct ProfileJet {
    double phi, psi;        // values
    double phi_y, psi_y;    // d/dy
    double phi_yy, psi_yy;  // d2/dy2
    double phi_s, psi_s;    // d/ds
};

inline ProfileJet profile_jet(double y, double s, const Params& pr) {
    if (!(s > 0.0)) throw std::domain_error("profile_jet: s must be > 0");
    const double b = pr.b();
    const double rs = std::sqrt(s);
    const double z = y / rs;
    const double w = star_factor(z, b);
    const double w1 = star_factor_d1(z, b);
    const double w2 = star_factor_d2(z, b);

    ProfileJet j{};
    const double cphi = pr.mu / (pr.p * (1.0 + pr.mu) * s);
    const double cpsi = 1.0 / (pr.q * (1.0 + pr.mu) * s);
    j.phi = w / pr.p + cphi;
    j.psi = w / pr.q + cpsi;
    j.phi_y = w1 / (pr.p * rs);
    j.psi_y = w1 / (pr.q * rs);
    j.phi_yy = w2 / (pr.p * s);
    j.psi_yy = w2 / (pr.q * s);
    // s-derivative: z depends on s through y/sqrt(s), plus the 1/s corrections
    const double z_s = -0.5 * z / s;
    j.phi_s = w1 * z_s / pr.p - cphi / s;
    j.psi_s = w1 * z_s / pr.q - cpsi / s;
    return j;
}

// Potential matrix of the linearization around (phi, psi):
//   V = [[q psi - 1, q(phi - 1/p)], [p(psi - 1/q), p phi - 1]].
inline std::array<std::array<double, 2>, 2> potential_matrix(double y, double s,
                                                             const Params& pr) {
    const ProfileValue ap = approx_profile(y, s, pr);
    return {{{pr.q * ap.psi - 1.0, pr.q * (ap.phi - 1.0 / pr.p)},
             {pr.p * (ap.psi - 1.0 / pr.q), pr.p * ap.phi - 1.0}}};
}

// Residual generated by the approximate profile when inserted into the
// similarity-variable system. Decays like C/s uniformly; s^2 R_i converges to
// an explicit quadratic in y at fixed y.
inline std::array<double, 2> residual_pair(double y, double s, const Params& pr) {
    const ProfileJet j = profile_jet(y, s, pr);
    const double r1 = -j.phi_s + j.phi_yy - 0.5 * y * j.phi_y - j.phi +
                      pr.q * j.phi * j.psi - j.phi_y * j.phi_y / j.phi;
    const double r2 = -j.psi_s + pr.mu * j.psi_yy - 0.5 * y * j.psi_y - j.psi +
                      pr.p * j.phi * j.psi - pr.mu * j.psi_y * j.psi_y / j.psi;
    return {r1, r2};
}

// Leading 1/s^2 coefficient of the residual: R_i(y,s) ~ R_{i,1}(y)/s^2 with
// R_{1,1} quadratic in y. Used as a regression target for residual_pair.
inline std::array<double, 2> residual_leading(double y, const Params& pr) {
    const double p = pr.p, q = pr.q, mu = pr.mu;
    const double om = 1.0 + mu;
    const double r1 = mu * (2.0 + mu) / (p * om * om) +
                      (1.0 - mu * mu) / (p * om * om * om) * y * y;
    const double r2 = (1.0 + 2.0 * mu) / (q * om * om) +
                      (mu * mu - 1.0) / (q * om * om * om) * y * y;
    return {r1, r2};
}

// Flat ODE system du/dtau = e^{p v}, dv/dtau = e^{q u} started from the
// profile value at the edge of the blowup region, solved in closed form:
//   u(tau) = -(1/q) ln[p(1 - tau + kappa)],  kappa = K0^2 / (32(mu+1)).
struct OdeHat {
    Params pr;
    double K0 = 1.0;

    double kappa() const { return K0 * K0 / (32.0 * (pr.mu + 1.0)); }
    // the logarithm turns singular here; callers building tau-grids need it
    double tau_singular() const { return 1.0 + kappa(); }

    double u(double tau) const {
        const double a = 1.0 - tau + kappa();
        if (!(a > 0.0)) throw std::domain_error("OdeHat: tau at/past singularity");
        return -std::log(pr.p * a) / pr.q;
    }
    double v(double tau) const {
        const double a = 1.0 - tau + kappa();
        if (!(a > 0.0)) throw std::domain_error("OdeHat: tau at/past singularity");
        return -std::log(pr.q * a) / pr.p;
    }
};

inline std::array<double, 2> ode_hat(double tau, double K0, const Params& pr) {
    const OdeHat h{pr, K0};
    return {h.u(tau), h.v(tau)};
}

enum class FinalProfileConvention {
    // constant 2b inside the logarithm, as stated with the profile theorem
    theorem,
    // constant 4(mu+1), the value produced by the t(x)-matching computation
    // and by the flat-ODE initial data; agrees with the scalar e^u case
    matched,
};

// Final (post-blowup) profile near the singular point, valid for 0 < |x| < 1:
//   u*(x) = (1/q) ln( c |ln|x|| / (p|x|^2) ),  c per convention above.
inline std::array<double, 2> final_profile(
    double x, const Params& pr,
    FinalProfileConvention conv = FinalProfileConvention::theorem) {
    const double ax = std::fabs(x);
    if (!(ax > 0.0) || !(ax < 1.0))
        throw std::domain_error("final_profile: need 0 < |x| < 1");
    const double c = (conv == FinalProfileConvention::theorem)
                         ? 2.0 * pr.b()
                         : 4.0 * (pr.mu + 1.0);
    const double lnx = -std::log(ax);  // |ln|x|| > 0 on (0,1)
    const double core = c * lnx / (ax * ax);
    return {std::log(core / pr.p) / pr.q, std::log(core / pr.q) / pr.p};
}

// Similarity change of variables and its exact algebraic inverse.
struct SimilarityPoint {
    double Phi, Psi, y, s;
};

struct PhysicalPoint {
    double u, v, x, t;
};

// The transform carries (p,q), so bundle them with the frame.
struct SimilarityMap {
    Params pr;
    SimilarityFrame fr;

    SimilarityPoint forward(double u, double v, double x, double t) const {
        if (!(t < fr.T)) throw std::domain_error("similarity: t must be < T");
        const double tau = fr.T - t;
        return {tau * std::exp(pr.q * u), tau * std::exp(pr.p * v),
                x / std::sqrt(tau), -std::log(tau)};
    }
    PhysicalPoint inverse(double Phi, double Psi, double y, double s) const {
        const double tau = std::exp(-s);
        return {(std::log(Phi) + s) / pr.q, (std::log(Psi) + s) / pr.p,
                y * std::sqrt(tau), fr.T - tau};
    }
};

}  // namespace blowlab
