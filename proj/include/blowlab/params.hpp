#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace blowlab {

// Model parameters for the coupled system
//   u_t = Laplacian(u) + e^{p v},   v_t = mu Laplacian(v) + e^{q u}.
// The derived constant b = 1/(2(mu+1)) controls the profile curvature and is
// always recomputed from mu, never cached.
struct Params {
    double p = 1.0;
    double q = 1.0;
    double mu = 1.0;
    int dim = 1;  // spatial dimension N; the solvers support N = 1 only

    Params() = default;
    Params(double p_, double q_, double mu_, int dim_ = 1)
        : p(p_), q(q_), mu(mu_), dim(dim_) {
        validate();
    }

    void validate() const {
        if (!(p > 0.0) || !(q > 0.0) || !(mu > 0.0))
            throw std::invalid_argument("Params: p, q, mu must be positive");
        if (dim < 1)
            throw std::invalid_argument("Params: dim must be >= 1");
    }

    double b() const { return 1.0 / (2.0 * (mu + 1.0)); }
};

// Blowup time T and the matching similarity time s = -ln(T - t).
struct SimilarityFrame {
    double T = 1.0;

    double s_of_t(double t) const {
        if (!(t < T)) throw std::domain_error("SimilarityFrame: t must be < T");
        return -std::log(T - t);
    }
    double t_of_s(double s) const { return T - std::exp(-s); }
};

struct ProfileValue {
    double phi = 0.0;
    double psi = 0.0;
};

}  // namespace blowlab
