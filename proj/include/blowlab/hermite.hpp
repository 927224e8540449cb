#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "blowlab/poly.hpp"

namespace blowlab {

// Monic Hermite-type eigenpolynomials of L_eta = eta d^2/dy^2 - (y/2) d/dy
// under the Gaussian weight rho_eta(y) = exp(-y^2/(4 eta)) / sqrt(4 pi eta):
//   hermite_poly(n, eta) = sum_j (-1)^j n!/((n-2j)! j!) eta^j y^(n-2j),
// so h_0 = 1, h_1 = y, h_2 = y^2 - 2 eta, h_4 = y^4 - 12 eta y^2 + 12 eta^2.
// They satisfy L_eta h_n = -(n/2) h_n and are orthogonal under rho_eta.
template <typename T>
Poly<T> hermite_poly(int n, const T& eta) {
    if (n < 0) throw std::invalid_argument("hermite_poly: n >= 0 required");
    Poly<T> p;
    p.c.assign(static_cast<size_t>(n) + 1, T(0));
    T cnj(1);  // c_{n,0} = 1 (monic)
    T eta_pow(1);
    for (int j = 0; 2 * j <= n; ++j) {
        if (j > 0) {
            // c_{n,j} = -c_{n,j-1} * (n-2j+2)(n-2j+1) / j
            cnj = T(0) - cnj * T((n - 2 * j + 2) * (n - 2 * j + 1)) / T(j);
            eta_pow = eta_pow * eta;
        }
        p.c[static_cast<size_t>(n - 2 * j)] = cnj * eta_pow;
    }
    return p;
}

// <h_n, h_n>_{rho_eta} = n! (2 eta)^n.
inline double hermite_norm_sq(int n, double eta) {
    double r = 1.0;
    for (int k = 1; k <= n; ++k) r *= 2.0 * eta * k;
    return r;
}

// Gauss-Hermite rule for the physicists' weight e^{-x^2}: Newton iteration on
// the normalized three-term recurrence, initial guesses marching in from the
// largest root.
inline void gauss_hermite_raw(int n, std::vector<double>& x, std::vector<double>& w) {
    constexpr double kEps = 1e-14;
    constexpr int kMaxIt = 200;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    x.assign(static_cast<size_t>(n), 0.0);
    w.assign(static_cast<size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[static_cast<size_t>(i - 2)];
        double pp = 0.0;
        for (int it = 0; it < kMaxIt; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= kEps) break;
        }
        x[static_cast<size_t>(i)] = z;
        x[static_cast<size_t>(n - 1 - i)] = -z;
        w[static_cast<size_t>(i)] = 2.0 / (pp * pp);
        w[static_cast<size_t>(n - 1 - i)] = w[static_cast<size_t>(i)];
    }
    // nodes ascending
    std::reverse(x.begin(), x.end());
}

// Quadrature adapted to rho_eta: substituting y = 2 sqrt(eta) x turns
// int f rho_eta dy into (1/sqrt(pi)) int f(2 sqrt(eta) x) e^{-x^2} dx.
struct HermiteBasis {
    double eta = 1.0;
    int M = 14;          // truncation order (even)
    int quad_order = 30;  // >= 2M+2: exact for polynomial degree <= 4M+3
    std::vector<double> nodes;    // y-space nodes
    std::vector<double> weights;  // sum to 1 (rho_eta is a probability weight)

    HermiteBasis() { rebuild(); }
    HermiteBasis(double eta_, int M_, int quad_order_ = 0)
        : eta(eta_), M(M_), quad_order(quad_order_ > 0 ? quad_order_ : 2 * M_ + 2) {
        if (M % 2 != 0) throw std::invalid_argument("HermiteBasis: M must be even");
        if (quad_order < 2 * M + 2)
            throw std::invalid_argument("HermiteBasis: quad_order must be >= 2M+2");
        rebuild();
    }

    void rebuild() {
        std::vector<double> x, w;
        gauss_hermite_raw(quad_order, x, w);
        const double scale = 2.0 * std::sqrt(eta);
        const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));
        nodes.resize(x.size());
        weights.resize(w.size());
        for (size_t i = 0; i < x.size(); ++i) {
            nodes[i] = scale * x[i];
            weights[i] = w[i] * inv_sqrt_pi;
        }
    }
};

// <f, g>_{rho_eta} by quadrature; exact when f*g is a polynomial within the
// rule's degree. Signals non-finite samples instead of propagating NaNs.
inline double weighted_inner(const std::function<double(double)>& f,
                             const std::function<double(double)>& g,
                             const HermiteBasis& basis) {
    double acc = 0.0;
    for (size_t i = 0; i < basis.nodes.size(); ++i) {
        const double fi = f(basis.nodes[i]);
        const double gi = g(basis.nodes[i]);
        if (!std::isfinite(fi) || !std::isfinite(gi))
            throw std::runtime_error("weighted_inner: non-finite sample");
        acc += basis.weights[i] * fi * gi;
    }
    return acc;
}

inline double weighted_inner(const std::vector<double>& f_at_nodes,
                             const std::vector<double>& g_at_nodes,
                             const HermiteBasis& basis) {
    if (f_at_nodes.size() != basis.nodes.size() || g_at_nodes.size() != basis.nodes.size())
        throw std::invalid_argument("weighted_inner: sample size mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < basis.nodes.size(); ++i) {
        if (!std::isfinite(f_at_nodes[i]) || !std::isfinite(g_at_nodes[i]))
            throw std::runtime_error("weighted_inner: non-finite sample");
        acc += basis.weights[i] * f_at_nodes[i] * g_at_nodes[i];
    }
    return acc;
}

// Expand an arbitrary polynomial in the h^{(eta)} basis by peeling leading
// coefficients (the basis is monic and graded, so this is exact
// back-substitution, no quadrature).
template <typename T>
std::vector<T> to_hermite_coeffs(Poly<T> p, const T& eta) {
    const int deg = p.degree();
    std::vector<T> out(static_cast<size_t>(std::max(deg, -1)) + 1, T(0));
    for (int k = deg; k >= 0; --k) {
        const T lead = p.coeff(k);
        if (!(lead == T(0))) {
            out[static_cast<size_t>(k)] = lead;
            p = p - lead * hermite_poly<T>(k, eta);
        }
    }
    return out;
}

// Coefficients expressing h_n^{(eta_from)} as a combination of
// h_0..h_n^{(eta_to)}. Same parity only; identity when the weights agree.
template <typename T>
std::vector<T> basis_change(int n, const T& eta_from, const T& eta_to) {
    return to_hermite_coeffs(hermite_poly<T>(n, eta_from), eta_to);
}

}  // namespace blowlab
