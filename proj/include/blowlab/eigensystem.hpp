#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/hermite.hpp"
#include "blowlab/poly.hpp"

namespace blowlab {

// One eigenvector of the coupled operator, stored as coefficient layers over
// the two Hermite bases: first component sum_k d[k] h_k^{(1)}, second
// component sum_k e[k] h_k^{(mu)}. Only entries with k = n, n-2, ... are
// nonzero.
template <typename T>
struct EigenPairT {
    std::vector<T> d;  // indexed by degree 0..n
    std::vector<T> e;
};

namespace detail {

// exact types demand exact solvability; floating point gets a tolerance
template <typename T>
bool near_zero(const T& x, const T&) {
    return x == T(0);
}
inline bool near_zero(const double& x, const double& scale) {
    return std::fabs(x) <= 1e-9 * (1.0 + std::fabs(scale));
}

}  // namespace detail

// Diagonalization of the block operator
//   (f,g) |-> (L_1 f + (q/p) g, L_mu g + (p/q) f),
// whose spectrum is {1 - n/2} on the stable family and {-1 - n/2} on the dual
// family. Built layer by layer: the top layer fixes the normalization
// (d_n, e_n) = (q, p) resp. (q, -p); each lower layer solves a 2x2 block fed
// by the weight-change coupling between the two Hermite bases.
//
// The eigenvalues 1 - n/2 and -1 - (n-4)/2 coincide, so the stable solve hits
// a rank-1 block exactly two layers down. Solvability there is structural
// (checked), and the kernel direction (q, -p) is fixed by the minimal-norm
// choice, i.e. the computed eigenvector carries no component along the dual
// pair of the same eigenvalue.
template <typename T>
struct EigenSystemT {
    T p, q, mu;
    int M = 14;
    std::vector<EigenPairT<T>> stable;  // eigenvalue 1 - n/2
    std::vector<EigenPairT<T>> dual;    // eigenvalue -(1 + n/2)

    // projection tables: theta_n = sum_m A[m][n] Q_m + B[m][n] Qhat_m,
    // dual coordinates use At / Bt. Entries vanish unless m >= n, same parity.
    std::vector<std::vector<T>> A, B, At, Bt;

    int order() const { return M; }
};

template <typename T>
EigenSystemT<T> build_eigensystem(const T& p, const T& q, const T& mu, int M) {
    if (M < 0 || M % 2 != 0) throw std::invalid_argument("build_eigensystem: M must be even");
    EigenSystemT<T> sys;
    sys.p = p;
    sys.q = q;
    sys.mu = mu;
    sys.M = M;

    // weight-change tables: mu_to_one[m][k] expresses h_m^{(mu)} over h^{(1)},
    // one_to_mu[m][k] the reverse; both are unit lower triangular in degree.
    std::vector<std::vector<T>> mu_to_one(static_cast<size_t>(M) + 1),
        one_to_mu(static_cast<size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        mu_to_one[static_cast<size_t>(m)] = basis_change<T>(m, mu, T(1));
        one_to_mu[static_cast<size_t>(m)] = basis_change<T>(m, T(1), mu);
    }

    const T qp = q / p, pq = p / q;

    auto solve_family = [&](int n, bool is_stable) {
        EigenPairT<T> v;
        v.d.assign(static_cast<size_t>(n) + 1, T(0));
        v.e.assign(static_cast<size_t>(n) + 1, T(0));
        v.d[static_cast<size_t>(n)] = q;
        if (is_stable)
            v.e[static_cast<size_t>(n)] = p;
        else
            v.e[static_cast<size_t>(n)] = T(0) - p;
        // lambda = 1 - n/2 (stable) or -1 - n/2 (dual); a = lambda + k/2
        for (int k = n - 2; k >= 0; k -= 2) {
            // coupling from the layers already solved
            T r1(0), r2(0);
            for (int m = k + 2; m <= n; m += 2) {
                r1 = r1 + qp * v.e[static_cast<size_t>(m)] * mu_to_one[static_cast<size_t>(m)][static_cast<size_t>(k)];
                r2 = r2 + pq * v.d[static_cast<size_t>(m)] * one_to_mu[static_cast<size_t>(m)][static_cast<size_t>(k)];
            }
            const T a = T(is_stable ? (2 - n + k) : (-2 - n + k)) / T(2);
            const T det = a * a - T(1);
            if (!(det == T(0))) {
                v.d[static_cast<size_t>(k)] = (a * r1 + qp * r2) / det;
                v.e[static_cast<size_t>(k)] = (pq * r1 + a * r2) / det;
            } else {
                // rank-1 block (eigenvalue collision with the dual family four
                // degrees down): require the right-hand side in range, then
                // take the solution orthogonal to the kernel (q, -p)
                const T mismatch = r2 - pq * r1;
                if (!detail::near_zero(mismatch, r1))
                    throw std::runtime_error("build_eigensystem: resonant layer not solvable");
                const T denom = p * p + q * q;
                v.d[static_cast<size_t>(k)] = T(0) - p * p * r1 / denom;
                v.e[static_cast<size_t>(k)] = T(0) - p * q * r1 / denom;
            }
        }
        return v;
    };

    sys.stable.resize(static_cast<size_t>(M) + 1);
    sys.dual.resize(static_cast<size_t>(M) + 1);
    for (int n = 0; n <= M; ++n) {
        sys.stable[static_cast<size_t>(n)] = solve_family(n, true);
        sys.dual[static_cast<size_t>(n)] = solve_family(n, false);
    }

    // projection tables by peeling unit coefficient vectors from the top
    // degree down (the change of basis is graded with invertible 2x2 diagonal
    // blocks [[q, q], [p, -p]], so no pivoting is ever needed)
    const size_t dimension = static_cast<size_t>(M) + 1;
    auto zero_table = [&] {
        return std::vector<std::vector<T>>(dimension, std::vector<T>(dimension, T(0)));
    };
    sys.A = zero_table();
    sys.B = zero_table();
    sys.At = zero_table();
    sys.Bt = zero_table();

    const T half_q = T(1) / (T(2) * q), half_p = T(1) / (T(2) * p);
    for (int m = 0; m <= M; ++m) {
        for (int component = 0; component < 2; ++component) {
            std::vector<T> Q(dimension, T(0)), Qh(dimension, T(0));
            (component == 0 ? Q : Qh)[static_cast<size_t>(m)] = T(1);
            for (int k = M; k >= 0; --k) {
                const T th = Q[static_cast<size_t>(k)] * half_q + Qh[static_cast<size_t>(k)] * half_p;
                const T tt = Q[static_cast<size_t>(k)] * half_q - Qh[static_cast<size_t>(k)] * half_p;
                if (component == 0) {
                    sys.A[static_cast<size_t>(m)][static_cast<size_t>(k)] = th;
                    sys.At[static_cast<size_t>(m)][static_cast<size_t>(k)] = tt;
                } else {
                    sys.B[static_cast<size_t>(m)][static_cast<size_t>(k)] = th;
                    sys.Bt[static_cast<size_t>(m)][static_cast<size_t>(k)] = tt;
                }
                for (int j = k % 2; j <= k; j += 2) {
                    Q[static_cast<size_t>(j)] =
                        Q[static_cast<size_t>(j)] - th * sys.stable[static_cast<size_t>(k)].d[static_cast<size_t>(j)] -
                        tt * sys.dual[static_cast<size_t>(k)].d[static_cast<size_t>(j)];
                    Qh[static_cast<size_t>(j)] =
                        Qh[static_cast<size_t>(j)] - th * sys.stable[static_cast<size_t>(k)].e[static_cast<size_t>(j)] -
                        tt * sys.dual[static_cast<size_t>(k)].e[static_cast<size_t>(j)];
                }
            }
        }
    }
    return sys;
}

// Coordinates (theta, theta_tilde) of a pair given by its Hermite coefficient
// vectors (Q over eta=1, Qhat over eta=mu), both of length M+1.
template <typename T>
void project_coeffs(const EigenSystemT<T>& sys, const std::vector<T>& Q,
                    const std::vector<T>& Qhat, std::vector<T>& theta,
                    std::vector<T>& theta_tilde) {
    const size_t dimension = static_cast<size_t>(sys.M) + 1;
    if (Q.size() != dimension || Qhat.size() != dimension)
        throw std::invalid_argument("project_coeffs: coefficient length mismatch");
    theta.assign(dimension, T(0));
    theta_tilde.assign(dimension, T(0));
    for (size_t n = 0; n < dimension; ++n)
        for (size_t m = n; m < dimension; m += 2) {
            theta[n] = theta[n] + sys.A[m][n] * Q[m] + sys.B[m][n] * Qhat[m];
            theta_tilde[n] = theta_tilde[n] + sys.At[m][n] * Q[m] + sys.Bt[m][n] * Qhat[m];
        }
}

// Inverse of project_coeffs on the truncated span.
template <typename T>
void embed_coeffs(const EigenSystemT<T>& sys, const std::vector<T>& theta,
                  const std::vector<T>& theta_tilde, std::vector<T>& Q,
                  std::vector<T>& Qhat) {
    const size_t dimension = static_cast<size_t>(sys.M) + 1;
    Q.assign(dimension, T(0));
    Qhat.assign(dimension, T(0));
    for (size_t n = 0; n < dimension; ++n)
        for (size_t j = n % 2; j <= n; j += 2) {
            Q[j] = Q[j] + theta[n] * sys.stable[n].d[j] + theta_tilde[n] * sys.dual[n].d[j];
            Qhat[j] = Qhat[j] + theta[n] * sys.stable[n].e[j] + theta_tilde[n] * sys.dual[n].e[j];
        }
}

// Apply the block operator to a coefficient pair and return the result in the
// same coefficient representation (all closed-form polynomial calculus).
template <typename T>
void apply_operator_coeffs(const EigenSystemT<T>& sys, const std::vector<T>& d,
                           const std::vector<T>& e, std::vector<T>& out_d,
                           std::vector<T>& out_e) {
    const size_t n = d.size();
    out_d.assign(n, T(0));
    out_e.assign(n, T(0));
    const T qp = sys.q / sys.p, pq = sys.p / sys.q;
    for (size_t k = 0; k < n; ++k) {
        // diagonal: L_eta h_k = -(k/2) h_k in either basis
        const T diag = T(0) - T(static_cast<int>(k)) / T(2);
        out_d[k] = out_d[k] + diag * d[k];
        out_e[k] = out_e[k] + diag * e[k];
    }
    for (size_t m = 0; m < n; ++m) {
        if (e[m] == T(0) && d[m] == T(0)) continue;
        const auto cm1 = basis_change<T>(static_cast<int>(m), sys.mu, T(1));
        const auto c1m = basis_change<T>(static_cast<int>(m), T(1), sys.mu);
        for (size_t k = m % 2; k <= m; k += 2) {
            out_d[k] = out_d[k] + qp * e[m] * cm1[k];
            out_e[k] = out_e[k] + pq * d[m] * c1m[k];
        }
    }
}

// Polynomial realizations of one eigenvector (monomial coefficients), useful
// for pointwise evaluation and for the gradient terms.
template <typename T>
void eigen_polys(const EigenSystemT<T>& sys, const EigenPairT<T>& v, Poly<T>& f, Poly<T>& g) {
    f = Poly<T>::zero();
    g = Poly<T>::zero();
    for (size_t k = 0; k < v.d.size(); ++k) {
        if (!(v.d[k] == T(0))) f = f + v.d[k] * hermite_poly<T>(static_cast<int>(k), T(1));
        if (!(v.e[k] == T(0))) g = g + v.e[k] * hermite_poly<T>(static_cast<int>(k), sys.mu);
    }
}

// Null-mode quadratic coupling constant: the degree-2 projection of the pair
//   ( q f2 g2 - p |f2'|^2 ,  p f2 g2 - q mu |g2'|^2 ),
// computed by exact polynomial expansion. Equals 2 p q (mu + 1).
template <typename T>
T quadratic_null_constant(const EigenSystemT<T>& sys) {
    if (sys.M < 4) throw std::invalid_argument("quadratic_null_constant: M >= 4 required");
    Poly<T> f2, g2;
    eigen_polys(sys, sys.stable[2], f2, g2);
    const Poly<T> df = f2.derivative(), dg = g2.derivative();
    const Poly<T> first = sys.q * (f2 * g2) - sys.p * (df * df);
    const Poly<T> second = sys.p * (f2 * g2) - sys.q * sys.mu * (dg * dg);

    std::vector<T> Q = to_hermite_coeffs(first, T(1));
    std::vector<T> Qh = to_hermite_coeffs(second, sys.mu);
    Q.resize(static_cast<size_t>(sys.M) + 1, T(0));
    Qh.resize(static_cast<size_t>(sys.M) + 1, T(0));
    std::vector<T> theta, theta_tilde;
    project_coeffs(sys, Q, Qh, theta, theta_tilde);
    return theta[2];
}

// ---------------------------------------------------------------------------
// double-precision front end used by the solvers and the mode tracker
// ---------------------------------------------------------------------------

using EigenSystem = EigenSystemT<double>;

struct ModeDecomposition {
    std::vector<double> theta, theta_tilde;  // coordinates along the two families
    std::vector<double> Q, Q_hat;            // raw Hermite coefficients
    double remainder_norm = 0.0;             // weighted sup of the degree > M part
};

// Project a sampled pair onto the first M+1 modes of each family. The pair is
// given as callables; remainder_norm is the sup of |residual|/(1+|y|^{M+1})
// over the reporting points (skipped when none are supplied).
inline ModeDecomposition project_modes(const std::function<double(double)>& Lam,
                                       const std::function<double(double)>& Ups,
                                       const EigenSystem& sys,
                                       const HermiteBasis& basis1,
                                       const HermiteBasis& basis_mu,
                                       const std::vector<double>& report_y = {}) {
    const int M = sys.M;
    ModeDecomposition md;
    md.Q.assign(static_cast<size_t>(M) + 1, 0.0);
    md.Q_hat.assign(static_cast<size_t>(M) + 1, 0.0);

    std::vector<double> Lam_nodes(basis1.nodes.size()), Ups_nodes(basis_mu.nodes.size());
    for (size_t i = 0; i < basis1.nodes.size(); ++i) Lam_nodes[i] = Lam(basis1.nodes[i]);
    for (size_t i = 0; i < basis_mu.nodes.size(); ++i) Ups_nodes[i] = Ups(basis_mu.nodes[i]);

    for (int n = 0; n <= M; ++n) {
        const Poly<double> hn1 = hermite_poly<double>(n, 1.0);
        const Poly<double> hnmu = hermite_poly<double>(n, sys.mu);
        std::vector<double> h1(basis1.nodes.size()), hm(basis_mu.nodes.size());
        for (size_t i = 0; i < basis1.nodes.size(); ++i) h1[i] = hn1(basis1.nodes[i]);
        for (size_t i = 0; i < basis_mu.nodes.size(); ++i) hm[i] = hnmu(basis_mu.nodes[i]);
        md.Q[static_cast<size_t>(n)] =
            weighted_inner(Lam_nodes, h1, basis1) / hermite_norm_sq(n, 1.0);
        md.Q_hat[static_cast<size_t>(n)] =
            weighted_inner(Ups_nodes, hm, basis_mu) / hermite_norm_sq(n, sys.mu);
    }
    project_coeffs(sys, md.Q, md.Q_hat, md.theta, md.theta_tilde);

    if (!report_y.empty()) {
        // reconstruct the degree <= M part and take the weighted sup of what is left
        Poly<double> recon_f = Poly<double>::zero(), recon_g = Poly<double>::zero();
        for (int n = 0; n <= M; ++n) {
            Poly<double> fn, gn;
            eigen_polys(sys, sys.stable[static_cast<size_t>(n)], fn, gn);
            Poly<double> ftn, gtn;
            eigen_polys(sys, sys.dual[static_cast<size_t>(n)], ftn, gtn);
            recon_f = recon_f + md.theta[static_cast<size_t>(n)] * fn +
                      md.theta_tilde[static_cast<size_t>(n)] * ftn;
            recon_g = recon_g + md.theta[static_cast<size_t>(n)] * gn +
                      md.theta_tilde[static_cast<size_t>(n)] * gtn;
        }
        double sup = 0.0;
        for (double y : report_y) {
            const double wgt = 1.0 + std::pow(std::fabs(y), M + 1);
            sup = std::max(sup, std::fabs(Lam(y) - recon_f(y)) / wgt);
            sup = std::max(sup, std::fabs(Ups(y) - recon_g(y)) / wgt);
        }
        md.remainder_norm = sup;
    }
    return md;
}

// Versioned text dump of the coefficient tables for cross-implementation
// diffing. The formatter is injected so exact builds can print rationals.
template <typename T>
std::string dump_eigensystem(const EigenSystemT<T>& sys,
                             const std::function<std::string(const T&)>& fmt) {
    std::ostringstream os;
    os << "schema: blowlab/eigensystem v1\n";
    os << "M = " << sys.M << "\n";
    os << "p = " << fmt(sys.p) << "\nq = " << fmt(sys.q) << "\nmu = " << fmt(sys.mu) << "\n";
    auto emit = [&](const char* name, const std::vector<EigenPairT<T>>& fam) {
        for (size_t n = 0; n < fam.size(); ++n)
            for (size_t k = n % 2; k <= n; k += 2) {
                os << name << ".d[" << n << "][" << k << "] = " << fmt(fam[n].d[k]) << "\n";
                os << name << ".e[" << n << "][" << k << "] = " << fmt(fam[n].e[k]) << "\n";
            }
    };
    emit("stable", sys.stable);
    emit("dual", sys.dual);
    auto emit_table = [&](const char* name, const std::vector<std::vector<T>>& tab) {
        for (size_t m = 0; m < tab.size(); ++m)
            for (size_t n = m % 2; n <= m; n += 2)
                os << name << "[" << m << "][" << n << "] = " << fmt(tab[m][n]) << "\n";
    };
    emit_table("A", sys.A);
    emit_table("B", sys.B);
    emit_table("At", sys.At);
    emit_table("Bt", sys.Bt);
    return os.str();
}

}  // namespace blowlab
