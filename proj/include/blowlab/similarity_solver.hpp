#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/eigensystem.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/initial_data.hpp"
#include "blowlab/params.hpp"
#include "blowlab/profiles.hpp"

namespace blowlab {

struct SimilarityState {
    double s = 0.0;
    Grid grid;
    std::vector<double> Phi, Psi;
    Params params;
};

// Tridiagonal solve (Thomas); solution overwrites rhs.
inline void solve_tridiagonal(std::vector<double>& a, std::vector<double>& b,
                              std::vector<double>& c, std::vector<double>& rhs) {
    const size_t n = b.size();
    for (size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= b[n - 1];
    for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - c[i] * rhs[i + 1]) / b[i];
}

enum class BoundaryMode {
    outer_data,  // Dirichlet to the time-dependent far-field value
    profile,     // Dirichlet to the corrected profile (tests, manufactured runs)
};

enum class StopReason { reached_end, ceiling, non_finite };

struct SolverOptions {
    double cfl = 0.4;
    double positivity_floor_scale = 1e-8;  // floor = scale / p (resp. / q)
    BoundaryMode boundary = BoundaryMode::outer_data;
    double far_field_a = 1.0;
    double ceiling = 1e6;  // sup-norm guard: trajectory left the funnel
    double record_ds = 0.1;
    double regrid_growth = 1.05;  // scaled-z: regrid when sqrt(s) grew by this
    double K0 = 2.0;              // blowup-region scale for diagnostics/stabilization
    // periodically remove the two exponentially growing directions (measured,
    // logged); long runs need this since e^{s} amplifies roundoff past any
    // shooting precision after roughly 36 units of s
    bool stabilize_unstable = false;
    double stabilize_ds = 1.0;
    const EigenSystem* eigensystem = nullptr;  // needed when stabilizing
    int quad_order = 0;                        // 0: derived from eigensystem order
    // test hook: extra source term added to the (Phi, Psi) right-hand sides
    std::function<std::array<double, 2>(double y, double s)> extra_source;
    // overrides the boundary mode when set (manufactured solutions, constants)
    std::function<double(double y, double s, bool first_component)> custom_boundary;
};

struct StepDiagnostics {
    int floor_activations = 0;
    double min_value = 0.0;
};

struct RunResult {
    SimilarityState state;
    StopReason reason = StopReason::reached_end;
    long steps = 0;
    long floor_activations = 0;
    long floor_activations_inner = 0;  // inside |y| <= 2 K0 sqrt(s)
    std::vector<double> stabilized_theta0, stabilized_theta1;  // removed amplitudes
};

class SimilaritySolver {
  public:
    SimilaritySolver(Params pr, SolverOptions opt = {}) : pr_(pr), opt_(std::move(opt)) {}

    const SolverOptions& options() const { return opt_; }
    SolverOptions& options() { return opt_; }
    const Params& params() const { return pr_; }

    double boundary_value(double y, double s, bool first_component) const {
        if (opt_.custom_boundary) return opt_.custom_boundary(y, s, first_component);
        if (opt_.boundary == BoundaryMode::profile) {
            const auto v = approx_profile(y, s, pr_);
            return first_component ? v.phi : v.psi;
        }
        const FarFieldData far{pr_, opt_.far_field_a};
        const auto v = outer_similarity_value(y, s, pr_, far);
        return first_component ? v.phi : v.psi;
    }

    double suggest_ds(const SimilarityState& st) const {
        const double h = st.grid.dy();
        double prod = 0.0;
        for (size_t i = 0; i < st.Phi.size(); ++i)
            prod = std::max(prod, st.Phi[i] * st.Psi[i]);
        const double reaction = std::max(1e-12, std::max(pr_.p, pr_.q) * prod);
        const double drift = std::max(1e-12, 0.5 * std::fabs(st.grid.y.back()));
        return opt_.cfl * std::min({h * h, 1.0 / reaction, h / drift});
    }

    // One IMEX step: diffusion implicit, drift second-order upwind explicit,
    // reaction and gradient-quotient explicit, Dirichlet at both ends.
    StepDiagnostics step(SimilarityState& st, double ds) const {
        if (!(ds > 0.0)) throw std::invalid_argument("step: ds must be > 0");
        StepDiagnostics diag{};
        const int n = st.grid.points;
        const double h = st.grid.dy();
        const auto& y = st.grid.y;

        auto advance = [&](std::vector<double>& X, const std::vector<double>& other,
                           double diffus, double react_coef, double floor_val,
                           bool first_component) {
            std::vector<double> rhs(static_cast<size_t>(n));
            for (int i = 1; i + 1 < n; ++i) {
                const size_t k = static_cast<size_t>(i);
                // upwind against the outward characteristic speed y/2
                double Xy;
                if (y[k] > 0.0 && i >= 2)
                    Xy = (3.0 * X[k] - 4.0 * X[k - 1] + X[k - 2]) / (2.0 * h);
                else if (y[k] < 0.0 && i + 2 < n)
                    Xy = (-3.0 * X[k] + 4.0 * X[k + 1] - X[k + 2]) / (2.0 * h);
                else
                    Xy = (X[k + 1] - X[k - 1]) / (2.0 * h);
                const double Xc = (X[k + 1] - X[k - 1]) / (2.0 * h);
                double e = -0.5 * y[k] * Xy - X[k] + react_coef * X[k] * other[k] -
                           diffus * Xc * Xc / std::max(X[k], floor_val);
                if (opt_.extra_source) {
                    const auto src = opt_.extra_source(y[k], st.s);
                    e += first_component ? src[0] : src[1];
                }
                rhs[k] = X[k] + ds * e;
            }
            std::vector<double> lo(static_cast<size_t>(n), 0.0), di(static_cast<size_t>(n), 1.0),
                up(static_cast<size_t>(n), 0.0);
            const double lam = ds * diffus / (h * h);
            for (int i = 1; i + 1 < n; ++i) {
                const size_t k = static_cast<size_t>(i);
                lo[k] = -lam;
                di[k] = 1.0 + 2.0 * lam;
                up[k] = -lam;
            }
            rhs[0] = boundary_value(y.front(), st.s + ds, first_component);
            rhs[static_cast<size_t>(n - 1)] = boundary_value(y.back(), st.s + ds, first_component);
            solve_tridiagonal(lo, di, up, rhs);
            for (int i = 0; i < n; ++i) {
                const size_t k = static_cast<size_t>(i);
                if (rhs[k] < floor_val) {
                    rhs[k] = floor_val;
                    ++diag.floor_activations;
                }
            }
            X = std::move(rhs);
        };

        const double floor_phi = opt_.positivity_floor_scale / pr_.p;
        const double floor_psi = opt_.positivity_floor_scale / pr_.q;
        std::vector<double> Phi_old = st.Phi;  // Psi update must see the old Phi
        advance(st.Phi, st.Psi, 1.0, pr_.q, floor_phi, true);
        advance(st.Psi, Phi_old, pr_.mu, pr_.p, floor_psi, false);
        st.s += ds;
        diag.min_value = *std::min_element(st.Phi.begin(), st.Phi.end());
        return diag;
    }

    // Integrate to s_end with adaptive steps; on_record fires at the
    // configured cadence including the initial and final states. A true
    // return from on_record stops the run early (exit detection).
    RunResult run(SimilarityState st, double s_end,
                  const std::function<bool(const SimilarityState&)>& on_record = {}) const {
        if (!(s_end >= st.s)) throw std::invalid_argument("run: s_end must be >= s0");
        RunResult out;
        double next_record = st.s;
        double next_regrid_s = st.grid.kind == GridKind::scaled_z
                                   ? st.grid.s_ref * opt_.regrid_growth * opt_.regrid_growth
                                   : std::numeric_limits<double>::infinity();
        double next_stabilize = st.s + opt_.stabilize_ds;

        while (true) {
            if (on_record && st.s + 1e-12 >= next_record) {
                if (on_record(st)) {
                    out.state = std::move(st);
                    out.reason = StopReason::reached_end;
                    return out;
                }
                next_record += opt_.record_ds;
            }
            if (st.s >= s_end - 1e-12) break;

            double ds = std::min(suggest_ds(st), s_end - st.s);
            if (on_record && next_record > st.s) ds = std::min(ds, next_record - st.s);
            const auto diag = step(st, ds);
            out.floor_activations += diag.floor_activations;
            if (diag.floor_activations > 0) {
                const double inner = 2.0 * opt_.K0 * std::sqrt(st.s);
                for (size_t i = 0; i < st.Phi.size(); ++i)
                    if (std::fabs(st.grid.y[i]) <= inner &&
                        (st.Phi[i] <= opt_.positivity_floor_scale / pr_.p ||
                         st.Psi[i] <= opt_.positivity_floor_scale / pr_.q))
                        ++out.floor_activations_inner;
            }
            ++out.steps;

            double supPhi = 0.0;
            bool finite = true;
            for (double v : st.Phi) {
                if (!std::isfinite(v)) finite = false;
                supPhi = std::max(supPhi, std::fabs(v));
            }
            for (double v : st.Psi)
                if (!std::isfinite(v)) finite = false;
            if (!finite) {
                out.reason = StopReason::non_finite;
                out.state = std::move(st);
                return out;
            }
            if (supPhi > opt_.ceiling) {
                out.reason = StopReason::ceiling;
                out.state = std::move(st);
                return out;
            }

            if (st.grid.kind == GridKind::scaled_z && st.s >= next_regrid_s) {
                regrid(st);
                next_regrid_s = st.s * opt_.regrid_growth * opt_.regrid_growth;
            }
            if (opt_.stabilize_unstable && st.s >= next_stabilize) {
                remove_unstable_modes(st, out);
                next_stabilize += opt_.stabilize_ds;
            }
        }
        if (on_record) on_record(st);
        out.state = std::move(st);
        out.reason = StopReason::reached_end;
        return out;
    }

    // Cubic reinterpolation onto the reference z-grid at the current s.
    void regrid(SimilarityState& st) const {
        Grid fresh(GridKind::scaled_z, st.grid.half_width, st.grid.points, st.s);
        std::vector<double> Phi(fresh.y.size()), Psi(fresh.y.size());
        for (size_t i = 0; i < fresh.y.size(); ++i) {
            if (grid_covers(st.grid.y, fresh.y[i])) {
                Phi[i] = cubic_interp(st.grid.y, st.Phi, fresh.y[i]);
                Psi[i] = cubic_interp(st.grid.y, st.Psi, fresh.y[i]);
            } else {
                Phi[i] = boundary_value(fresh.y[i], st.s, true);
                Psi[i] = boundary_value(fresh.y[i], st.s, false);
            }
        }
        st.grid = fresh;
        st.Phi = std::move(Phi);
        st.Psi = std::move(Psi);
    }

  private:
    // Measure the two growing coordinates of (Phi - phi, Psi - psi) and
    // subtract their cutoff-localized eigendirections.
    void remove_unstable_modes(SimilarityState& st, RunResult& out) const {
        if (opt_.eigensystem == nullptr)
            throw std::runtime_error("stabilize_unstable requires an eigensystem");
        const EigenSystem& sys = *opt_.eigensystem;
        const int qo = opt_.quad_order > 0 ? opt_.quad_order : 2 * sys.M + 2;
        HermiteBasis b1(1.0, sys.M, qo), bmu(pr_.mu, sys.M, qo);
        const double s = st.s;
        // interpolate the (small, smooth) difference rather than the state
        std::vector<double> Lam(st.grid.y.size()), Ups(st.grid.y.size());
        for (size_t i = 0; i < st.grid.y.size(); ++i) {
            const auto ap = approx_profile(st.grid.y[i], s, pr_);
            Lam[i] = st.Phi[i] - ap.phi;
            Ups[i] = st.Psi[i] - ap.psi;
        }
        auto md = project_modes(
            [&](double yy) { return cubic_interp(st.grid.y, Lam, yy); },
            [&](double yy) { return cubic_interp(st.grid.y, Ups, yy); }, sys, b1, bmu);
        for (size_t i = 0; i < st.grid.y.size(); ++i) {
            const double yy = st.grid.y[i];
            const double chi = blowup_cutoff(yy, s, opt_.K0);
            if (chi == 0.0) continue;
            // f0 = q, f1 = q y; g0 = p, g1 = p y
            st.Phi[i] -= chi * (md.theta[0] * pr_.q + md.theta[1] * pr_.q * yy);
            st.Psi[i] -= chi * (md.theta[0] * pr_.p + md.theta[1] * pr_.p * yy);
        }
        out.stabilized_theta0.push_back(md.theta[0]);
        out.stabilized_theta1.push_back(md.theta[1]);
    }

    Params pr_;
    SolverOptions opt_;
};

inline SimilarityState sample_state(const std::function<double(double)>& Phi,
                                    const std::function<double(double)>& Psi, double s,
                                    Grid grid, const Params& pr) {
    SimilarityState st;
    st.s = s;
    st.grid = std::move(grid);
    st.params = pr;
    st.Phi.resize(st.grid.y.size());
    st.Psi.resize(st.grid.y.size());
    for (size_t i = 0; i < st.grid.y.size(); ++i) {
        st.Phi[i] = Phi(st.grid.y[i]);
        st.Psi[i] = Psi(st.grid.y[i]);
    }
    return st;
}

// Prepared two-parameter data sampled on a solver grid.
inline SimilarityState build_initial_data(const InitialDataSpec& spec, const Params& pr,
                                          const EigenSystem& sys, Grid grid) {
    HermiteBasis b1(1.0, sys.M), bmu(pr.mu, sys.M);
    const InitialData data = make_initial_data(spec, pr, sys, b1, bmu);
    return sample_state(data.Phi, data.Psi, spec.s0, std::move(grid), pr);
}

}  // namespace blowlab
