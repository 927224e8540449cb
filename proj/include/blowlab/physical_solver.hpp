#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "blowlab/grid.hpp"
#include "blowlab/params.hpp"
#include "blowlab/similarity_solver.hpp"

namespace blowlab {

struct PhysicalState {
    double t = 0.0;
    Grid grid;  // fixed x-grid
    std::vector<double> u, v;
    Params params;
};

// Stored spacetime samples of a physical run: snapshots dense near the end
// plus a per-step center history for blowup-time fitting.
struct PhysicalTrajectory {
    Grid grid;
    Params params;
    std::vector<double> times;
    std::vector<std::vector<double>> u_snaps, v_snaps;
    std::vector<double> center_t, center_u, center_v;
    bool overflow_stopped = false;
    double t_last = 0.0;

    // cubic in space, linear in time
    double sample_u(double x, double t) const { return sample(u_snaps, x, t); }
    double sample_v(double x, double t) const { return sample(v_snaps, x, t); }

    bool covers(double x, double t) const {
        return grid_covers(grid.y, x) && !times.empty() && t >= times.front() &&
               t <= times.back() + 1e-15;
    }

  private:
    double sample(const std::vector<std::vector<double>>& snaps, double x, double t) const {
        if (!grid_covers(grid.y, x))
            throw std::domain_error("trajectory: x outside stored grid");
        if (times.empty() || t < times.front() - 1e-12 || t > times.back() + 1e-12)
            throw std::domain_error("trajectory: t outside stored range");
        auto it = std::lower_bound(times.begin(), times.end(), t);
        size_t hi = static_cast<size_t>(std::distance(times.begin(), it));
        if (hi == 0) hi = 1;
        if (hi >= times.size()) hi = times.size() - 1;
        const size_t lo = hi - 1;
        const double w = (times[hi] - times[lo]) > 0
                             ? std::clamp((t - times[lo]) / (times[hi] - times[lo]), 0.0, 1.0)
                             : 0.0;
        const double a = cubic_interp(grid.y, snaps[lo], x);
        const double b = cubic_interp(grid.y, snaps[hi], x);
        return (1.0 - w) * a + w * b;
    }
};

struct PhysicalOptions {
    double cfl = 0.2;
    double max_exponent = 27.0;  // stop when q u or p v exceeds this (overflow guard)
    bool reaction_enabled = true;  // test hook: pure diffusion when false
    double T_hint = 1.0;           // snapshot spacing target (geometric in T_hint - t)
    int snapshots = 120;
    double dt_max = 1e-3;
    // test hook: extra source added to (u, v) right-hand sides
    std::function<std::array<double, 2>(double x, double t)> extra_source;
};

// IMEX integrator for u_t = u_xx + e^{p v}, v_t = mu v_xx + e^{q u} on a fixed
// symmetric grid with zero-flux ends. Explicit exponential reaction with step
// control, implicit diffusion.
class PhysicalSolver {
  public:
    PhysicalSolver(Params pr, PhysicalOptions opt = {}) : pr_(pr), opt_(std::move(opt)) {}

    const PhysicalOptions& options() const { return opt_; }
    PhysicalOptions& options() { return opt_; }

    double suggest_dt(const PhysicalState& st) const {
        double rate = 1e-12;
        for (size_t i = 0; i < st.u.size(); ++i) {
            rate = std::max(rate, std::exp(pr_.p * st.v[i]));
            rate = std::max(rate, std::exp(pr_.q * st.u[i]));
        }
        return std::min(opt_.dt_max, opt_.cfl / rate);
    }

    void step(PhysicalState& st, double dt) const {
        if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
        const int n = st.grid.points;
        const double h = st.grid.dy();
        const size_t nn = static_cast<size_t>(n);

        auto guarded_exp = [](double x) { return std::exp(std::min(x, 500.0)); };
        auto reaction = [&](const std::vector<double>& uu, const std::vector<double>& vv,
                            double t, std::vector<double>& ru, std::vector<double>& rv) {
            ru.assign(nn, 0.0);
            rv.assign(nn, 0.0);
            for (size_t k = 0; k < nn; ++k) {
                if (opt_.reaction_enabled) {
                    ru[k] = guarded_exp(pr_.p * vv[k]);
                    rv[k] = guarded_exp(pr_.q * uu[k]);
                }
                if (opt_.extra_source) {
                    const auto src = opt_.extra_source(st.grid.y[k], t);
                    ru[k] += src[0];
                    rv[k] += src[1];
                }
            }
        };

        // Heun for the stiff exponential source, then implicit diffusion
        std::vector<double> r1u, r1v, r2u, r2v;
        reaction(st.u, st.v, st.t, r1u, r1v);
        std::vector<double> pu(nn), pv(nn);
        for (size_t k = 0; k < nn; ++k) {
            pu[k] = st.u[k] + dt * r1u[k];
            pv[k] = st.v[k] + dt * r1v[k];
        }
        reaction(pu, pv, st.t + dt, r2u, r2v);

        auto diffuse = [&](std::vector<double>& X, const std::vector<double>& ra,
                           const std::vector<double>& rb, double diffus) {
            std::vector<double> rhs(nn);
            for (size_t k = 0; k < nn; ++k) rhs[k] = X[k] + 0.5 * dt * (ra[k] + rb[k]);
            std::vector<double> lo(nn, 0.0), di(nn, 1.0), up(nn, 0.0);
            const double lam = dt * diffus / (h * h);
            for (size_t k = 0; k < nn; ++k) {
                di[k] = 1.0 + 2.0 * lam;
                if (k > 0) lo[k] = -lam;
                if (k + 1 < nn) up[k] = -lam;
            }
            // zero-flux ends via ghost reflection (finite-volume half cells,
            // conserves the trapezoid mass exactly)
            up[0] = -2.0 * lam;
            lo[nn - 1] = -2.0 * lam;
            solve_tridiagonal(lo, di, up, rhs);
            X = std::move(rhs);
        };
        diffuse(st.u, r1u, r2u, 1.0);
        diffuse(st.v, r1v, r2v, pr_.mu);
        st.t += dt;
    }

    PhysicalTrajectory run(PhysicalState st, double t_end) const {
        PhysicalTrajectory traj;
        traj.grid = st.grid;
        traj.params = pr_;
        const int n_snap = std::max(2, opt_.snapshots);
        // geometric spacing toward T_hint, clipped to [t0, t_end]
        std::vector<double> snap_times;
        {
            const double tau0 = std::max(opt_.T_hint - st.t, 1e-300);
            const double tau1 = std::max(opt_.T_hint - t_end, 1e-300);
            for (int i = 0; i < n_snap; ++i) {
                const double f = static_cast<double>(i) / (n_snap - 1);
                snap_times.push_back(opt_.T_hint - tau0 * std::pow(tau1 / tau0, f));
            }
            snap_times.front() = st.t;
            snap_times.back() = t_end;
        }
        size_t next_snap = 0;

        const size_t center = st.u.size() / 2;
        auto record_center = [&] {
            traj.center_t.push_back(st.t);
            traj.center_u.push_back(st.u[center]);
            traj.center_v.push_back(st.v[center]);
        };
        auto take_snapshot = [&] {
            traj.times.push_back(st.t);
            traj.u_snaps.push_back(st.u);
            traj.v_snaps.push_back(st.v);
        };

        record_center();
        while (st.t < t_end - 1e-300) {
            while (next_snap < snap_times.size() && st.t >= snap_times[next_snap] - 1e-300) {
                take_snapshot();
                ++next_snap;
            }
            double dt = std::min(suggest_dt(st), t_end - st.t);
            if (next_snap < snap_times.size())
                dt = std::min(dt, std::max(snap_times[next_snap] - st.t, 1e-300));
            step(st, dt);
            record_center();

            double worst = -std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < st.u.size(); ++i)
                worst = std::max({worst, pr_.q * st.u[i], pr_.p * st.v[i]});
            if (worst > opt_.max_exponent) {
                traj.overflow_stopped = true;
                break;
            }
        }
        take_snapshot();
        traj.t_last = st.t;
        return traj;
    }

  private:
    Params pr_;
    PhysicalOptions opt_;
};

struct BlowupFit {
    double T = 0.0;
    double fit_residual = 0.0;
    size_t samples_used = 0;
};

// The center value satisfies (T - t) e^{q u(0,t)} -> 1/p, i.e.
// e^{-q u(0,t)} / p ~ T - t; an affine fit of that quantity against t over the
// last window recovers T as root of the fitted line.
inline BlowupFit estimate_blowup_time(const std::vector<double>& ts,
                                      const std::vector<double>& u_center, const Params& pr,
                                      double window_fraction = 0.25) {
    if (ts.size() != u_center.size() || ts.size() < 4)
        throw std::invalid_argument("estimate_blowup_time: need >= 4 samples");
    // blowup trend: e^{q u} must grow monotonically over the fit window
    const size_t n = ts.size();
    const size_t start = static_cast<size_t>(static_cast<double>(n) * (1.0 - window_fraction));
    const size_t lo = std::min(start, n - 4);
    for (size_t i = lo + 1; i < n; ++i)
        if (u_center[i] < u_center[i - 1] - 1e-12)
            throw std::runtime_error("estimate_blowup_time: center value not monotone");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t m = 0;
    for (size_t i = lo; i < n; ++i) {
        const double z = std::exp(-pr.q * u_center[i]) / pr.p;
        sx += ts[i];
        sy += z;
        sxx += ts[i] * ts[i];
        sxy += ts[i] * z;
        ++m;
    }
    const double denom = m * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300)
        throw std::runtime_error("estimate_blowup_time: degenerate fit window");
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    if (!(slope < 0.0)) throw std::runtime_error("estimate_blowup_time: no blowup trend");

    BlowupFit fit;
    fit.T = -intercept / slope;
    fit.samples_used = m;
    double res = 0.0;
    for (size_t i = lo; i < n; ++i) {
        const double z = std::exp(-pr.q * u_center[i]) / pr.p;
        res = std::max(res, std::fabs(z - (intercept + slope * ts[i])));
    }
    fit.fit_residual = res;
    return fit;
}

}  // namespace blowlab
