#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/params.hpp"
#include "blowlab/physical_solver.hpp"
#include "blowlab/profiles.hpp"

namespace blowlab {

// The x-indexed rescaling time: |x| = (K0/4) sqrt(sigma |ln sigma|) with
// sigma = T - t(x), solved on the monotone branch sigma in (0, 1/e).
struct RescalePoint {
    double x = 0.0;
    double t_of_x = 0.0;
    double sigma = 0.0;
    double K0 = 1.0;
};

inline RescalePoint solve_tx(double x, double K0, double T) {
    const double target = std::pow(4.0 * std::fabs(x) / K0, 2);  // sigma |ln sigma|
    const double cap = std::exp(-1.0);
    if (!(target > 0.0))
        throw std::domain_error("solve_tx: x must be nonzero");
    if (target >= cap)
        throw std::domain_error("solve_tx: |x| too large for the monotone branch");

    auto g = [](double sg) { return sg * std::fabs(std::log(sg)); };
    // safeguarded Newton with a bisection bracket
    double lo = 1e-300, hi = cap;
    double sg = std::min(cap * 0.5, std::max(1e-30, target));
    for (int it = 0; it < 200; ++it) {
        const double val = g(sg) - target;
        if (val > 0)
            hi = sg;
        else
            lo = sg;
        const double deriv = -std::log(sg) - 1.0;  // d/dsigma [sigma(-ln sigma)]
        double next = sg - val / deriv;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - sg) <= 1e-16 * sg) {
            sg = next;
            break;
        }
        sg = next;
    }
    RescalePoint rp;
    rp.x = x;
    rp.sigma = sg;
    rp.t_of_x = T - sg;
    rp.K0 = K0;
    return rp;
}

inline double rescale_residual(const RescalePoint& rp) {
    const double lhs = std::fabs(rp.x);
    const double rhs = rp.K0 / 4.0 * std::sqrt(rp.sigma * std::fabs(std::log(rp.sigma)));
    return std::fabs(lhs - rhs) / std::max(lhs, 1e-300);
}

// Rescaled solution around x: u~(x, xi, tau) = (1/q) ln sigma + u at the
// shifted spacetime point; solves the original system in (xi, tau).
inline std::array<double, 2> extract_rescaled(const PhysicalTrajectory& traj, double x,
                                              double xi, double tau, const RescalePoint& rp) {
    const Params& pr = traj.params;
    const double xx = x + xi * std::sqrt(rp.sigma);
    const double tt = rp.t_of_x + tau * rp.sigma;
    if (!traj.covers(xx, tt))
        throw std::domain_error("extract_rescaled: point outside trajectory coverage");
    const double ln_sigma = std::log(rp.sigma);
    return {ln_sigma / pr.q + traj.sample_u(xx, tt), ln_sigma / pr.p + traj.sample_v(xx, tt)};
}

struct RegionThresholds {
    double delta0 = 0.0;  // <= 0: derived as half the flat-ODE end values
    double C0 = 5.0;
    double eta0 = 0.1;
    double eps0 = 0.1;
    double alpha0 = 0.2;
    double K0 = 2.0;
    int x_samples = 32;
    int xi_points = 33;
    int tau_points = 16;
};

struct RegionRow {
    double x = 0.0, sigma = 0.0, tau = 0.0;
    double dev_u = 0.0, dev_v = 0.0;          // sup |u~ - u^|, |v~ - v^| at tau(x, t_check)
    double dev_u_sup_tau = 0.0, dev_v_sup_tau = 0.0;  // same, sup over covered tau
    double grad_u = 0.0, grad_v = 0.0;        // sup |grad u~| sqrt(|ln sigma|)
    bool pass = false;
};

struct RegularRow {
    double x = 0.0;
    double drift0 = 0.0, drift1 = 0.0;  // sup_t |d^i u(x,t) - d^i u(x,t0)|, i = 0,1
    bool pass = false;
};

struct RegionReport {
    std::vector<RegionRow> intermediate;
    std::vector<RegularRow> regular;
    double delta0 = 0.0, C0 = 0.0, eta0 = 0.0;
    bool intermediate_pass = false;
    bool regular_pass = false;
    bool pass = false;
    // final-profile comparison over |x| in [1e-3, 1e-1] (or the covered part)
    double final_profile_rel_dev = 0.0;       // against the matched constant
    double final_profile_rel_dev_printed = 0.0;  // against the theorem constant
};

inline RegionReport verify_regions(const PhysicalTrajectory& traj, double T,
                                   RegionThresholds th, double t_check = -1.0) {
    const Params& pr = traj.params;
    RegionReport rep;
    if (t_check < 0.0) t_check = traj.times.back();
    const double t0 = traj.times.front();

    const OdeHat hat{pr, th.K0};
    double delta0 = th.delta0;
    if (delta0 <= 0.0)
        delta0 = 0.5 * std::min(std::fabs(hat.u(1.0)), std::fabs(hat.v(1.0)));
    rep.delta0 = delta0;
    rep.C0 = th.C0;
    rep.eta0 = th.eta0;

    // ---- intermediate region ----
    const double tau_rem = T - t_check;
    const double x_lo = th.K0 / 4.0 * std::sqrt(tau_rem * std::fabs(std::log(tau_rem)));
    const double x_hi = th.eps0;
    rep.intermediate_pass = true;
    for (int ix = 0; ix < th.x_samples; ++ix) {
        const double f = static_cast<double>(ix) / (th.x_samples - 1);
        const double x = x_lo * std::pow(x_hi / x_lo, f);
        RescalePoint rp;
        try {
            rp = solve_tx(x, th.K0, T);
        } catch (const std::domain_error&) {
            continue;  // beyond the monotone branch; outside the region machinery
        }
        RegionRow row;
        row.x = x;
        row.sigma = rp.sigma;
        const double ln_sig = std::fabs(std::log(rp.sigma));
        const double xi_max = th.alpha0 * std::sqrt(ln_sig);
        const double tau_now = (t_check - rp.t_of_x) / rp.sigma;
        row.tau = tau_now;

        const double tau_first = std::max((t0 - rp.t_of_x) / rp.sigma,
                                          (traj.times.front() - rp.t_of_x) / rp.sigma);
        auto scan_tau = [&](double tau, double& du, double& dv, double& gu, double& gv) {
            const double uhat = hat.u(tau), vhat = hat.v(tau);
            std::vector<double> us(static_cast<size_t>(th.xi_points)),
                vs(static_cast<size_t>(th.xi_points));
            const double dxi = 2.0 * xi_max / (th.xi_points - 1);
            for (int k = 0; k < th.xi_points; ++k) {
                const double xi = -xi_max + dxi * k;
                const auto uv = extract_rescaled(traj, x, xi, tau, rp);
                us[static_cast<size_t>(k)] = uv[0];
                vs[static_cast<size_t>(k)] = uv[1];
                du = std::max(du, std::fabs(uv[0] - uhat));
                dv = std::max(dv, std::fabs(uv[1] - vhat));
            }
            for (int k = 1; k + 1 < th.xi_points; ++k) {
                gu = std::max(gu, std::fabs(us[static_cast<size_t>(k + 1)] -
                                            us[static_cast<size_t>(k - 1)]) /
                                      (2.0 * dxi) * std::sqrt(ln_sig));
                gv = std::max(gv, std::fabs(vs[static_cast<size_t>(k + 1)] -
                                            vs[static_cast<size_t>(k - 1)]) /
                                      (2.0 * dxi) * std::sqrt(ln_sig));
            }
        };

        scan_tau(tau_now, row.dev_u, row.dev_v, row.grad_u, row.grad_v);
        row.dev_u_sup_tau = row.dev_u;
        row.dev_v_sup_tau = row.dev_v;
        for (int k = 0; k < th.tau_points; ++k) {
            const double tau =
                tau_first + (tau_now - tau_first) * k / std::max(1, th.tau_points - 1);
            if (tau >= tau_now) break;
            double du = 0, dv = 0, gu = 0, gv = 0;
            try {
                scan_tau(tau, du, dv, gu, gv);
            } catch (const std::domain_error&) {
                continue;  // earliest snapshots may not cover the full window
            }
            row.dev_u_sup_tau = std::max(row.dev_u_sup_tau, du);
            row.dev_v_sup_tau = std::max(row.dev_v_sup_tau, dv);
        }

        row.pass = row.dev_u <= delta0 && row.dev_v <= delta0 && row.grad_u <= th.C0 &&
                   row.grad_v <= th.C0;
        rep.intermediate_pass = rep.intermediate_pass && row.pass;
        rep.intermediate.push_back(row);
    }

    // ---- regular region ----
    rep.regular_pass = true;
    const double x_end = traj.grid.y.back() * 0.98;
    const int n_reg = 16;
    for (int ix = 0; ix < n_reg; ++ix) {
        const double x = th.eps0 / 4.0 +
                         (x_end - th.eps0 / 4.0) * ix / std::max(1, n_reg - 1);
        if (x > x_end) break;
        RegularRow row;
        row.x = x;
        const double hx = traj.grid.dy();
        auto du_at = [&](double t) {
            return (traj.sample_u(x + hx, t) - traj.sample_u(x - hx, t)) / (2.0 * hx);
        };
        const double u0 = traj.sample_u(x, t0), v0 = traj.sample_v(x, t0);
        const double du0 = du_at(t0);
        for (double t : traj.times) {
            if (t < t0 || t > t_check) continue;
            row.drift0 = std::max({row.drift0, std::fabs(traj.sample_u(x, t) - u0),
                                   std::fabs(traj.sample_v(x, t) - v0)});
            row.drift1 = std::max(row.drift1, std::fabs(du_at(t) - du0));
        }
        row.pass = row.drift0 <= th.eta0 && row.drift1 <= th.eta0;
        rep.regular_pass = rep.regular_pass && row.pass;
        rep.regular.push_back(row);
    }

    // ---- final-profile comparison ----
    {
        double worst_matched = 0.0, worst_printed = 0.0;
        for (double x = 1e-3; x <= 1e-1 * (1.0 + 1e-12); x *= std::pow(10.0, 0.125)) {
            if (!traj.covers(x, t_check)) continue;
            const double u_num = traj.sample_u(x, t_check);
            const double u_match = final_profile(x, pr, FinalProfileConvention::matched)[0];
            const double u_print = final_profile(x, pr, FinalProfileConvention::theorem)[0];
            worst_matched = std::max(worst_matched,
                                     std::fabs(u_num - u_match) / std::fabs(u_match));
            worst_printed = std::max(worst_printed,
                                     std::fabs(u_num - u_print) / std::fabs(u_print));
        }
        rep.final_profile_rel_dev = worst_matched;
        rep.final_profile_rel_dev_printed = worst_printed;
    }

    rep.pass = rep.intermediate_pass && rep.regular_pass;
    return rep;
}

// Re-evaluate pass flags under different thresholds without recomputing sups.
inline bool report_passes(const RegionReport& rep, double delta0, double C0, double eta0) {
    for (const auto& r : rep.intermediate)
        if (!(r.dev_u <= delta0 && r.dev_v <= delta0 && r.grad_u <= C0 && r.grad_v <= C0))
            return false;
    for (const auto& r : rep.regular)
        if (!(r.drift0 <= eta0 && r.drift1 <= eta0)) return false;
    return true;
}

}  // namespace blowlab
