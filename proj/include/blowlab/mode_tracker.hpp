#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/eigensystem.hpp"
#include "blowlab/grid.hpp"
#include "blowlab/initial_data.hpp"
#include "blowlab/profiles.hpp"
#include "blowlab/shrinking_set.hpp"
#include "blowlab/similarity_solver.hpp"

namespace blowlab {

struct ModeRecord {
    double s = 0.0;
    std::vector<double> theta, theta_tilde;
    double remainder_norm = 0.0;
    double gradient_remainder_norm = 0.0;
    double outer_norm = 0.0;
    double overlap_norm = 0.0;  // same sup restricted to K0 sqrt(s) <= |y| <= 2 K0 sqrt(s)
    bool in_set = true;
    struct Violation {
        std::string coord;
        double margin = 0.0;  // |value| / bound
        int sign = 0;
    };
    std::optional<Violation> first_violation;
    // null-mode coordinate of the deviation from the constant equilibrium
    // (1/p, 1/q); its s->infinity trend is the -1/(2pq(mu+1)s) law
    double theta2_flat = 0.0;
};

class ModeTracker {
  public:
    ModeTracker(const EigenSystem& sys, Params pr, ShrinkingSetConfig cfg, int quad_order = 0)
        : sys_(sys), pr_(pr), cfg_(cfg),
          basis1_(1.0, sys.M, quad_order > 0 ? quad_order : 2 * sys.M + 2),
          basis_mu_(pr.mu, sys.M, quad_order > 0 ? quad_order : 2 * sys.M + 2) {
        cfg_.validate();
        // reconstruction polynomials of both families, once
        fs_.resize(static_cast<size_t>(sys.M) + 1);
        gs_.resize(static_cast<size_t>(sys.M) + 1);
        fts_.resize(static_cast<size_t>(sys.M) + 1);
        gts_.resize(static_cast<size_t>(sys.M) + 1);
        for (int n = 0; n <= sys.M; ++n) {
            eigen_polys(sys_, sys_.stable[static_cast<size_t>(n)], fs_[static_cast<size_t>(n)],
                        gs_[static_cast<size_t>(n)]);
            eigen_polys(sys_, sys_.dual[static_cast<size_t>(n)], fts_[static_cast<size_t>(n)],
                        gts_[static_cast<size_t>(n)]);
        }
    }

    const ShrinkingSetConfig& config() const { return cfg_; }

    ModeRecord track(const SimilarityState& st) const {
        const double s = st.s;
        const double quad_reach =
            std::max(std::fabs(basis1_.nodes.back()), std::fabs(basis_mu_.nodes.back()));
        if (quad_reach > st.grid.y.back())
            throw std::runtime_error("track: quadrature nodes outside grid coverage");

        // deviations from the corrected profile, interpolated as differences
        const size_t n = st.grid.y.size();
        std::vector<double> Lam(n), Ups(n);
        for (size_t i = 0; i < n; ++i) {
            const auto ap = approx_profile(st.grid.y[i], s, pr_);
            Lam[i] = st.Phi[i] - ap.phi;
            Ups[i] = st.Psi[i] - ap.psi;
        }
        auto Lam_at = [&](double y) { return cubic_interp(st.grid.y, Lam, y); };
        auto Ups_at = [&](double y) { return cubic_interp(st.grid.y, Ups, y); };

        ModeRecord rec;
        rec.s = s;
        auto md = project_modes(Lam_at, Ups_at, sys_, basis1_, basis_mu_);
        rec.theta = md.theta;
        rec.theta_tilde = md.theta_tilde;

        // flat-frame null mode
        {
            std::vector<double> LF(n), UF(n);
            for (size_t i = 0; i < n; ++i) {
                LF[i] = st.Phi[i] - 1.0 / pr_.p;
                UF[i] = st.Psi[i] - 1.0 / pr_.q;
            }
            auto mdf = project_modes([&](double y) { return cubic_interp(st.grid.y, LF, y); },
                                     [&](double y) { return cubic_interp(st.grid.y, UF, y); },
                                     sys_, basis1_, basis_mu_);
            rec.theta2_flat = mdf.theta[2];
        }

        // reconstruction of the resolved part and its derivative
        Poly<double> rf = Poly<double>::zero(), rg = Poly<double>::zero();
        for (int k = 0; k <= sys_.M; ++k) {
            const size_t kk = static_cast<size_t>(k);
            rf = rf + rec.theta[kk] * fs_[kk] + rec.theta_tilde[kk] * fts_[kk];
            rg = rg + rec.theta[kk] * gs_[kk] + rec.theta_tilde[kk] * gts_[kk];
        }
        const Poly<double> rf_d = rf.derivative(), rg_d = rg.derivative();

        // grid derivatives of the deviations
        std::vector<double> dLam(n, 0.0), dUps(n, 0.0);
        const double h = st.grid.dy();
        for (size_t i = 1; i + 1 < n; ++i) {
            dLam[i] = (Lam[i + 1] - Lam[i - 1]) / (2.0 * h);
            dUps[i] = (Ups[i + 1] - Ups[i - 1]) / (2.0 * h);
        }
        dLam[0] = dLam[1];
        dLam[n - 1] = dLam[n - 2];
        dUps[0] = dUps[1];
        dUps[n - 1] = dUps[n - 2];

        const double inner_edge = cfg_.K0 * std::sqrt(s);
        const double report_edge = std::min(2.0 * inner_edge, st.grid.y.back());
        const int report_pts = 201;
        double rem = 0.0, grad_rem = 0.0;
        for (int i = 0; i < report_pts; ++i) {
            const double y = -report_edge + 2.0 * report_edge * i / (report_pts - 1);
            const double w = 1.0 + std::pow(std::fabs(y), cfg_.M + 1);
            rem = std::max(rem, std::fabs(Lam_at(y) - rf(y)) / w);
            rem = std::max(rem, std::fabs(Ups_at(y) - rg(y)) / w);
            grad_rem = std::max(
                grad_rem, std::fabs(cubic_interp(st.grid.y, dLam, y) - rf_d(y)) / w);
            grad_rem = std::max(
                grad_rem, std::fabs(cubic_interp(st.grid.y, dUps, y) - rg_d(y)) / w);
        }
        rec.remainder_norm = rem;
        rec.gradient_remainder_norm = grad_rem;

        // cutoff-weighted outer part, plus the overlap annulus on its own
        double outer = 0.0, overlap = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double y = st.grid.y[i];
            const double one_minus_chi = 1.0 - blowup_cutoff(y, s, cfg_.K0);
            if (one_minus_chi <= 0.0) continue;
            const double v =
                one_minus_chi * std::max(std::fabs(Lam[i]), std::fabs(Ups[i]));
            outer = std::max(outer, v);
            if (std::fabs(y) <= 2.0 * inner_edge) overlap = std::max(overlap, v);
        }
        rec.outer_norm = outer;
        rec.overlap_norm = overlap;

        evaluate_bounds(rec);
        return rec;
    }

    void evaluate_bounds(ModeRecord& rec) const {
        const double s = rec.s;
        rec.in_set = true;
        rec.first_violation.reset();
        auto check = [&](const std::string& coord, double value, double bound, int sign) {
            const double margin = std::fabs(value) / bound;
            if (margin > 1.0) {
                rec.in_set = false;
                if (!rec.first_violation || margin > rec.first_violation->margin)
                    rec.first_violation = ModeRecord::Violation{coord, margin, sign};
            }
        };
        for (int j = 0; j <= cfg_.M; ++j) {
            const double v = rec.theta[static_cast<size_t>(j)];
            check("theta" + std::to_string(j), v, cfg_.theta_bound(j, s), v >= 0 ? 1 : -1);
        }
        for (int j = 0; j <= cfg_.M; ++j) {
            const double v = rec.theta_tilde[static_cast<size_t>(j)];
            check("theta_tilde" + std::to_string(j), v, cfg_.theta_tilde_bound(j, s),
                  v >= 0 ? 1 : -1);
        }
        check("remainder", rec.remainder_norm, cfg_.remainder_bound(s), 1);
        check("gradient", rec.gradient_remainder_norm, cfg_.gradient_remainder_bound(s), 1);
        check("outer", rec.outer_norm, cfg_.outer_bound(s), 1);
    }

    const HermiteBasis& basis1() const { return basis1_; }
    const HermiteBasis& basis_mu() const { return basis_mu_; }

  private:
    const EigenSystem& sys_;
    Params pr_;
    ShrinkingSetConfig cfg_;
    HermiteBasis basis1_, basis_mu_;
    std::vector<Poly<double>> fs_, gs_, fts_, gts_;
};

// Exit information extracted from a record stream.
struct TrackerExit {
    double s_exit = 0.0;
    std::string coord;
    int sign = 0;
    bool via_growing_mode = false;  // theta0 or theta1
};

inline std::optional<TrackerExit> check_exit(const std::vector<ModeRecord>& records) {
    for (const auto& r : records) {
        if (!r.in_set) {
            TrackerExit e;
            e.s_exit = r.s;
            e.coord = r.first_violation ? r.first_violation->coord : "unknown";
            e.sign = r.first_violation ? r.first_violation->sign : 0;
            e.via_growing_mode = e.coord == "theta0" || e.coord == "theta1";
            return e;
        }
    }
    return std::nullopt;
}

// Streaming flavor; feed() returns the exit as soon as it appears and the
// result matches the batch scan regardless of how records were chunked.
class ExitDetector {
  public:
    std::optional<TrackerExit> feed(const ModeRecord& r) {
        if (done_) return exit_;
        if (!r.in_set) {
            std::vector<ModeRecord> one{r};
            exit_ = check_exit(one);
            done_ = true;
            return exit_;
        }
        return std::nullopt;
    }
    std::optional<TrackerExit> result() const { return exit_; }

  private:
    bool done_ = false;
    std::optional<TrackerExit> exit_;
};

struct OdeResidualReport {
    // sup over interior records of the scaled defect of each mode law
    double growing0 = 0.0;  // |theta0' - theta0| s^2
    double growing1 = 0.0;  // |theta1' - theta1/2| s^2
    double null_mode = 0.0; // |theta2' + 2 theta2 / s| s^3
    std::vector<double> s;
    std::vector<double> growing0_series, growing1_series, null_series;
};

inline OdeResidualReport ode_residuals(const std::vector<ModeRecord>& records) {
    if (records.size() < 3)
        throw std::invalid_argument("ode_residuals: need at least 3 records");
    const double h0 = records[1].s - records[0].s;
    for (size_t i = 1; i < records.size(); ++i) {
        const double h = records[i].s - records[i - 1].s;
        if (std::fabs(h - h0) > 0.1 * h0)
            throw std::invalid_argument("ode_residuals: record spacing non-uniform beyond 10%");
    }
    OdeResidualReport rep;
    for (size_t i = 1; i + 1 < records.size(); ++i) {
        const double s = records[i].s;
        const double dd = records[i + 1].s - records[i - 1].s;
        auto diff = [&](auto get) {
            return (get(records[i + 1]) - get(records[i - 1])) / dd;
        };
        const double d0 = diff([](const ModeRecord& r) { return r.theta[0]; });
        const double d1 = diff([](const ModeRecord& r) { return r.theta[1]; });
        const double d2 = diff([](const ModeRecord& r) { return r.theta[2]; });
        const double r0 = std::fabs(d0 - records[i].theta[0]) * s * s;
        const double r1 = std::fabs(d1 - 0.5 * records[i].theta[1]) * s * s;
        const double r2 = std::fabs(d2 + 2.0 * records[i].theta[2] / s) * s * s * s;
        rep.s.push_back(s);
        rep.growing0_series.push_back(r0);
        rep.growing1_series.push_back(r1);
        rep.null_series.push_back(r2);
        rep.growing0 = std::max(rep.growing0, r0);
        rep.growing1 = std::max(rep.growing1, r1);
        rep.null_mode = std::max(rep.null_mode, r2);
    }
    return rep;
}

}  // namespace blowlab
