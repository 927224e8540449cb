#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blowlab/initial_data.hpp"
#include "blowlab/mode_tracker.hpp"
#include "blowlab/similarity_solver.hpp"

namespace blowlab {

// Outcome of one candidate trajectory.
struct ExitRecord {
    double d0 = 0.0, d1 = 0.0;
    bool survived = false;
    double s_exit = 0.0;   // = s_max when survived
    std::string exit_coord;  // "theta0", "theta1", or another coordinate id
    int exit_sign = 0;
    int theta0_sign = 0, theta1_sign = 0;  // signs of the two growing modes at the end
    bool reentered = false;  // transversality probe: came back within the probe window
};

// A classifier maps a parameter pair to its exit record. The production
// classifier wraps the PDE run; tests substitute closed-form dynamics.
using Classifier = std::function<ExitRecord(double d0, double d1)>;

struct SearchLogEntry {
    double d0, d1, s_exit;
    std::string exit_coord;
    int exit_sign;
    bool survived;
};

struct SearchResult {
    double d0 = 0.0, d1 = 0.0;
    ExitRecord record;
    std::vector<SearchLogEntry> log;
    int depth_reached = 0;
    bool bracketing_held = true;  // the discrete degree condition at every level
    std::vector<double> best_exit_per_depth;
};

struct SearchBox {
    double c0 = 0.0, c1 = 0.0;  // center
    double h0 = 1.0, h1 = 1.0;  // half widths
};

namespace detail {

struct Signature {
    int s0 = 0, s1 = 0;
    bool survived = false;
};

inline Signature signature_of(const ExitRecord& r) {
    return {r.theta0_sign >= 0 ? 1 : -1, r.theta1_sign >= 0 ? 1 : -1, r.survived};
}

// all four (sign theta0, sign theta1) patterns present among the corners
inline bool brackets(const Signature& a, const Signature& b, const Signature& c,
                     const Signature& d) {
    bool seen[2][2] = {{false, false}, {false, false}};
    for (const auto& s : {a, b, c, d}) seen[s.s0 > 0][s.s1 > 0] = true;
    return seen[0][0] && seen[0][1] && seen[1][0] && seen[1][1];
}

}  // namespace detail

// Exit-time maximization by recursive rectangle subdivision. Each level
// evaluates the 3x3 stencil of the current box, keeps the quadrant whose
// corner exit-signs still realize all four sign patterns (the discrete
// degree-1 condition), and tie-breaks by the latest minimal corner exit.
// Terminates at the depth limit or at the first surviving candidate.
inline SearchResult shooting_search(const Classifier& classify, SearchBox box, int depth,
                                    bool require_initial_bracket = true) {
    SearchResult out;
    std::map<std::pair<double, double>, ExitRecord> cache;
    auto eval = [&](double d0, double d1) -> const ExitRecord& {
        auto key = std::make_pair(d0, d1);
        auto it = cache.find(key);
        if (it == cache.end()) {
            ExitRecord r = classify(d0, d1);
            r.d0 = d0;
            r.d1 = d1;
            out.log.push_back({d0, d1, r.s_exit, r.exit_coord, r.exit_sign, r.survived});
            it = cache.emplace(key, std::move(r)).first;
        }
        return it->second;
    };

    if (box.h0 <= 0.0 || box.h1 <= 0.0) {  // degenerate box: classify its center
        out.d0 = box.c0;
        out.d1 = box.c1;
        out.record = eval(box.c0, box.c1);
        return out;
    }

    for (int level = 0; level < depth; ++level) {
        const double x0 = box.c0 - box.h0, x1 = box.c0 + box.h0;
        const double y0 = box.c1 - box.h1, y1 = box.c1 + box.h1;
        const double xm = box.c0, ym = box.c1;

        const ExitRecord* corner[3][3];
        const double xs[3] = {x0, xm, x1}, ys[3] = {y0, ym, y1};
        double best_exit = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                corner[i][j] = &eval(xs[i], ys[j]);
                if (corner[i][j]->survived) {  // found a non-exiting pair
                    out.d0 = xs[i];
                    out.d1 = ys[j];
                    out.record = *corner[i][j];
                    out.depth_reached = level;
                    out.best_exit_per_depth.push_back(out.record.s_exit);
                    return out;
                }
                best_exit = std::max(best_exit, corner[i][j]->s_exit);
            }
        out.best_exit_per_depth.push_back(best_exit);

        if (level == 0 && require_initial_bracket) {
            const bool ok = detail::brackets(
                detail::signature_of(*corner[0][0]), detail::signature_of(*corner[0][2]),
                detail::signature_of(*corner[2][0]), detail::signature_of(*corner[2][2]));
            if (!ok)
                throw std::runtime_error(
                    "shooting_search: initial box boundary carries no degree (adjust A or s0)");
        }

        // four quadrants, each described by its corner indices
        struct Quad {
            int i0, j0;
            bool bracketing = false;
            double min_corner_exit = 0.0;
        };
        Quad quads[4] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        const Quad* pick = nullptr;
        for (auto& qd : quads) {
            const ExitRecord* c00 = corner[qd.i0][qd.j0];
            const ExitRecord* c10 = corner[qd.i0 + 1][qd.j0];
            const ExitRecord* c01 = corner[qd.i0][qd.j0 + 1];
            const ExitRecord* c11 = corner[qd.i0 + 1][qd.j0 + 1];
            qd.bracketing = detail::brackets(
                detail::signature_of(*c00), detail::signature_of(*c10),
                detail::signature_of(*c01), detail::signature_of(*c11));
            qd.min_corner_exit = std::min(
                std::min(c00->s_exit, c10->s_exit), std::min(c01->s_exit, c11->s_exit));
            if (qd.bracketing &&
                (pick == nullptr || qd.min_corner_exit > pick->min_corner_exit))
                pick = &qd;
        }
        if (pick == nullptr) {
            // no quadrant carries the degree; fall back to the latest-exiting one
            out.bracketing_held = false;
            for (auto& qd : quads)
                if (pick == nullptr || qd.min_corner_exit > pick->min_corner_exit) pick = &qd;
        }
        box.c0 = xs[pick->i0] + 0.5 * box.h0;
        box.c1 = ys[pick->j0] + 0.5 * box.h1;
        box.h0 *= 0.5;
        box.h1 *= 0.5;
        out.depth_reached = level + 1;
    }

    out.d0 = box.c0;
    out.d1 = box.c1;
    out.record = eval(box.c0, box.c1);
    return out;
}

// ---------------------------------------------------------------------------
// PDE-backed classifier
// ---------------------------------------------------------------------------

struct ShootingProblem {
    Params params;
    InitialDataSpec data_template;  // d0, d1 overwritten per candidate
    ShrinkingSetConfig set_config;
    double s_max = 0.0;  // default: s0 + 3 ln 10 per decade heuristic
    SearchBox box;
    int depth = 12;
    // solver wiring
    int grid_points = 1025;
    double grid_half_width_z = 0.0;  // default 4 K0
    SolverOptions solver_options;
    double transversality_probe_ds = 0.0;  // >0: continue past exit and re-check

    void finalize() {
        if (s_max <= 0.0) s_max = data_template.s0 + 3.0 * std::log(10.0);
        if (grid_half_width_z <= 0.0) grid_half_width_z = 4.0 * data_template.K0;
        set_config.A = data_template.A;
        set_config.K0 = data_template.K0;
    }
};

class PdeClassifier {
  public:
    PdeClassifier(ShootingProblem prob, const EigenSystem& sys)
        : prob_(std::move(prob)), sys_(sys),
          tracker_(sys, prob_.params, prob_.set_config) {
        prob_.finalize();
        prob_.set_config.validate();
    }

    const ShootingProblem& problem() const { return prob_; }

    ExitRecord operator()(double d0, double d1) const {
        InitialDataSpec spec = prob_.data_template;
        spec.d0 = d0;
        spec.d1 = d1;
        Grid grid(GridKind::scaled_z, prob_.grid_half_width_z, prob_.grid_points, spec.s0);
        SolverOptions opt = prob_.solver_options;
        opt.K0 = spec.K0;
        SimilaritySolver solver(prob_.params, opt);
        SimilarityState st0;
        try {
            st0 = build_initial_data(spec, prob_.params, sys_, grid);
        } catch (const std::exception& e) {
            throw std::runtime_error("classify(" + std::to_string(d0) + "," +
                                     std::to_string(d1) + "): " + e.what());
        }

        ExitRecord rec;
        rec.d0 = d0;
        rec.d1 = d1;
        std::optional<TrackerExit> exit;
        ModeRecord last{};
        auto res = solver.run(st0, prob_.s_max, [&](const SimilarityState& cur) {
            last = tracker_.track(cur);
            if (!last.in_set) {
                TrackerExit e;
                e.s_exit = last.s;
                e.coord = last.first_violation->coord;
                e.sign = last.first_violation->sign;
                e.via_growing_mode = e.coord == "theta0" || e.coord == "theta1";
                exit = e;
                return true;
            }
            return false;
        });
        (void)res;

        rec.theta0_sign = last.theta[0] >= 0 ? 1 : -1;
        rec.theta1_sign = last.theta[1] >= 0 ? 1 : -1;
        if (exit) {
            rec.survived = false;
            rec.s_exit = exit->s_exit;
            rec.exit_coord = exit->coord;
            rec.exit_sign = exit->sign;
            if (prob_.transversality_probe_ds > 0.0) {
                // continue a short stretch and confirm the trajectory stays out
                bool reentered = false;
                solver.run(res.state, exit->s_exit + prob_.transversality_probe_ds,
                           [&](const SimilarityState& cur) {
                               if (cur.s <= exit->s_exit + 1e-9) return false;
                               auto r = tracker_.track(cur);
                               if (r.in_set) reentered = true;
                               return false;
                           });
                rec.reentered = reentered;
            }
        } else {
            rec.survived = true;
            rec.s_exit = prob_.s_max;
        }
        return rec;
    }

  private:
    ShootingProblem prob_;
    const EigenSystem& sys_;
    ModeTracker tracker_;
};

}  // namespace blowlab
