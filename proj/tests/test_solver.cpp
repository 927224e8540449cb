#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "blowlab/eigensystem.hpp"
#include "blowlab/physical_solver.hpp"
#include "blowlab/profiles.hpp"
#include "blowlab/similarity_solver.hpp"

using namespace blowlab;
using Catch::Approx;

namespace {

SimilarityState constant_state(const Params& pr, double s, int points = 201) {
    Grid g(GridKind::fixed_y, 6.0, points);
    return sample_state([&](double) { return 1.0 / pr.p; }, [&](double) { return 1.0 / pr.q; },
                        s, g, pr);
}

}  // namespace

TEST_CASE("constant pair is preserved to 1e-12 per step") {
    Params pr{1.3, 0.7, 2.1};
    SolverOptions opt;
    opt.custom_boundary = [&](double, double, bool first) {
        return first ? 1.0 / pr.p : 1.0 / pr.q;
    };
    SimilaritySolver solver(pr, opt);
    auto st = constant_state(pr, 10.0);
    for (int k = 0; k < 20; ++k) solver.step(st, 0.01);
    for (size_t i = 0; i < st.Phi.size(); ++i) {
        REQUIRE(std::fabs(st.Phi[i] - 1.0 / pr.p) < 1e-12);
        REQUIRE(std::fabs(st.Psi[i] - 1.0 / pr.q) < 1e-12);
    }
}

TEST_CASE("manufactured solution convergence") {
    // Phi = 1/p + g(s) cos(ky), Psi = 1/q + g(s) cos(ky), g = a e^{-(s-s0)};
    // the injected forcing makes this an exact solution
    Params pr{1.0, 1.0, 1.0};
    const double a = 0.05, kf = 1.0, s0 = 10.0;
    auto g = [&](double s) { return a * std::exp(-(s - s0)); };
    auto phim = [&](double y, double s) { return 1.0 / pr.p + g(s) * std::cos(kf * y); };
    auto psim = [&](double y, double s) { return 1.0 / pr.q + g(s) * std::cos(kf * y); };
    auto forcing = [&](double y, double s) -> std::array<double, 2> {
        const double c = std::cos(kf * y), sn = std::sin(kf * y);
        const double P = phim(y, s), Q = psim(y, s);
        const double Ps = -g(s) * c;
        const double Py = -g(s) * kf * sn;
        const double Pyy = -g(s) * kf * kf * c;
        const double f1 = Ps - (Pyy - 0.5 * y * Py - P + pr.q * P * Q - Py * Py / P);
        // symmetric ansatz: same forcing for the second component when mu=1
        return {f1, f1};
    };

    SolverOptions opt;
    opt.extra_source = forcing;
    opt.custom_boundary = [&](double y, double s, bool first) {
        return first ? phim(y, s) : psim(y, s);
    };
    SimilaritySolver solver(pr, opt);

    auto error_for = [&](int points, double ds, double s_len) {
        Grid grid(GridKind::fixed_y, 4.0, points);
        auto st = sample_state([&](double y) { return phim(y, s0); },
                               [&](double y) { return psim(y, s0); }, s0, grid, pr);
        const int nsteps = static_cast<int>(std::round(s_len / ds));
        for (int k = 0; k < nsteps; ++k) solver.step(st, ds);
        double err = 0.0;
        for (size_t i = 0; i < st.Phi.size(); ++i)
            err = std::max(err, std::fabs(st.Phi[i] - phim(st.grid.y[i], st.s)));
        return err;
    };

    SECTION("first order in time") {
        const double e1 = error_for(801, 0.02, 0.4);
        const double e2 = error_for(801, 0.01, 0.4);
        REQUIRE(e1 / e2 > 1.7);  // halving ds roughly halves the error
    }
    SECTION("second order in space") {
        const double e1 = error_for(101, 2e-5, 0.02);
        const double e2 = error_for(201, 2e-5, 0.02);
        REQUIRE(e1 / e2 > 3.0);  // halving dy quarters the error
        REQUIRE(e1 / e2 < 5.5);
    }
}

TEST_CASE("even initial data stays even") {
    Params pr{1.0, 1.0, 1.5};
    SolverOptions opt;
    opt.boundary = BoundaryMode::profile;
    SimilaritySolver solver(pr, opt);
    Grid grid(GridKind::fixed_y, 8.0, 257);
    auto st = sample_state([&](double y) { return approx_profile(y, 12.0, pr).phi; },
                           [&](double y) { return approx_profile(y, 12.0, pr).psi; }, 12.0,
                           grid, pr);
    auto res = solver.run(st, 13.0);
    const auto& f = res.state.Phi;
    const size_t n = f.size();
    for (size_t i = 0; i < n / 2; ++i) REQUIRE(std::fabs(f[i] - f[n - 1 - i]) < 1e-12);
}

TEST_CASE("zero-length run returns the state unchanged") {
    Params pr{1.1, 0.9, 1.0};
    SolverOptions opt;
    opt.boundary = BoundaryMode::profile;
    SimilaritySolver solver(pr, opt);
    auto st = constant_state(pr, 8.0);
    auto res = solver.run(st, 8.0);
    REQUIRE(res.steps == 0);
    REQUIRE(res.state.Phi == st.Phi);
    REQUIRE(res.state.Psi == st.Psi);
}

TEST_CASE("deterministic replay is bitwise identical") {
    Params pr{1.0, 1.0, 1.3};
    SolverOptions opt;
    opt.boundary = BoundaryMode::profile;
    SimilaritySolver solver(pr, opt);
    Grid grid(GridKind::scaled_z, 6.0, 301, 10.0);
    auto make = [&] {
        return sample_state([&](double y) { return approx_profile(y, 10.0, pr).phi; },
                            [&](double y) { return approx_profile(y, 10.0, pr).psi; }, 10.0,
                            grid, pr);
    };
    auto r1 = solver.run(make(), 12.0);
    auto r2 = solver.run(make(), 12.0);
    REQUIRE(r1.state.Phi == r2.state.Phi);
    REQUIRE(r1.state.Psi == r2.state.Psi);
    REQUIRE(r1.steps == r2.steps);
}

TEST_CASE("relabeling the similarity time commutes with the flow") {
    // the system is autonomous; only the boundary data knows the clock
    Params pr{1.0, 1.0, 1.0};
    SolverOptions opt;
    opt.boundary = BoundaryMode::profile;
    SimilaritySolver solver(pr, opt);
    Grid grid(GridKind::fixed_y, 8.0, 401);
    const double s0 = 15.0, shift = 5.0, len = 1.0;
    auto st_a = sample_state([&](double y) { return approx_profile(y, s0, pr).phi; },
                             [&](double y) { return approx_profile(y, s0, pr).psi; }, s0,
                             grid, pr);
    auto st_b = st_a;
    st_b.s = s0 + shift;
    auto ra = solver.run(st_a, s0 + len);
    auto rb = solver.run(st_b, s0 + shift + len);
    for (size_t i = grid.y.size() / 4; i < 3 * grid.y.size() / 4; ++i)
        REQUIRE(std::fabs(ra.state.Phi[i] - rb.state.Phi[i]) < 1e-4);
}

TEST_CASE("profile-started run keeps sqrt(s)-rate profile convergence") {
    Params pr{1.0, 1.0, 1.0};
    auto sys = build_eigensystem<double>(pr.p, pr.q, pr.mu, 10);
    SolverOptions opt;
    opt.boundary = BoundaryMode::profile;
    opt.K0 = 2.0;
    // the two growing directions amplify roundoff like e^s; long runs keep
    // them projected out (removed amplitudes are logged in the result)
    opt.stabilize_unstable = true;
    opt.eigensystem = &sys;
    SimilaritySolver solver(pr, opt);
    const double s0 = 20.0;
    Grid grid(GridKind::scaled_z, 8.0, 513, s0);
    auto st = sample_state([&](double y) { return approx_profile(y, s0, pr).phi; },
                           [&](double y) { return approx_profile(y, s0, pr).psi; }, s0, grid,
                           pr);
    std::vector<double> ss, sup_scaled;
    auto res = solver.run(st, 4.0 * s0, [&](const SimilarityState& cur) {
        double sup = 0.0;
        for (size_t i = 0; i < cur.grid.y.size(); ++i) {
            const double y = cur.grid.y[i];
            if (std::fabs(y) > opt.K0 * std::sqrt(cur.s)) continue;
            sup = std::max(sup, std::fabs(cur.Phi[i] -
                                          profile_star(y / std::sqrt(cur.s), pr).phi));
        }
        ss.push_back(cur.s);
        sup_scaled.push_back(std::sqrt(cur.s) * sup);
        return false;
    });
    REQUIRE(res.reason == StopReason::reached_end);
    REQUIRE(res.floor_activations_inner == 0);
    double lo = 1e300, hi = 0.0;
    for (double v : sup_scaled) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    REQUIRE(hi / lo < 3.0);  // stays in a x3 band: the 1/sqrt(s) rate holds
}

TEST_CASE("physical solver tracks the flat ODE system") {
    // space-independent data: du/dt = e^{pv}, dv/dt = e^{qu}; at p=q=1 and
    // u0=v0=c the exact solution is u = -ln(e^{-c} - t), T = e^{-c}
    Params pr{1.0, 1.0, 1.0};
    PhysicalOptions opt;
    opt.cfl = 5e-4;
    opt.dt_max = 5e-5;
    opt.T_hint = 1.0;
    PhysicalSolver solver(pr, opt);
    Grid grid(GridKind::fixed_y, 1.0, 9);
    PhysicalState st;
    st.t = 0.0;
    st.grid = grid;
    st.params = pr;
    st.u.assign(grid.y.size(), 0.0);  // c = 0, T = 1
    st.v.assign(grid.y.size(), 0.0);
    auto traj = solver.run(st, 1.0 - 1e-3);
    REQUIRE_FALSE(traj.overflow_stopped);
    const double got = traj.center_u.back();
    const double expect = -std::log(1.0 - traj.center_t.back());
    REQUIRE(std::fabs(got - expect) / std::fabs(expect) < 1e-6);
}

TEST_CASE("diffusion-only run conserves trapezoid mass") {
    Params pr{1.0, 1.0, 1.0};
    PhysicalOptions opt;
    opt.reaction_enabled = false;
    opt.dt_max = 1e-3;
    PhysicalSolver solver(pr, opt);
    Grid grid(GridKind::fixed_y, 3.0, 201);
    PhysicalState st;
    st.grid = grid;
    st.params = pr;
    st.u.resize(grid.y.size());
    st.v.resize(grid.y.size());
    for (size_t i = 0; i < grid.y.size(); ++i) {
        st.u[i] = std::exp(-grid.y[i] * grid.y[i]);
        st.v[i] = 0.3 * std::exp(-2.0 * grid.y[i] * grid.y[i]);
    }
    auto mass = [&](const std::vector<double>& f) {
        double m = 0.5 * (f.front() + f.back());
        for (size_t i = 1; i + 1 < f.size(); ++i) m += f[i];
        return m * grid.dy();
    };
    const double m0 = mass(st.u);
    for (int k = 0; k < 400; ++k) solver.step(st, 1e-3);
    REQUIRE(mass(st.u) == Approx(m0).epsilon(1e-10));
}

TEST_CASE("estimate_blowup_time") {
    Params pr{1.0, 2.0, 1.0};
    SECTION("recovers T exactly on the closed-form flat solution") {
        const double T = 1.0;
        std::vector<double> ts, uc;
        for (double t = 0.5; t < 0.999; t += 0.004) {
            ts.push_back(t);
            uc.push_back(-std::log(pr.p * (T - t)) / pr.q);
        }
        auto fit = estimate_blowup_time(ts, uc, pr);
        REQUIRE(fit.T == Approx(1.0).margin(1e-10));
        REQUIRE(fit.fit_residual < 1e-12);
    }
    SECTION("window stability") {
        const double T = 0.73;
        std::vector<double> ts, uc;
        for (double t = 0.3; t < T - 1e-4; t += 0.001) {
            ts.push_back(t);
            // slightly perturbed center history
            uc.push_back(-std::log(pr.p * (T - t)) / pr.q + 1e-8 * std::sin(300.0 * t));
        }
        auto f1 = estimate_blowup_time(ts, uc, pr, 0.25);
        auto f2 = estimate_blowup_time(ts, uc, pr, 0.125);
        REQUIRE(std::fabs(f1.T - f2.T) < 1e-3);
    }
    SECTION("signals non-monotone center value") {
        std::vector<double> ts, uc;
        for (double t = 0.0; t < 1.0; t += 0.01) {
            ts.push_back(t);
            uc.push_back(std::sin(20.0 * t));
        }
        REQUIRE_THROWS_AS(estimate_blowup_time(ts, uc, pr), std::runtime_error);
    }
}

TEST_CASE("physical and similarity runs agree through the transform") {
    Params pr{1.0, 1.0, 1.0};
    const double s0 = 4.0, s1 = 4.6;
    const double T = 1.0;
    const double t0 = T - std::exp(-s0), t1 = T - std::exp(-s1);

    // similarity run on a fixed-y grid
    SolverOptions sopt;
    sopt.boundary = BoundaryMode::profile;
    sopt.cfl = 0.2;
    SimilaritySolver ssolver(pr, sopt);
    Grid sgrid(GridKind::fixed_y, 6.0, 301);
    auto sim0 = sample_state([&](double y) { return approx_profile(y, s0, pr).phi; },
                             [&](double y) { return approx_profile(y, s0, pr).psi; }, s0,
                             sgrid, pr);
    auto sres = ssolver.run(sim0, s1);

    // physical run of the mapped data on a matching x-grid
    PhysicalOptions popt;
    popt.cfl = 5e-3;
    popt.dt_max = 1e-5;
    popt.T_hint = T;
    PhysicalSolver psolver(pr, popt);
    const double xext = 6.0 * std::exp(-0.5 * s0);
    Grid pgrid(GridKind::fixed_y, xext, 301);
    PhysicalState ph;
    ph.t = t0;
    ph.grid = pgrid;
    ph.params = pr;
    ph.u.resize(pgrid.y.size());
    ph.v.resize(pgrid.y.size());
    SimilarityMap map{pr, SimilarityFrame{T}};
    for (size_t i = 0; i < pgrid.y.size(); ++i) {
        const double y = pgrid.y[i] * std::exp(0.5 * s0);
        const auto ap = approx_profile(y, s0, pr);
        ph.u[i] = (std::log(ap.phi) + s0) / pr.q;
        ph.v[i] = (std::log(ap.psi) + s0) / pr.p;
    }
    auto traj = psolver.run(ph, t1);

    // compare Phi on the inner half of the box at the shared end time
    double worst = 0.0;
    for (size_t i = pgrid.y.size() / 4; i < 3 * pgrid.y.size() / 4; ++i) {
        const double x = pgrid.y[i];
        const double u = traj.sample_u(x, t1);
        const auto sp = map.forward(u, 0.0, x, t1);
        const double phi_sim = cubic_interp(sres.state.grid.y, sres.state.Phi, sp.y);
        worst = std::max(worst, std::fabs(sp.Phi - phi_sim));
    }
    REQUIRE(worst < 1e-3);
}

TEST_CASE("blowup point stays at the center node") {
    Params pr{1.0, 1.0, 1.0};
    PhysicalOptions opt;
    opt.cfl = 0.05;
    opt.T_hint = 1.0;
    PhysicalSolver solver(pr, opt);
    const double s0 = 4.0;
    Grid grid(GridKind::fixed_y, 6.0 * std::exp(-0.5 * s0), 201);
    PhysicalState st;
    st.t = 1.0 - std::exp(-s0);
    st.grid = grid;
    st.params = pr;
    st.u.resize(grid.y.size());
    st.v.resize(grid.y.size());
    for (size_t i = 0; i < grid.y.size(); ++i) {
        const double y = grid.y[i] * std::exp(0.5 * s0);
        const auto ap = approx_profile(y, s0, pr);
        st.u[i] = (std::log(ap.phi) + s0) / pr.q;
        st.v[i] = (std::log(ap.psi) + s0) / pr.p;
    }
    auto traj = solver.run(st, 1.0 - 1e-4);
    const auto& last = traj.u_snaps.back();
    size_t arg = 0;
    for (size_t i = 1; i < last.size(); ++i)
        if (last[i] > last[arg]) arg = i;
    REQUIRE(arg == last.size() / 2);
}
