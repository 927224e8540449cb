#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "blowlab/eigensystem.hpp"
#include "blowlab/semigroup.hpp"

using namespace blowlab;
using Catch::Approx;

namespace {

std::vector<double> probe_points() {
    std::vector<double> ys;
    for (double y = -5.0; y <= 5.0 + 1e-12; y += 0.5) ys.push_back(y);
    return ys;
}

}  // namespace

TEST_CASE("semigroup fixes constants") {
    for (double eta : {1.0, 0.6, 2.7}) {
        Semigroup sg(eta);
        for (double tau : {0.05, 0.7, 3.0}) {
            for (double y : {-4.0, 0.0, 2.5})
                REQUIRE(sg.apply([](double) { return 1.0; }, tau, y) == Approx(1.0).epsilon(1e-13));
        }
    }
}

TEST_CASE("eigen-decay of Hermite modes") {
    SECTION("h2 at tau = ln 2 halves") {
        Semigroup sg(1.0);
        const auto h2 = hermite_poly<double>(2, 1.0);
        const double tau = std::log(2.0);
        for (double y : probe_points()) {
            const double got = sg.apply([&](double x) { return h2(x); }, tau, y);
            REQUIRE(std::fabs(got - 0.5 * h2(y)) < 1e-6);
        }
    }
    SECTION("e^{tau L} h_n = e^{-n tau/2} h_n for n <= 8, both weights") {
        for (double eta : {1.0, 1.9}) {
            Semigroup sg(eta);
            for (int n = 0; n <= 8; ++n) {
                const auto hn = hermite_poly<double>(n, eta);
                for (double tau : {0.1, 1.0}) {
                    const double decay = std::exp(-0.5 * n * tau);
                    for (double y : probe_points()) {
                        const double got = sg.apply([&](double x) { return hn(x); }, tau, y);
                        REQUIRE(std::fabs(got - decay * hn(y)) < 1e-6 * (1.0 + std::fabs(hn(y))));
                    }
                }
            }
        }
    }
    SECTION("rejects tau <= 0") {
        Semigroup sg(1.0);
        REQUIRE_THROWS_AS(sg.apply([](double) { return 1.0; }, 0.0, 0.0), std::domain_error);
    }
}

TEST_CASE("high modes decay at least like e^{-(M+1) tau / 2}") {
    // a degree M+2 polynomial with all modes <= M removed is a combination of
    // h_{M+1} and h_{M+2}; its weighted sup must contract accordingly
    const int M = 8;
    const double eta = 1.0;
    Semigroup sg(eta, 64);

    // start from y^{M+2} and strip every component of degree <= M
    Poly<double> g = Poly<double>::monomial(M + 2, 1.0);
    auto coeffs = to_hermite_coeffs(g, eta);
    Poly<double> high;
    for (int k = M + 1; k < static_cast<int>(coeffs.size()); ++k)
        high = high + coeffs[static_cast<size_t>(k)] * hermite_poly<double>(k, eta);

    auto wsup = [&](const std::function<double(double)>& f) {
        double s = 0.0;
        for (double y = -5.0; y <= 5.0; y += 0.25)
            s = std::max(s, std::fabs(f(y)) / (1.0 + std::pow(std::fabs(y), M + 1)));
        return s;
    };

    const double base = wsup([&](double y) { return high(y); });
    for (double tau : {0.5, 1.0, 2.0}) {
        const double evolved =
            wsup([&](double y) { return sg.apply([&](double x) { return high(x); }, tau, y); });
        REQUIRE(evolved <= 1.05 * std::exp(-0.5 * (M + 1) * tau) * base);
    }
}
