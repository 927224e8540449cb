#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "blowlab/hermite.hpp"

using namespace blowlab;
using Catch::Approx;

TEST_CASE("hermite_poly explicit low orders") {
    const double eta = 1.7;
    SECTION("n=0 and n=1") {
        REQUIRE(hermite_poly<double>(0, eta).coeff(0) == 1.0);
        auto h1 = hermite_poly<double>(1, eta);
        REQUIRE(h1.coeff(1) == 1.0);
        REQUIRE(h1.coeff(0) == 0.0);
    }
    SECTION("n=2 is y^2 - 2 eta") {
        auto h2 = hermite_poly<double>(2, eta);
        REQUIRE(h2.coeff(2) == 1.0);
        REQUIRE(h2.coeff(0) == Approx(-2.0 * eta));
    }
    SECTION("n=3 is y^3 - 6 eta y") {
        auto h3 = hermite_poly<double>(3, eta);
        REQUIRE(h3.coeff(3) == 1.0);
        REQUIRE(h3.coeff(1) == Approx(-6.0 * eta));
    }
    SECTION("n=4 at y=0 gives 12 eta^2") {
        auto h4 = hermite_poly<double>(4, eta);
        REQUIRE(h4(0.0) == Approx(12.0 * eta * eta));
        REQUIRE(h4.coeff(2) == Approx(-12.0 * eta));
    }
    SECTION("leading coefficient is always 1") {
        for (int n = 0; n <= 16; ++n) REQUIRE(hermite_poly<double>(n, eta).coeff(n) == 1.0);
    }
}

TEST_CASE("hermite polynomials are eigenfunctions of the generator") {
    // L_eta h_n = -(n/2) h_n checked coefficient-wise, closed-form calculus
    for (double eta : {1.0, 0.4, 2.9}) {
        for (int n = 0; n <= 14; ++n) {
            const auto hn = hermite_poly<double>(n, eta);
            const auto lhs = apply_generator(hn, eta);
            const auto rhs = (-0.5 * n) * hn;
            const auto diff = lhs - rhs;
            double scale = 1.0;
            for (int k = 0; k <= n; ++k) scale = std::max(scale, std::fabs(hn.coeff(k)));
            for (int k = 0; k <= n; ++k)
                REQUIRE(diff.coeff(k) == Approx(0.0).margin(1e-12 * scale));
        }
    }
}

TEST_CASE("quadrature against the Gaussian weight") {
    SECTION("<1,1> = 1: the weight is a probability density") {
        for (double eta : {1.0, 0.5, 2.3}) {
            HermiteBasis b(eta, 14);
            double total = 0.0;
            for (double w : b.weights) total += w;
            REQUIRE(total == Approx(1.0).epsilon(1e-13));
        }
    }
    SECTION("orthogonality of h2 and h4 at eta=1") {
        HermiteBasis b(1.0, 14);
        const auto h2 = hermite_poly<double>(2, 1.0);
        const auto h4 = hermite_poly<double>(4, 1.0);
        const double ip = weighted_inner([&](double y) { return h2(y); },
                                         [&](double y) { return h4(y); }, b);
        REQUIRE(std::fabs(ip) < 1e-12 * hermite_norm_sq(4, 1.0));
    }
    SECTION("<h2,h2> at eta=1 equals 8") {
        // brute-force oracle: expand (y^2-2)^2 and integrate with Gaussian
        // moments m0=1, m2=2, m4=12 of the adopted weight
        const double oracle = 12.0 - 2.0 * 2.0 * 2.0 + 4.0;  // m4 - 4 m2 + 4 m0
        REQUIRE(oracle == 8.0);
        HermiteBasis b(1.0, 14);
        const auto h2 = hermite_poly<double>(2, 1.0);
        const double ip = weighted_inner([&](double y) { return h2(y); },
                                         [&](double y) { return h2(y); }, b);
        REQUIRE(ip == Approx(oracle).epsilon(1e-13));
        REQUIRE(hermite_norm_sq(2, 1.0) == Approx(oracle));
    }
    SECTION("full orthogonality up to M+2 at quadrature precision") {
        for (double eta : {1.0, 1.8}) {
            const int M = 10;
            HermiteBasis b(eta, M, 2 * M + 8);
            for (int a = 0; a <= M + 2; ++a)
                for (int c = 0; c < a; ++c) {
                    const auto ha = hermite_poly<double>(a, eta);
                    const auto hc = hermite_poly<double>(c, eta);
                    const double ip = weighted_inner([&](double y) { return ha(y); },
                                                     [&](double y) { return hc(y); }, b);
                    const double scale = std::sqrt(hermite_norm_sq(a, eta) * hermite_norm_sq(c, eta));
                    REQUIRE(std::fabs(ip) / scale < 1e-12);
                }
        }
    }
    SECTION("norm identity <hn,hn> = n! (2 eta)^n at quadrature precision") {
        const double eta = 0.9;
        HermiteBasis b(eta, 12);
        for (int n = 0; n <= 12; ++n) {
            const auto hn = hermite_poly<double>(n, eta);
            const double ip = weighted_inner([&](double y) { return hn(y); },
                                             [&](double y) { return hn(y); }, b);
            REQUIRE(ip == Approx(hermite_norm_sq(n, eta)).epsilon(1e-11));
        }
    }
    SECTION("degree-n polynomials are annihilated by higher modes") {
        const double eta = 1.3;
        HermiteBasis b(eta, 12);
        // P(y) = (1+y)^5 has degree 5; projections onto h_alpha, alpha >= 6 vanish
        auto P = [](double y) { return std::pow(1.0 + y, 5); };
        for (int a = 6; a <= 12; ++a) {
            const auto ha = hermite_poly<double>(a, eta);
            const double ip = weighted_inner(P, [&](double y) { return ha(y); }, b);
            REQUIRE(std::fabs(ip) / hermite_norm_sq(a, eta) < 1e-12);
        }
    }
    SECTION("signals non-finite samples") {
        HermiteBasis b(1.0, 8);
        REQUIRE_THROWS_AS(weighted_inner([](double) { return std::nan(""); },
                                         [](double) { return 1.0; }, b),
                          std::runtime_error);
    }
}

TEST_CASE("basis_change") {
    SECTION("identity when weights agree") {
        for (int n : {0, 1, 4, 7}) {
            auto c = basis_change<double>(n, 1.4, 1.4);
            for (int k = 0; k <= n; ++k) REQUIRE(c[static_cast<size_t>(k)] == Approx(k == n ? 1.0 : 0.0).margin(1e-14));
        }
    }
    SECTION("n=2: h2^(mu) = h2^(1) + 2(1-mu) h0^(1)") {
        const double mu = 2.6;
        auto c = basis_change<double>(2, mu, 1.0);
        REQUIRE(c[2] == Approx(1.0));
        REQUIRE(c[0] == Approx(2.0 * (1.0 - mu)));
        REQUIRE(c[1] == Approx(0.0).margin(1e-15));
    }
    SECTION("parity: odd-even coefficients vanish") {
        auto c = basis_change<double>(7, 0.7, 2.1);
        for (int k = 0; k <= 7; k += 2) REQUIRE(c[static_cast<size_t>(k)] == Approx(0.0).margin(1e-12));
    }
    SECTION("round trip through a different weight is the identity") {
        const double a = 0.8, b = 2.4;
        for (int n : {3, 6}) {
            auto fwd = basis_change<double>(n, a, b);
            // reassemble sum_k fwd[k] h_k^{(b)} and express it back over eta=a
            Poly<double> acc;
            for (int k = 0; k <= n; ++k)
                acc = acc + fwd[static_cast<size_t>(k)] * hermite_poly<double>(k, b);
            auto back = to_hermite_coeffs(acc, a);
            for (int k = 0; k <= n; ++k)
                REQUIRE(back[static_cast<size_t>(k)] == Approx(k == n ? 1.0 : 0.0).margin(1e-10));
        }
    }
}
