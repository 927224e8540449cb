#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace blowlab {

// Dense univariate polynomial with coefficients in an arbitrary field T
// (double for numerics, an exact rational type for the exact builds).
// coeff[k] multiplies y^k; trailing zeros are trimmed lazily.
template <typename T>
struct Poly {
    std::vector<T> c;

    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}

    static Poly zero() { return Poly{}; }
    static Poly constant(const T& a) { return Poly{{a}}; }
    static Poly monomial(int deg, const T& a) {
        Poly p;
        p.c.assign(static_cast<size_t>(deg) + 1, T(0));
        p.c.back() = a;
        return p;
    }

    int degree() const {
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
            if (!(c[static_cast<size_t>(k)] == T(0))) return k;
        return -1;
    }

    const T& coeff(int k) const {
        static const T zero_v = T(0);
        if (k < 0 || k >= static_cast<int>(c.size())) return zero_v;
        return c[static_cast<size_t>(k)];
    }
    void set_coeff(int k, const T& v) {
        if (k >= static_cast<int>(c.size())) c.resize(static_cast<size_t>(k) + 1, T(0));
        c[static_cast<size_t>(k)] = v;
    }

    template <typename X>
    X operator()(const X& y) const {  // Horner
        X acc = X(0);
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
            acc = acc * y + X(c[static_cast<size_t>(k)]);
        return acc;
    }

    Poly derivative() const {
        Poly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * T(static_cast<int>(k));
        return d;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.c.resize(std::max(a.c.size(), b.c.size()), T(0));
        for (size_t k = 0; k < a.c.size(); ++k) r.c[k] = r.c[k] + a.c[k];
        for (size_t k = 0; k < b.c.size(); ++k) r.c[k] = r.c[k] + b.c[k];
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r;
        r.c.resize(std::max(a.c.size(), b.c.size()), T(0));
        for (size_t k = 0; k < a.c.size(); ++k) r.c[k] = r.c[k] + a.c[k];
        for (size_t k = 0; k < b.c.size(); ++k) r.c[k] = r.c[k] - b.c[k];
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r;
        if (a.c.empty() || b.c.empty()) return r;
        r.c.assign(a.c.size() + b.c.size() - 1, T(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] = r.c[i + j] + a.c[i] * b.c[j];
        return r;
    }
    friend Poly operator*(const T& s, const Poly& a) {
        Poly r = a;
        for (auto& x : r.c) x = x * s;
        return r;
    }
};

// Generator L_eta P = eta P'' - (y/2) P'. Maps degree n to degree n and is
// lower-triangular in the monomial basis apart from the diagonal -n/2.
template <typename T>
Poly<T> apply_generator(const Poly<T>& p, const T& eta) {
    Poly<T> d1 = p.derivative();
    Poly<T> d2 = d1.derivative();
    Poly<T> drift;  // (y/2) p'
    drift.c.assign(d1.c.size() + 1, T(0));
    for (size_t k = 0; k < d1.c.size(); ++k) drift.c[k + 1] = d1.c[k] / T(2);
    return eta * d2 - drift;
}

}  // namespace blowlab
