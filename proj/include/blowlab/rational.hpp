#pragma once

// Exact-rational instantiation point for the spectral templates. Pulled in
// only by code that needs exact builds (tests, the eigensystem dump); links
// against gmp/gmpxx.

#include <gmpxx.h>

#include <string>

namespace blowlab {

using Rational = mpq_class;

inline std::string rational_str(const Rational& r) {
    return r.get_str();
}

}  // namespace blowlab
