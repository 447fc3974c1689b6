#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace lachesis {

/// Exact rational number. Metric values (root knowledge k, quorum indexer h)
/// and emission thresholds are kept exact so that ordering decisions are
/// deterministic and platform independent.
using Rational = boost::multiprecision::cpp_rational;

inline Rational makeRational(std::int64_t num, std::int64_t den = 1) {
    return Rational(num, den);
}

inline double toDouble(const Rational& r) {
    return static_cast<double>(r);
}

/// "5/9", or just "5" when the denominator is 1.
inline std::string toFraction(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += "/" + denominator(r).str();
    }
    return s;
}

} // namespace lachesis
