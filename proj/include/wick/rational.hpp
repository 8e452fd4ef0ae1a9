#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace wick {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }
inline double to_double(double x) { return x; }

/// Scalar traits shared by the exact (Rational) and floating-point lanes.
template <class K>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& x) { return x == 0; }
    static bool close(const Rational& a, const Rational& b) { return a == b; }
    static Rational from_fraction(long long num, long long den) { return Rational(num, den); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr double rel_tol = 1e-10;
    static bool is_zero(double x) { return x == 0.0; }
    static bool close(double a, double b) {
        double scale = std::max({std::abs(a), std::abs(b), 1.0});
        return std::abs(a - b) <= rel_tol * scale;
    }
    static double from_fraction(long long num, long long den) {
        return static_cast<double>(num) / static_cast<double>(den);
    }
};

inline long long factorial_ll(int n) {
    long long r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace wick
