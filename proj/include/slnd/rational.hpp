#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace slnd {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& x) { return x.template convert_to<double>(); }
inline double to_double(const Int& x) { return x.template convert_to<double>(); }

// floor division, sign of remainder follows the divisor
inline Int fdiv(const Int& a, const Int& b) {
    Int q = a / b;
    Int r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline Int lcm_int(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return abs_int(a / gcd_int(a, b) * b);
}

inline Int pow_int(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

inline Rat pow_rat(const Rat& base, int e) {
    if (e == 0) return Rat(1);
    Int num = boost::multiprecision::numerator(base);
    Int den = boost::multiprecision::denominator(base);
    if (e < 0) {
        if (num == 0) throw std::domain_error("pow_rat: zero to negative power");
        std::swap(num, den);
        e = -e;
    }
    return Rat(pow_int(num, unsigned(e)), pow_int(den, unsigned(e)));
}

// parses "p/q" or a plain integer
inline Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator");
        return Rat(p, q);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational entry '" + s + "'");
    }
}

inline std::string rational_to_string(const Rat& x) {
    Int num = boost::multiprecision::numerator(x);
    Int den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

// exact conversion; every finite double is a binary rational
inline Rat rat_from_double(double x) { return Rat(x); }

}  // namespace slnd
