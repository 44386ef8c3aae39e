#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qwz {

using Integer  = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Variable-precision binary float.  Precision is set process-wide from the
// truncation policy before any evaluation starts.
using Real = boost::multiprecision::mpfr_float;

inline void set_working_precision(unsigned decimal_digits) {
    Real::default_precision(decimal_digits + 15);
}

struct ParseError : std::runtime_error {
    std::size_t pos;
    ParseError(const std::string& msg, std::size_t p)
        : std::runtime_error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts "p", "p/q", decimal ("0.25") and scientific ("1e-30") literals,
// all converted exactly to a rational.
inline Rational parse_rational(std::string_view s) {
    std::string t(s);
    if (t.empty()) throw ParseError("empty rational literal", 0);
    auto epos = t.find_first_of("eE");
    long expo10 = 0;
    if (epos != std::string::npos && t.find('/') == std::string::npos) {
        expo10 = std::stol(t.substr(epos + 1));
        t = t.substr(0, epos);
    }
    Rational r;
    auto dot = t.find('.');
    try {
        if (dot != std::string::npos) {
            std::string digits = t.substr(0, dot) + t.substr(dot + 1);
            long frac = static_cast<long>(t.size() - dot - 1);
            bool neg = !digits.empty() && digits[0] == '-';
            std::string mag = neg ? digits.substr(1) : digits;
            auto nz = mag.find_first_not_of('0');
            mag = (nz == std::string::npos) ? "0" : mag.substr(nz);
            r = Rational(Integer((neg ? "-" : "") + mag));
            expo10 -= frac;
        } else {
            r = Rational(t);
        }
    } catch (const std::exception&) {
        throw ParseError("bad rational literal '" + std::string(s) + "'", 0);
    }
    if (expo10 > 0)
        r *= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(expo10)));
    else if (expo10 < 0)
        r /= Rational(boost::multiprecision::pow(Integer(10), static_cast<unsigned>(-expo10)));
    return r;
}

inline Real to_real(const Rational& r) {
    Real num(numerator(r));
    Real den(denominator(r));
    return num / den;
}

inline Rational rational_pow(const Rational& b, long e) {
    if (e == 0) return Rational(1);
    if (e > 0) {
        Rational r(boost::multiprecision::pow(numerator(b), static_cast<unsigned>(e)),
                   boost::multiprecision::pow(denominator(b), static_cast<unsigned>(e)));
        return r;
    }
    if (b == 0) throw PoleError("0 raised to a negative power");
    return 1 / rational_pow(b, -e);
}

} // namespace qwz
