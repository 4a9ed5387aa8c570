#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace efxw {

/// Exact rational number, always in lowest terms with a positive denominator.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

/// r^e for any integer exponent; throws on 0^negative.
inline Rational pow_int(const Rational& r, long e) {
    if (e < 0) {
        if (r == 0) throw std::domain_error("zero raised to a negative power");
        return pow_int(Rational(1) / r, -e);
    }
    Rational result = 1;
    Rational base = r;
    unsigned long k = static_cast<unsigned long>(e);
    while (k != 0) {
        if (k & 1UL) result *= base;
        k >>= 1;
        if (k != 0) base *= base;
    }
    return result;
}

inline BigInt pow_int(const BigInt& b, unsigned long e) {
    BigInt out;
    mpz_pow_ui(out.backend().data(), b.backend().data(), e);
    return out;
}

/// "n" for integers, "n/d" otherwise.
inline std::string to_string(const Rational& r) { return r.str(); }

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s)
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
}

inline BigInt parse_big(std::string_view digits) { return BigInt(std::string(digits)); }

}  // namespace detail

/// Parses "12", "-3", "0.25", "1e-6", "2.5E3" or "num/den" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw ParseError("empty number");

    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den))
            throw ParseError("malformed fraction '" + std::string(text) + "'");
        BigInt d = detail::parse_big(den);
        if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        value = Rational(detail::parse_big(num), d);
    } else {
        long exponent = 0;
        if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_part = s.substr(e + 1);
            bool exp_negative = false;
            if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
                exp_negative = exp_part.front() == '-';
                exp_part.remove_prefix(1);
            }
            if (!detail::all_digits(exp_part) || exp_part.size() > 6)
                throw ParseError("malformed exponent in '" + std::string(text) + "'");
            exponent = std::stol(std::string(exp_part));
            if (exp_negative) exponent = -exponent;
            s = s.substr(0, e);
        }
        std::string_view int_part = s;
        std::string_view frac_part;
        if (auto dot = s.find('.'); dot != std::string_view::npos) {
            int_part = s.substr(0, dot);
            frac_part = s.substr(dot + 1);
        }
        if (int_part.empty() && frac_part.empty())
            throw ParseError("malformed number '" + std::string(text) + "'");
        if ((!int_part.empty() && !detail::all_digits(int_part)) ||
            (!frac_part.empty() && !detail::all_digits(frac_part)))
            throw ParseError("malformed number '" + std::string(text) + "'");
        std::string digits = std::string(int_part) + std::string(frac_part);
        value = Rational(detail::parse_big(digits));
        exponent -= static_cast<long>(frac_part.size());
        value *= pow_int(Rational(10), exponent);
    }
    return negative ? Rational(-value) : value;
}

}  // namespace efxw
