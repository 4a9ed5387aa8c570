#pragma once

#include "efxw/model.hpp"
#include "efxw/radical.hpp"
#include "efxw/rational.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace efxw {

/// v_i(A_i) for each agent, in agent order.
using UtilityProfile = std::vector<Rational>;

inline UtilityProfile utilities(const Instance& inst, const Allocation& alloc) {
    UtilityProfile u(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) u[i] = inst.bundle_value(i, alloc.bundle(i));
    return u;
}

/// How p -> -inf breaks ties between equal minima.
enum class EgalitarianOrder { Leximin, MinOnly };

/// Exactly comparable surrogate for W_p under a fixed p.
///
/// Constant monotone factors (1/n, the outer 1/p power) are dropped; for p <= 0 a profile with a
/// zero entry carries zero_flag and sits below every positive profile.
class ScoreKey {
public:
    enum class Kind { Sum, Product, NegPowerSum, PowerSum, NegRadicalSum, Leximin };

    ScoreKey() = default;

    static ScoreKey build(const UtilityProfile& u, const PExponent& p,
                          EgalitarianOrder order = EgalitarianOrder::Leximin) {
        ScoreKey k;
        k.p_ = p;
        k.order_ = order;
        bool has_zero = std::any_of(u.begin(), u.end(), [](const Rational& x) { return x == 0; });
        switch (p.tag()) {
        case PExponent::Tag::One:
            k.kind_ = Kind::Sum;
            for (const auto& x : u) k.exact_ += x;
            break;
        case PExponent::Tag::Zero:
            k.kind_ = Kind::Product;
            k.zero_flag_ = has_zero;
            if (!has_zero) {
                k.exact_ = 1;
                for (const auto& x : u) k.exact_ *= x;
            }
            break;
        case PExponent::Tag::NegInf:
            k.kind_ = Kind::Leximin;
            k.zero_flag_ = has_zero;
            if (!has_zero) {
                k.sorted_ = u;
                std::sort(k.sorted_.begin(), k.sorted_.end());
            }
            break;
        case PExponent::Tag::Neg:
            k.zero_flag_ = has_zero;
            if (p.is_integer()) {
                k.kind_ = Kind::NegPowerSum;
                if (!has_zero) {
                    long e = numerator_of(p.value()).convert_to<long>();
                    for (const auto& x : u) k.exact_ -= pow_int(x, e);
                }
            } else {
                k.kind_ = Kind::NegRadicalSum;
                if (!has_zero)
                    for (const auto& x : u) k.radical_ -= RadicalSum::power(x, p.value());
            }
            break;
        case PExponent::Tag::Pos:
            k.kind_ = Kind::PowerSum;
            for (const auto& x : u) k.radical_ += RadicalSum::power(x, p.value());
            break;
        }
        return k;
    }

    Kind kind() const { return kind_; }
    const PExponent& exponent() const { return p_; }
    bool zero_flag() const { return zero_flag_; }

    /// True when W_p = 0 under this key.
    bool is_zero_welfare() const {
        if (zero_flag_) return true;
        switch (kind_) {
        case Kind::Sum: return exact_ == 0;
        case Kind::PowerSum: return radical_.sign() == 0;
        default: return false;
        }
    }

    /// Exact body: the sum (p = 1), product (p = 0) or -sum v^p (negative integer p).
    const Rational& exact() const { return exact_; }
    /// Radical body: sum v^p (0 < p < 1) or -sum v^p (non-integer p < 0).
    const RadicalSum& radical() const { return radical_; }
    /// Ascending utilities (p -> -inf).
    const std::vector<Rational>& sorted() const { return sorted_; }

    std::string describe() const {
        if (zero_flag_) return "zero";
        switch (kind_) {
        case Kind::Sum: return "sum=" + to_string(exact_);
        case Kind::Product: return "product=" + to_string(exact_);
        case Kind::NegPowerSum: return "neg_power_sum=" + to_string(exact_);
        case Kind::PowerSum: return "power_sum=" + radical_.str();
        case Kind::NegRadicalSum: return "neg_power_sum=" + radical_.str();
        case Kind::Leximin: {
            std::string out = "sorted=[";
            for (std::size_t i = 0; i < sorted_.size(); ++i) out += (i ? "," : "") + to_string(sorted_[i]);
            return out + "]";
        }
        }
        return {};
    }

    friend std::strong_ordering operator<=>(const ScoreKey& a, const ScoreKey& b) {
        if (a.kind_ != b.kind_) throw std::logic_error("comparing score keys built for different exponents");
        if (a.zero_flag_ || b.zero_flag_) {
            if (a.zero_flag_ && b.zero_flag_) return std::strong_ordering::equal;
            return a.zero_flag_ ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        switch (a.kind_) {
        case Kind::Sum:
        case Kind::Product:
        case Kind::NegPowerSum:
            return a.exact_ == b.exact_ ? std::strong_ordering::equal
                   : a.exact_ < b.exact_ ? std::strong_ordering::less
                                         : std::strong_ordering::greater;
        case Kind::PowerSum:
        case Kind::NegRadicalSum: {
            int s = (a.radical_ - b.radical_).sign();
            return s == 0 ? std::strong_ordering::equal : s < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        case Kind::Leximin: {
            if (a.order_ == EgalitarianOrder::MinOnly || b.order_ == EgalitarianOrder::MinOnly) {
                const auto& x = a.sorted_.front();
                const auto& y = b.sorted_.front();
                return x == y ? std::strong_ordering::equal : x < y ? std::strong_ordering::less : std::strong_ordering::greater;
            }
            for (std::size_t i = 0; i < a.sorted_.size() && i < b.sorted_.size(); ++i) {
                if (a.sorted_[i] < b.sorted_[i]) return std::strong_ordering::less;
                if (b.sorted_[i] < a.sorted_[i]) return std::strong_ordering::greater;
            }
            return a.sorted_.size() <=> b.sorted_.size();
        }
        }
        return std::strong_ordering::equal;
    }

    friend bool operator==(const ScoreKey& a, const ScoreKey& b) { return (a <=> b) == 0; }

private:
    Kind kind_ = Kind::Sum;
    PExponent p_ = PExponent::one();
    EgalitarianOrder order_ = EgalitarianOrder::Leximin;
    bool zero_flag_ = false;
    Rational exact_ = 0;
    RadicalSum radical_;
    std::vector<Rational> sorted_;
};

inline ScoreKey score_key(const UtilityProfile& u, const PExponent& p,
                          EgalitarianOrder order = EgalitarianOrder::Leximin) {
    return ScoreKey::build(u, p, order);
}

/// Orders two profiles by W_p. Propagates PrecisionExhausted.
inline std::strong_ordering compare(const UtilityProfile& a, const UtilityProfile& b, const PExponent& p,
                                    EgalitarianOrder order = EgalitarianOrder::Leximin) {
    if (a.size() != b.size()) throw std::invalid_argument("profiles differ in length");
    return score_key(a, p, order) <=> score_key(b, p, order);
}

namespace detail {

// x^(a/b) for rational x > 0, as a root of the exact rational x^a.
inline void rational_power(mpfr_ptr out, const Rational& x, const Rational& q, mpfr_rnd_t rnd) {
    long a = numerator_of(q).convert_to<long>();
    unsigned long b = denominator_of(q).convert_to<unsigned long>();
    Rational y = pow_int(x, a);
    mpfr_set_q(out, y.backend().data(), rnd);
    if (b > 1) mpfr_rootn_ui(out, out, b, rnd);
}

inline std::string format_significant(mpfr_srcptr x, int digits) {
    char* buf = nullptr;
    if (mpfr_asprintf(&buf, "%.*Rg", digits, x) < 0) return "nan";
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
}

inline int digits_for_bits(unsigned bits) {
    return std::max(1, static_cast<int>(std::floor(bits * 0.30102999566398120)));
}

}  // namespace detail

/// Writes an approximation of W_p(u) into out, at out's precision. Reporting only.
inline void pmean_approx(const UtilityProfile& u, const PExponent& p, mpfr_ptr out) {
    const mpfr_prec_t target = mpfr_get_prec(out);
    const mpfr_prec_t work = target + 64;
    const auto n = static_cast<unsigned long>(u.size());
    bool has_zero = std::any_of(u.begin(), u.end(), [](const Rational& x) { return x == 0; });
    if (u.empty() || (p.is_nonpositive() && has_zero)) {
        mpfr_set_zero(out, 1);
        return;
    }
    Mpfr acc(work);
    switch (p.tag()) {
    case PExponent::Tag::One: {
        Rational mean = 0;
        for (const auto& x : u) mean += x;
        mean /= Rational(static_cast<long>(n));
        mpfr_set_q(out, mean.backend().data(), MPFR_RNDN);
        return;
    }
    case PExponent::Tag::Zero: {
        Rational prod = 1;
        for (const auto& x : u) prod *= x;
        mpfr_set_q(acc.get(), prod.backend().data(), MPFR_RNDN);
        mpfr_rootn_ui(acc.get(), acc.get(), n, MPFR_RNDN);
        mpfr_set(out, acc.get(), MPFR_RNDN);
        return;
    }
    case PExponent::Tag::NegInf: {
        Rational lo = *std::min_element(u.begin(), u.end());
        mpfr_set_q(out, lo.backend().data(), MPFR_RNDN);
        return;
    }
    case PExponent::Tag::Pos:
    case PExponent::Tag::Neg: {
        Mpfr term(work);
        mpfr_set_zero(acc.get(), 1);
        for (const auto& x : u) {
            if (x == 0) continue;
            detail::rational_power(term.get(), x, p.value(), MPFR_RNDN);
            mpfr_add(acc.get(), acc.get(), term.get(), MPFR_RNDN);
        }
        mpfr_div_ui(acc.get(), acc.get(), n, MPFR_RNDN);
        if (mpfr_zero_p(acc.get())) {
            mpfr_set_zero(out, 1);
            return;
        }
        // S^(1/q) with 1/q = b/a
        long a = numerator_of(p.value()).convert_to<long>();
        unsigned long b = denominator_of(p.value()).convert_to<unsigned long>();
        if (a < 0) mpfr_ui_div(acc.get(), 1, acc.get(), MPFR_RNDN);
        unsigned long abs_a = static_cast<unsigned long>(a < 0 ? -a : a);
        if (abs_a > 1) mpfr_rootn_ui(acc.get(), acc.get(), abs_a, MPFR_RNDN);
        if (b > 1) mpfr_pow_ui(acc.get(), acc.get(), b, MPFR_RNDN);
        mpfr_set(out, acc.get(), MPFR_RNDN);
        return;
    }
    }
}

/// Decimal approximation of W_p(u), correct to about the requested number of bits.
inline std::string pmean_value(const UtilityProfile& u, const PExponent& p, unsigned precision_bits = 64,
                               int significant_digits = 0) {
    if (precision_bits < 16) precision_bits = 16;
    Mpfr out(precision_bits);
    pmean_approx(u, p, out.get());
    int digits = significant_digits > 0 ? significant_digits : detail::digits_for_bits(precision_bits);
    return detail::format_significant(out.get(), digits);
}

}  // namespace efxw
