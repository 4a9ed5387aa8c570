#pragma once

#include "efxw/model.hpp"
#include "efxw/rational.hpp"

#include <mpfr.h>

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace efxw {

namespace numeric {

inline std::atomic<unsigned>& precision_cap_storage() {
    static std::atomic<unsigned> cap{4096};
    return cap;
}

/// Upper bound on the interval precision used to separate algebraic values.
inline unsigned precision_cap() { return precision_cap_storage().load(std::memory_order_relaxed); }
inline void set_precision_cap(unsigned bits) { precision_cap_storage().store(bits < 128 ? 128 : bits); }

inline constexpr unsigned kStartPrecision = 128;

}  // namespace numeric

/// Owning wrapper around an mpfr_t.
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

namespace detail {

inline const std::vector<unsigned long>& small_primes() {
    static const std::vector<unsigned long> primes = [] {
        std::vector<unsigned long> out;
        std::vector<bool> composite(1001, false);
        for (unsigned long p = 2; p <= 1000; ++p) {
            if (composite[p]) continue;
            out.push_back(p);
            for (unsigned long k = p * p; k <= 1000; k += p) composite[k] = true;
        }
        return out;
    }();
    return primes;
}

/// Exact integer b-th root when x is a perfect b-th power.
inline std::optional<BigInt> exact_root(const BigInt& x, unsigned long b) {
    BigInt r;
    if (mpz_root(r.backend().data(), x.backend().data(), b) != 0) return r;
    return std::nullopt;
}

}  // namespace detail

/// Exact formal sum  sum_k c_k * N_k^(1/b)  with rational c_k and positive integer radicands N_k.
///
/// Every term shares the exponent denominator b, so the values x^q of a fixed rational q = a/b
/// live in one additive group. Radicands whose ratio is a perfect b-th power are merged before
/// a sign is taken; what remains is linearly independent over Q, so the sum is zero exactly when
/// every merged coefficient vanishes. Nonzero sums are signed with outward-rounded intervals.
class RadicalSum {
public:
    RadicalSum() = default;

    /// The rational constant c (radicand 1).
    static RadicalSum constant(const Rational& c, unsigned long root_degree = 1) {
        RadicalSum s;
        s.degree_ = root_degree;
        if (c != 0) s.terms_[BigInt(1)] = c;
        return s;
    }

    /// coef * base^exponent for base >= 0. base = 0 with a negative exponent is an error.
    static RadicalSum power(const Rational& base, const Rational& exponent, const Rational& coef = 1) {
        RadicalSum s;
        BigInt a = numerator_of(exponent);
        BigInt b = denominator_of(exponent);
        s.degree_ = b.convert_to<unsigned long>();
        if (coef == 0) return s;
        if (base == 0) {
            if (a < 0) throw std::domain_error("zero raised to a negative power");
            if (a == 0) s.terms_[BigInt(1)] = coef;
            return s;
        }
        Rational y = pow_int(base, a.convert_to<long>());
        BigInt num = numerator_of(y);
        BigInt den = denominator_of(y);
        // (num/den)^(1/b) = (num * den^(b-1))^(1/b) / den
        BigInt radicand = num * pow_int(den, s.degree_ - 1);
        s.add_term(std::move(radicand), coef / Rational(den));
        return s;
    }

    unsigned long degree() const { return degree_; }
    bool is_zero_formally() const { return terms_.empty(); }

    RadicalSum& operator+=(const RadicalSum& o) {
        adopt_degree(o);
        for (const auto& [n, c] : o.terms_) add_reduced(n, c);
        return *this;
    }
    RadicalSum& operator-=(const RadicalSum& o) {
        adopt_degree(o);
        for (const auto& [n, c] : o.terms_) add_reduced(n, -c);
        return *this;
    }
    friend RadicalSum operator+(RadicalSum a, const RadicalSum& b) { return a += b; }
    friend RadicalSum operator-(RadicalSum a, const RadicalSum& b) { return a -= b; }
    RadicalSum operator-() const {
        RadicalSum out = *this;
        for (auto& [n, c] : out.terms_) c = -c;
        return out;
    }

    RadicalSum& operator*=(const Rational& k) {
        if (k == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [n, c] : terms_) c *= k;
        return *this;
    }

    friend RadicalSum operator*(const RadicalSum& x, const RadicalSum& y) {
        RadicalSum out;
        out.adopt_degree(x);
        out.adopt_degree(y);
        for (const auto& [n1, c1] : x.terms_)
            for (const auto& [n2, c2] : y.terms_) out.add_term(n1 * n2, c1 * c2);
        return out;
    }

    /// Sign of the represented real number; exact. Throws PrecisionExhausted past the cap.
    int sign() const {
        auto classes = merged_classes();
        if (classes.empty()) return 0;
        if (classes.size() == 1) return classes.front().second > 0 ? 1 : -1;
        const unsigned cap = numeric::precision_cap();
        for (unsigned prec = numeric::kStartPrecision;; prec *= 2) {
            if (prec > cap) prec = cap;
            if (auto s = interval_sign(classes, prec); s != 0) return s;
            if (prec >= cap) break;
        }
        throw PrecisionExhausted("could not separate algebraic values within " + std::to_string(cap) + " bits");
    }

    /// Outward-rounded enclosure [lo, hi] at the given precision, written into the arguments.
    void enclose(mpfr_ptr lo, mpfr_ptr hi, mpfr_prec_t prec) const {
        enclose_classes(merged_classes(), lo, hi, prec);
    }

    friend bool operator<(const RadicalSum& a, const RadicalSum& b) { return (a - b).sign() < 0; }
    friend bool operator>(const RadicalSum& a, const RadicalSum& b) { return b < a; }
    friend bool operator<=(const RadicalSum& a, const RadicalSum& b) { return !(b < a); }
    friend bool operator>=(const RadicalSum& a, const RadicalSum& b) { return !(a < b); }
    friend bool operator==(const RadicalSum& a, const RadicalSum& b) { return (a - b).merged_classes().empty(); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [n, c] : terms_) {
            if (!out.empty()) out += " + ";
            out += to_string(c);
            if (n != 1) out += "*" + n.str() + "^(1/" + std::to_string(degree_) + ")";
        }
        return out;
    }

private:
    using Class = std::pair<BigInt, Rational>;  // radicand, coefficient

    // Degree-1 sums only carry the radicand 1, which is valid under any root degree.
    void adopt_degree(const RadicalSum& o) {
        if (o.degree_ == 0 || o.degree_ == degree_) return;
        if (degree_ == 0 || (degree_ == 1 && o.degree_ > 1) || terms_.empty()) {
            degree_ = o.degree_;
            return;
        }
        if (o.degree_ == 1 || o.terms_.empty()) return;
        throw std::logic_error("mixing radical sums of different exponents");
    }

    void add_term(BigInt radicand, const Rational& coef) {
        if (coef == 0) return;
        Rational c = coef;
        reduce(radicand, c);
        add_reduced(radicand, c);
    }

    void add_reduced(const BigInt& radicand, const Rational& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(radicand, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    // Pulls perfect b-th power factors out of the radicand (small primes, then a whole-root check).
    void reduce(BigInt& radicand, Rational& coef) const {
        if (degree_ <= 1) {
            coef *= Rational(radicand);
            radicand = 1;
            return;
        }
        if (auto r = detail::exact_root(radicand, degree_)) {
            coef *= Rational(*r);
            radicand = 1;
            return;
        }
        for (unsigned long p : detail::small_primes()) {
            BigInt pb = pow_int(BigInt(p), degree_);
            if (pb > radicand) break;
            while (radicand % pb == 0) {
                radicand /= pb;
                coef *= Rational(p);
            }
        }
    }

    std::vector<Class> merged_classes() const {
        std::vector<Class> classes;
        for (const auto& [n, c] : terms_) {
            bool merged = false;
            for (auto& [rep, total] : classes) {
                BigInt g = boost::multiprecision::gcd(n, rep);
                BigInt a = n / g;
                BigInt b = rep / g;
                auto ra = detail::exact_root(a, degree_ == 0 ? 1 : degree_);
                if (!ra) continue;
                auto rb = detail::exact_root(b, degree_ == 0 ? 1 : degree_);
                if (!rb) continue;
                total += c * Rational(*ra, *rb);
                merged = true;
                break;
            }
            if (!merged) classes.emplace_back(n, c);
        }
        std::erase_if(classes, [](const Class& cl) { return cl.second == 0; });
        return classes;
    }

    void enclose_classes(const std::vector<Class>& classes, mpfr_ptr lo, mpfr_ptr hi, mpfr_prec_t prec) const {
        mpfr_set_prec(lo, prec);
        mpfr_set_prec(hi, prec);
        mpfr_set_zero(lo, 1);
        mpfr_set_zero(hi, 1);
        Mpfr rl(prec), rh(prec), tl(prec), th(prec);
        const unsigned long b = degree_ == 0 ? 1 : degree_;
        for (const auto& [radicand, coef] : classes) {
            mpfr_set_z(rl.get(), radicand.backend().data(), MPFR_RNDD);
            mpfr_set_z(rh.get(), radicand.backend().data(), MPFR_RNDU);
            if (b > 1) {
                mpfr_rootn_ui(rl.get(), rl.get(), b, MPFR_RNDD);
                mpfr_rootn_ui(rh.get(), rh.get(), b, MPFR_RNDU);
            }
            if (coef > 0) {
                mpfr_mul_q(tl.get(), rl.get(), coef.backend().data(), MPFR_RNDD);
                mpfr_mul_q(th.get(), rh.get(), coef.backend().data(), MPFR_RNDU);
            } else {
                mpfr_mul_q(tl.get(), rh.get(), coef.backend().data(), MPFR_RNDD);
                mpfr_mul_q(th.get(), rl.get(), coef.backend().data(), MPFR_RNDU);
            }
            mpfr_add(lo, lo, tl.get(), MPFR_RNDD);
            mpfr_add(hi, hi, th.get(), MPFR_RNDU);
        }
    }

    int interval_sign(const std::vector<Class>& classes, mpfr_prec_t prec) const {
        Mpfr lo(prec), hi(prec);
        enclose_classes(classes, lo.get(), hi.get(), prec);
        if (mpfr_sgn(lo.get()) > 0) return 1;
        if (mpfr_sgn(hi.get()) < 0) return -1;
        return 0;
    }

    unsigned long degree_ = 0;
    std::map<BigInt, Rational> terms_;
};

}  // namespace efxw
