#pragma once

#include "efxw/enumeration.hpp"
#include "efxw/fairness.hpp"
#include "efxw/model.hpp"
#include "efxw/result.hpp"
#include "efxw/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace efxw {

/// Which allocations an exhaustive search keeps.
enum class Filter { All, EF, EFX, EFX0 };

inline std::string to_string(Filter f) {
    switch (f) {
    case Filter::All: return "all";
    case Filter::EF: return "ef";
    case Filter::EFX: return "efx";
    case Filter::EFX0: return "efx0";
    }
    return "unknown";
}

inline Filter parse_filter(const std::string& text) {
    if (text == "all") return Filter::All;
    if (text == "ef") return Filter::EF;
    if (text == "efx") return Filter::EFX;
    if (text == "efx0") return Filter::EFX0;
    throw ValidationError("unknown filter '" + text + "'");
}

inline Filter filter_for(FairnessNotion notion) {
    return notion == FairnessNotion::EFX ? Filter::EFX : Filter::EFX0;
}

struct OracleOptions {
    std::uint64_t budget = default_budget();
    unsigned threads = 1;  // 0 = hardware concurrency
    EgalitarianOrder order = EgalitarianOrder::Leximin;
};

/// Calls fn on every complete allocation, good 0 varying slowest; fn returns false to stop.
inline void enumerate_allocations(const Instance& inst, const std::function<bool(const Allocation&)>& fn,
                                  std::uint64_t budget = default_budget()) {
    require_budget(inst.n(), inst.m(), budget);
    for_each_assignment(inst.n(), inst.m(),
                        [&](const std::vector<AgentId>& owner) { return fn(Allocation::from_owners(owner, inst.n())); });
}

inline std::vector<Allocation> all_allocations(const Instance& inst, std::uint64_t budget = default_budget()) {
    std::vector<Allocation> out;
    enumerate_allocations(inst, [&](const Allocation& a) {
        out.push_back(a);
        return true;
    }, budget);
    return out;
}

namespace detail {

inline Rational as_rational(std::int64_t x) { return Rational(static_cast<long long>(x)); }
inline const Rational& as_rational(const Rational& x) { return x; }
inline double as_double(std::int64_t x) { return static_cast<double>(x); }
inline double as_double(const Rational& x) { return x.convert_to<double>(); }

/// Bundle cross-values of one allocation: cross[i][j] = v_i(A_j), plus the cheapest good in A_j
/// for i (any, and positively valued), which is all the fairness notions need.
template <class V>
class AllocationView {
public:
    AllocationView(const std::vector<std::vector<V>>& values, int n, int m)
        : values_(values), n_(n), m_(m),
          cross_(static_cast<std::size_t>(n * n)), min_all_(static_cast<std::size_t>(n * n)),
          min_pos_(static_cast<std::size_t>(n * n)), has_pos_(static_cast<std::size_t>(n * n)),
          size_(static_cast<std::size_t>(n)), own_(static_cast<std::size_t>(n)) {}

    void load(const std::vector<AgentId>& owner) {
        std::fill(size_.begin(), size_.end(), 0);
        std::fill(has_pos_.begin(), has_pos_.end(), 0);
        for (auto& c : cross_) c = V(0);
        for (int g = 0; g < m_; ++g) {
            const int j = owner[g];
            const bool first = size_[j]++ == 0;
            for (int i = 0; i < n_; ++i) {
                const V& v = values_[i][g];
                const std::size_t k = idx(i, j);
                cross_[k] += v;
                if (first || v < min_all_[k]) min_all_[k] = v;
                if (v > 0 && (!has_pos_[k] || v < min_pos_[k])) {
                    min_pos_[k] = v;
                    has_pos_[k] = 1;
                }
            }
        }
        for (int i = 0; i < n_; ++i) own_[i] = cross_[idx(i, i)];
    }

    const std::vector<V>& utilities() const { return own_; }

    bool satisfies(Filter f) const {
        if (f == Filter::All) return true;
        for (int i = 0; i < n_; ++i) {
            const V& mine = own_[i];
            for (int j = 0; j < n_; ++j) {
                if (i == j || size_[j] == 0) continue;
                const std::size_t k = idx(i, j);
                if (!(mine < cross_[k])) continue;
                switch (f) {
                case Filter::EF: return false;
                case Filter::EFX0:
                    if (mine < cross_[k] - min_all_[k]) return false;
                    break;
                case Filter::EFX:
                    if (has_pos_[k] && mine < cross_[k] - min_pos_[k]) return false;
                    break;
                case Filter::All: break;
                }
            }
        }
        return true;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }

    const std::vector<std::vector<V>>& values_;
    int n_;
    int m_;
    std::vector<V> cross_, min_all_, min_pos_;
    std::vector<char> has_pos_;
    std::vector<int> size_;
    std::vector<V> own_;
};

/// Running W_p maximum over utility vectors. A cheap floating surrogate decides clear cases; any
/// comparison within its error margin is settled by exact score keys. Replacement needs a strict
/// improvement, so the earliest maximizer is kept.
template <class V>
class BestTracker {
public:
    BestTracker(const PExponent& p, EgalitarianOrder order) : p_(p), order_(order) {
        if (p.tag() == PExponent::Tag::Pos || p.tag() == PExponent::Tag::Neg) q_ = p.value().template convert_to<double>();
    }

    bool has_best() const { return has_; }
    std::uint64_t index() const { return index_; }
    const std::vector<V>& best() const { return best_.u; }

    /// Offers a candidate; returns true when it became the new best.
    bool offer(const std::vector<V>& u, std::uint64_t index) {
        Candidate c = summarize(u);
        if (has_ && compare(c, best_) <= 0) return false;
        best_ = std::move(c);
        index_ = index;
        has_ = true;
        return true;
    }

    /// Merges another tracker whose candidates all come later in canonical order.
    void merge_later(BestTracker& other) {
        if (!other.has_) return;
        if (has_ && compare(other.best_, best_) <= 0) return;
        best_ = std::move(other.best_);
        index_ = other.index_;
        has_ = true;
    }

private:
    struct Candidate {
        std::vector<V> u;
        bool zero = false;
        V sum{};
        double approx = 0;
        bool approx_ok = true;
        std::vector<V> sorted;
        std::optional<ScoreKey> key;
    };

    Candidate summarize(const std::vector<V>& u) const {
        Candidate c;
        c.u = u;
        const bool nonpositive = p_.is_nonpositive();
        for (const auto& x : u)
            if (x == 0) c.zero = nonpositive;
        switch (p_.tag()) {
        case PExponent::Tag::One:
            for (const auto& x : u) c.sum += x;
            break;
        case PExponent::Tag::NegInf:
            c.sorted = u;
            std::sort(c.sorted.begin(), c.sorted.end());
            break;
        case PExponent::Tag::Zero:
            if (!c.zero)
                for (const auto& x : u) c.approx += std::log(as_double(x));
            break;
        case PExponent::Tag::Pos:
            for (const auto& x : u) c.approx += std::pow(as_double(x), q_);
            break;
        case PExponent::Tag::Neg:
            if (!c.zero)
                for (const auto& x : u) c.approx -= std::pow(as_double(x), q_);
            break;
        }
        c.approx_ok = std::isfinite(c.approx);
        return c;
    }

    const ScoreKey& key_of(Candidate& c) {
        if (!c.key) {
            UtilityProfile r;
            r.reserve(c.u.size());
            for (const auto& x : c.u) r.push_back(as_rational(x));
            c.key = score_key(r, p_, order_);
        }
        return *c.key;
    }

    int compare(Candidate& a, Candidate& b) {
        if (p_.is_nonpositive() && (a.zero || b.zero)) return a.zero == b.zero ? 0 : (a.zero ? -1 : 1);
        switch (p_.tag()) {
        case PExponent::Tag::One: return a.sum == b.sum ? 0 : (a.sum < b.sum ? -1 : 1);
        case PExponent::Tag::NegInf: {
            if (order_ == EgalitarianOrder::MinOnly)
                return a.sorted[0] == b.sorted[0] ? 0 : (a.sorted[0] < b.sorted[0] ? -1 : 1);
            return a.sorted == b.sorted ? 0 : (a.sorted < b.sorted ? -1 : 1);
        }
        default: break;
        }
        if (a.approx_ok && b.approx_ok) {
            const double diff = a.approx - b.approx;
            const double scale = p_.tag() == PExponent::Tag::Zero
                                     ? 1.0
                                     : std::max({std::fabs(a.approx), std::fabs(b.approx), 1e-300});
            if (std::fabs(diff) > 1e-9 * scale) return diff < 0 ? -1 : 1;
        }
        auto ord = key_of(a) <=> key_of(b);
        return ord == 0 ? 0 : (ord < 0 ? -1 : 1);
    }

    PExponent p_;
    EgalitarianOrder order_;
    double q_ = 0;
    bool has_ = false;
    std::uint64_t index_ = 0;
    Candidate best_;
};

inline std::vector<AgentId> owners_at(std::uint64_t index, int n, int m) {
    std::vector<AgentId> owner(static_cast<std::size_t>(m), 0);
    for (int g = m - 1; g >= 0; --g) {
        owner[g] = static_cast<AgentId>(index % static_cast<std::uint64_t>(n));
        index /= static_cast<std::uint64_t>(n);
    }
    return owner;
}

inline unsigned resolve_threads(unsigned requested, std::uint64_t work) {
    unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (work < 4096) t = 1;
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(1, work)));
}

template <class V>
std::vector<SolverResult> scan(const Instance& inst, const std::vector<std::vector<V>>& values, const PExponent& p,
                               const std::vector<Filter>& filters, const OracleOptions& opts) {
    const int n = inst.n();
    const int m = inst.m();
    const std::uint64_t total = allocation_count(n, m);
    const unsigned threads = resolve_threads(opts.threads, total);
    using Trackers = std::vector<BestTracker<V>>;
    std::vector<Trackers> per_block(threads, Trackers(filters.size(), BestTracker<V>(p, opts.order)));

    auto run_block = [&](unsigned b) {
        const std::uint64_t lo = total / threads * b + std::min<std::uint64_t>(b, total % threads);
        const std::uint64_t hi = lo + total / threads + (b < total % threads ? 1 : 0);
        if (lo >= hi) return;
        AllocationView<V> view(values, n, m);
        std::vector<AgentId> owner = owners_at(lo, n, m);
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            view.load(owner);
            for (std::size_t f = 0; f < filters.size(); ++f)
                if (view.satisfies(filters[f])) per_block[b][f].offer(view.utilities(), idx);
            int g = m - 1;
            while (g >= 0 && owner[g] == n - 1) owner[g--] = 0;
            if (g >= 0) ++owner[g];
        }
    };

    if (threads == 1) {
        run_block(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned b = 0; b < threads; ++b) pool.emplace_back(run_block, b);
        for (auto& t : pool) t.join();
    }

    std::vector<SolverResult> out;
    for (std::size_t f = 0; f < filters.size(); ++f) {
        BestTracker<V>& best = per_block[0][f];
        for (unsigned b = 1; b < threads; ++b) best.merge_later(per_block[b][f]);
        if (!best.has_best()) {
            out.push_back(make_empty_result(inst, p, opts.order, SolveStatus::InfeasibleObjective,
                                            "no allocation passes the " + to_string(filters[f]) + " filter"));
            continue;
        }
        out.push_back(make_result(inst, Allocation::from_owners(owners_at(best.index(), n, m), n), p, opts.order));
    }
    return out;
}

}  // namespace detail

/// Exact W_p maxima over several filters in one exhaustive pass. Ties keep the earliest allocation.
inline std::vector<SolverResult> brute_opt_multi(const Instance& inst, const PExponent& p,
                                                 const std::vector<Filter>& filters, const OracleOptions& opts = {}) {
    require_budget(inst.n(), inst.m(), opts.budget);
    if (auto scaled = scaled_valuations(inst)) return detail::scan(inst, *scaled, p, filters, opts);
    return detail::scan(inst, inst.valuations(), p, filters, opts);
}

inline SolverResult brute_opt(const Instance& inst, const PExponent& p, Filter filter, const OracleOptions& opts = {}) {
    return brute_opt_multi(inst, p, {filter}, opts).front();
}

/// True when every agent values all goods equally, so an allocation matters only through its
/// bundle sizes.
inline bool has_interchangeable_goods(const Instance& inst) {
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 1; g < inst.m(); ++g)
            if (inst.value(i, g) != inst.value(i, 0)) return false;
    return true;
}

inline std::uint64_t composition_count(int n, int m) {
    // C(m + n - 1, n - 1), saturating
    std::uint64_t r = 1;
    for (int k = 1; k <= n - 1; ++k) {
        const std::uint64_t num = static_cast<std::uint64_t>(m + k);
        if (r > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
        r = r * num / static_cast<std::uint64_t>(k);
    }
    return r;
}

/// Exhaustive search over bundle-size vectors for instances with interchangeable goods. The returned
/// allocation hands goods out in order: agent 1 takes the first s_1 goods, and so on.
inline std::vector<SolverResult> size_profile_opt(const Instance& inst, const PExponent& p,
                                                  const std::vector<Filter>& filters, const OracleOptions& opts = {}) {
    if (!has_interchangeable_goods(inst))
        throw ValidationError("size-profile search needs every agent to value all goods equally");
    const int n = inst.n();
    const int m = inst.m();
    if (composition_count(n, m) > opts.budget)
        throw BudgetExceeded("size-profile search over " + std::to_string(composition_count(n, m)) +
                             " size vectors exceeds budget " + std::to_string(opts.budget));
    std::vector<Rational> rate(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rate[i] = inst.value(i, 0);

    auto passes = [&](const std::vector<int>& s, Filter f) {
        if (f == Filter::All) return true;
        for (int i = 0; i < n; ++i) {
            if (rate[i] == 0) continue;
            for (int j = 0; j < n; ++j) {
                if (i == j || s[j] == 0) continue;
                // EFX and EFX0 coincide here: every good in A_j is worth rate[i] > 0 to i.
                const int slack = f == Filter::EF ? 0 : 1;
                if (s[i] < s[j] - slack) return false;
            }
        }
        return true;
    };

    std::vector<detail::BestTracker<Rational>> trackers(filters.size(), detail::BestTracker<Rational>(p, opts.order));
    std::vector<std::vector<int>> best_sizes(filters.size());
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    UtilityProfile u(static_cast<std::size_t>(n));
    std::uint64_t index = 0;
    // Sizes in lexicographically decreasing order of (s_1, s_2, ...).
    auto visit = [&](auto&& self, int i, int left) -> void {
        if (i == n - 1) {
            s[i] = left;
            for (int a = 0; a < n; ++a) u[a] = rate[a] * s[a];
            for (std::size_t f = 0; f < filters.size(); ++f)
                if (passes(s, filters[f]) && trackers[f].offer(u, index)) best_sizes[f] = s;
            ++index;
            return;
        }
        for (int k = left; k >= 0; --k) {
            s[i] = k;
            self(self, i + 1, left - k);
        }
    };
    visit(visit, 0, m);

    std::vector<SolverResult> out;
    for (std::size_t f = 0; f < filters.size(); ++f) {
        if (!trackers[f].has_best()) {
            out.push_back(make_empty_result(inst, p, opts.order, SolveStatus::InfeasibleObjective,
                                            "no size vector passes the " + to_string(filters[f]) + " filter"));
            continue;
        }
        std::vector<Bundle> bundles(static_cast<std::size_t>(n));
        GoodId next = 0;
        for (int a = 0; a < n; ++a)
            for (int k = 0; k < best_sizes[f][a]; ++k) bundles[a].push_back(next++);
        out.push_back(make_result(inst, Allocation(std::move(bundles)), p, opts.order));
    }
    return out;
}

/// Ratio of the optimal W_p to the best fair W_p, with the exact keys kept alongside the decimal.
struct PriceReport {
    enum class Tag { Zero, Finite, Infinite };

    SolverResult opt;
    SolverResult fair;
    PExponent p = PExponent::one();
    Tag tag = Tag::Zero;
    std::string decimal;  // W_p(opt) / W_p(fair); "0" or "inf" for the other tags

    const ScoreKey& opt_key() const { return opt.key; }
    const ScoreKey& fair_key() const { return fair.key; }
};

inline std::string to_string(PriceReport::Tag t) {
    switch (t) {
    case PriceReport::Tag::Zero: return "zero";
    case PriceReport::Tag::Finite: return "finite";
    case PriceReport::Tag::Infinite: return "infinite";
    }
    return "unknown";
}

inline PriceReport make_price_report(SolverResult opt, SolverResult fair, const PExponent& p,
                                     unsigned precision_bits = 128, int digits = 12) {
    PriceReport r;
    r.p = p;
    const bool opt_zero = opt.key.is_zero_welfare();
    const bool fair_zero = fair.key.is_zero_welfare() || !fair.allocation;
    if (opt_zero && fair_zero) {
        r.tag = PriceReport::Tag::Zero;
        r.decimal = "0";
    } else if (fair_zero) {
        r.tag = PriceReport::Tag::Infinite;
        r.decimal = "inf";
    } else {
        r.tag = PriceReport::Tag::Finite;
        Mpfr a(precision_bits + 32), b(precision_bits + 32);
        pmean_approx(opt.profile, p, a.get());
        pmean_approx(fair.profile, p, b.get());
        mpfr_div(a.get(), a.get(), b.get(), MPFR_RNDN);
        r.decimal = detail::format_significant(a.get(), digits);
    }
    r.opt = std::move(opt);
    r.fair = std::move(fair);
    return r;
}

/// Decimal ratio as a double (0 or +inf for the special tags).
inline double ratio_value(const PriceReport& r) {
    if (r.tag == PriceReport::Tag::Zero) return 0.0;
    if (r.tag == PriceReport::Tag::Infinite) return std::numeric_limits<double>::infinity();
    return std::stod(r.decimal);
}

/// Exact test of W_p(opt) <= bound * W_p(fair) from the two utility profiles.
inline bool ratio_at_most(const PriceReport& r, const Rational& bound) {
    if (r.tag == PriceReport::Tag::Zero) return bound >= 0;
    if (r.tag == PriceReport::Tag::Infinite) return false;
    const UtilityProfile& a = r.opt.profile;
    const UtilityProfile& b = r.fair.profile;
    const long n = static_cast<long>(a.size());
    switch (r.p.tag()) {
    case PExponent::Tag::One: {
        Rational sa = 0, sb = 0;
        for (const auto& x : a) sa += x;
        for (const auto& x : b) sb += x;
        return sa <= bound * sb;
    }
    case PExponent::Tag::Zero: {
        Rational pa = 1, pb = 1;
        for (const auto& x : a) pa *= x;
        for (const auto& x : b) pb *= x;
        return pa <= pow_int(bound, n) * pb;
    }
    case PExponent::Tag::NegInf:
        return *std::min_element(a.begin(), a.end()) <= bound * *std::min_element(b.begin(), b.end());
    case PExponent::Tag::Pos:
    case PExponent::Tag::Neg: {
        const Rational& q = r.p.value();
        RadicalSum sa, sb;
        for (const auto& x : a) sa += RadicalSum::power(x, q);
        for (const auto& x : b) sb += RadicalSum::power(x, q);
        RadicalSum scaled = RadicalSum::power(bound, q) * sb;
        int s = (sa - scaled).sign();
        // W = (S/n)^(1/q): increasing in S for q > 0, decreasing for q < 0
        return q > 0 ? s <= 0 : s >= 0;
    }
    }
    return false;
}

inline PriceReport price_of_fairness(const Instance& inst, const PExponent& p, FairnessNotion notion,
                                     const OracleOptions& opts = {}, unsigned precision_bits = 128) {
    auto results = brute_opt_multi(inst, p, {Filter::All, filter_for(notion)}, opts);
    return make_price_report(std::move(results[0]), std::move(results[1]), p, precision_bits);
}

/// First allocation in canonical order that is fair and Pareto optimal, if any.
///
/// One pass collects the distinct utility vectors; the Pareto frontier is built by visiting them
/// in decreasing total (a dominator always has a strictly larger total); a second pass returns the
/// first fair allocation whose vector lies on the frontier.
inline std::optional<Allocation> exists_fair_po(const Instance& inst, FairnessNotion notion,
                                                std::uint64_t budget = default_budget()) {
    require_budget(inst.n(), inst.m(), budget);
    auto run = [&](const auto& values) -> std::optional<Allocation> {
        using V = typename std::decay_t<decltype(values)>::value_type::value_type;
        const int n = inst.n();
        const int m = inst.m();
        detail::AllocationView<V> view(values, n, m);
        std::set<std::vector<V>> distinct;
        for_each_assignment(n, m, [&](const std::vector<AgentId>& owner) {
            view.load(owner);
            distinct.insert(view.utilities());
            return true;
        });
        std::vector<std::pair<V, const std::vector<V>*>> order;
        for (const auto& u : distinct) {
            V total{};
            for (const auto& x : u) total += x;
            order.emplace_back(total, &u);
        }
        std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return y.first < x.first; });
        std::vector<const std::vector<V>*> frontier;
        std::set<std::vector<V>> frontier_set;
        for (const auto& [total, u] : order) {
            bool dominated = std::any_of(frontier.begin(), frontier.end(),
                                         [&](const std::vector<V>* f) { return pareto_dominates(*f, *u); });
            if (!dominated) {
                frontier.push_back(u);
                frontier_set.insert(*u);
            }
        }
        const Filter f = filter_for(notion);
        std::optional<Allocation> found;
        for_each_assignment(n, m, [&](const std::vector<AgentId>& owner) {
            view.load(owner);
            if (frontier_set.count(view.utilities()) && view.satisfies(f)) {
                found = Allocation::from_owners(owner, n);
                return false;
            }
            return true;
        });
        return found;
    };
    if (auto scaled = scaled_valuations(inst)) return run(*scaled);
    return run(inst.valuations());
}

}  // namespace efxw
