#pragma once

#include "efxw/enumeration.hpp"
#include "efxw/fairness.hpp"
#include "efxw/matching.hpp"
#include "efxw/model.hpp"
#include "efxw/oracle.hpp"
#include "efxw/radical.hpp"
#include "efxw/result.hpp"
#include "efxw/welfare.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace efxw {

struct SolverOptions {
    int max_c = 3;                                  // largest surplus the enumeration accepts
    std::uint64_t oracle_budget = default_budget();  // for exhaustive fallbacks and p > 0 delegation
    EgalitarianOrder order = EgalitarianOrder::Leximin;
    unsigned threads = 1;                            // forwarded to the oracle
};

/// Non-singleton bundles of a candidate allocation: agents[t] receives bundles[t], and the
/// bundles partition `goods`.
struct HeavyPart {
    std::vector<AgentId> agents;
    Bundle goods;
    std::vector<Bundle> bundles;

    friend bool operator==(const HeavyPart&, const HeavyPart&) = default;
};

namespace detail {

/// Visits the size-k subsets of {0..n-1} in lexicographic order; fn returns false to stop.
template <class Fn>
bool for_each_subset(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return true;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        if (!fn(static_cast<const std::vector<int>&>(idx))) return false;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return true;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace detail

/// Labeled partitions of s elements into k parts of size >= 2.
inline BigInt labeled_partition_count(int s, int k) {
    // f[j][t]: t elements into j labeled parts
    std::vector<std::vector<BigInt>> f(static_cast<std::size_t>(k + 1),
                                       std::vector<BigInt>(static_cast<std::size_t>(s + 1), 0));
    f[0][0] = 1;
    for (int j = 1; j <= k; ++j)
        for (int t = 0; t <= s; ++t)
            for (int first = 2; first <= t; ++first) f[j][t] += detail::binomial(t, first) * f[j - 1][t - first];
    return f[k][s];
}

/// Closed-form number of heavy parts with |H| = k: C(n,k) * C(m,k+c) * (labeled partitions).
inline BigInt heavy_part_count(int n, int m, int k) {
    const int c = m - n;
    if (k < 0 || c < 0 || (k == 0 && c > 0)) return 0;
    return detail::binomial(n, k) * detail::binomial(m, k + c) * labeled_partition_count(k + c, k);
}

/// Every heavy part with |H| in [k_min, k_max], in canonical order (k, then H, then S, then the
/// labeled partition with good S[0] varying slowest). fn returns false to stop.
template <class Fn>
void enumerate_heavy_parts(const Instance& inst, int k_min, int k_max, Fn&& fn) {
    const int n = inst.n();
    const int m = inst.m();
    const int c = m - n;
    if (c < 0) return;
    for (int k = std::max(0, k_min); k <= std::min(k_max, n); ++k) {
        if (k == 0 && c > 0) continue;
        const int s = k + c;
        if (s > m || s < 2 * k) continue;
        bool keep_going = detail::for_each_subset(n, k, [&](const std::vector<int>& h) {
            return detail::for_each_subset(m, s, [&](const std::vector<int>& goods) {
                HeavyPart part;
                part.agents.assign(h.begin(), h.end());
                part.goods.assign(goods.begin(), goods.end());
                if (k == 0) return static_cast<bool>(fn(static_cast<const HeavyPart&>(part)));
                std::vector<int> label(static_cast<std::size_t>(s), 0);
                std::vector<int> count(static_cast<std::size_t>(k));
                while (true) {
                    std::fill(count.begin(), count.end(), 0);
                    for (int l : label) ++count[l];
                    if (std::all_of(count.begin(), count.end(), [](int x) { return x >= 2; })) {
                        part.bundles.assign(static_cast<std::size_t>(k), Bundle{});
                        for (int e = 0; e < s; ++e) part.bundles[label[e]].push_back(goods[e]);
                        if (!fn(static_cast<const HeavyPart&>(part))) return false;
                    }
                    int e = s - 1;
                    while (e >= 0 && label[e] == k - 1) label[e--] = 0;
                    if (e < 0) break;
                    ++label[e];
                }
                return true;
            });
        });
        if (!keep_going) return;
    }
}

inline std::vector<HeavyPart> heavy_parts(const Instance& inst, int k_min, int k_max) {
    std::vector<HeavyPart> out;
    enumerate_heavy_parts(inst, k_min, k_max, [&](const HeavyPart& part) {
        out.push_back(part);
        return true;
    });
    return out;
}

/// True when every agent values every good positively.
inline bool is_nmu(const Instance& inst) {
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 0; g < inst.m(); ++g)
            if (inst.value(i, g) <= 0) return false;
    return true;
}

namespace detail {

/// Best completion of a square light graph under the kernel matching p. Entries hold v_l(g) for
/// admissible edges only.
inline std::optional<Matching> complete_light(const std::vector<std::vector<std::optional<Rational>>>& values,
                                              const PExponent& p) {
    const int n = static_cast<int>(values.size());
    auto build = [&](auto weight) {
        using W = decltype(weight(Rational(1)));
        BipartiteWeights<W> g(n, n);
        for (int l = 0; l < n; ++l)
            for (int r = 0; r < n; ++r)
                if (values[l][r]) g.add_edge(l, r, weight(*values[l][r]));
        return g;
    };
    switch (p.tag()) {
    case PExponent::Tag::One: return max_weight_perfect(build([](const Rational& v) { return v; }));
    case PExponent::Tag::Pos: {
        const Rational q = p.value();
        return max_weight_perfect(build([&](const Rational& v) { return RadicalSum::power(v, q); }));
    }
    case PExponent::Tag::Zero:
        return max_weight_perfect(build([](const Rational& v) { return MultiplicativeWeight(v); }));
    case PExponent::Tag::Neg: {
        const Rational q = p.value();
        if (p.is_integer()) {
            const long e = numerator_of(q).convert_to<long>();
            return min_cost_perfect(build([&](const Rational& v) { return pow_int(v, e); }));
        }
        return min_cost_perfect(build([&](const Rational& v) { return RadicalSum::power(v, q); }));
    }
    case PExponent::Tag::NegInf: return bottleneck_perfect(build([](const Rational& v) { return v; }));
    }
    return std::nullopt;
}

/// Heavy-part search for the best positive-welfare allocation, optionally restricted to a fairness
/// notion through the threshold conditions on heavy pairs and light edges.
class PartSearch {
public:
    PartSearch(const Instance& inst, const PExponent& p, EgalitarianOrder order, std::optional<FairnessNotion> notion)
        : inst_(inst), p_(p), order_(order), notion_(notion) {}

    std::optional<SolverResult> run() {
        const int c = surplus(inst_);
        const int k_min = c == 0 ? 0 : 1;
        enumerate_heavy_parts(inst_, k_min, c, [&](const HeavyPart& part) {
            consider(part);
            return true;
        });
        return std::move(best_);
    }

private:
    const Rational& threshold(AgentId x, const Bundle& b) {
        auto key = std::make_pair(x, b);
        auto it = tau_cache_.find(key);
        if (it == tau_cache_.end()) it = tau_cache_.emplace(std::move(key), tau(inst_, x, b, *notion_)).first;
        return it->second;
    }

    void consider(const HeavyPart& part) {
        const int n = inst_.n();
        const std::size_t k = part.agents.size();
        for (std::size_t t = 0; t < k; ++t)
            if (inst_.bundle_value(part.agents[t], part.bundles[t]) <= 0) return;
        if (notion_) {
            for (std::size_t a = 0; a < k; ++a) {
                const Rational own = inst_.bundle_value(part.agents[a], part.bundles[a]);
                for (std::size_t i = 0; i < k; ++i)
                    if (a != i && own < threshold(part.agents[a], part.bundles[i])) return;
            }
        }

        std::vector<char> heavy(static_cast<std::size_t>(n), 0), used(static_cast<std::size_t>(inst_.m()), 0);
        for (AgentId a : part.agents) heavy[a] = 1;
        for (GoodId g : part.goods) used[g] = 1;
        std::vector<AgentId> light;
        std::vector<GoodId> rest;
        for (AgentId a = 0; a < n; ++a)
            if (!heavy[a]) light.push_back(a);
        for (GoodId g = 0; g < inst_.m(); ++g)
            if (!used[g]) rest.push_back(g);

        std::vector<std::vector<std::optional<Rational>>> values(
            light.size(), std::vector<std::optional<Rational>>(rest.size()));
        for (std::size_t l = 0; l < light.size(); ++l) {
            Rational floor = 0;
            if (notion_)
                for (std::size_t t = 0; t < k; ++t) floor = std::max(floor, threshold(light[l], part.bundles[t]));
            bool any = false;
            for (std::size_t r = 0; r < rest.size(); ++r) {
                const Rational& v = inst_.value(light[l], rest[r]);
                if (v > 0 && v >= floor) {
                    values[l][r] = v;
                    any = true;
                }
            }
            if (!any) return;
        }
        auto matching = complete_light(values, p_);
        if (!matching) return;

        std::vector<Bundle> bundles(static_cast<std::size_t>(n));
        for (std::size_t t = 0; t < k; ++t) bundles[part.agents[t]] = part.bundles[t];
        for (std::size_t l = 0; l < light.size(); ++l) bundles[light[l]] = {rest[(*matching)[l]]};
        SolverResult candidate = make_result(inst_, Allocation(std::move(bundles)), p_, order_);
        if (!best_ || best_->key < candidate.key) best_ = std::move(candidate);
    }

    const Instance& inst_;
    PExponent p_;
    EgalitarianOrder order_;
    std::optional<FairnessNotion> notion_;
    std::map<std::pair<AgentId, Bundle>, Rational> tau_cache_;
    std::optional<SolverResult> best_;
};

/// Allocation with every bundle of size <= 1 where possible: a maximum positive-value matching,
/// then unmatched goods to agents still empty, then any leftovers to agent 0.
inline Allocation singleton_style(const Instance& inst) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 0; g < inst.m(); ++g)
            if (inst.value(i, g) > 0) adj[i].push_back(g);
    Matching match = max_cardinality(inst.n(), inst.m(), adj);
    std::vector<Bundle> bundles(static_cast<std::size_t>(inst.n()));
    std::vector<char> taken(static_cast<std::size_t>(inst.m()), 0);
    for (int i = 0; i < inst.n(); ++i)
        if (match[i] >= 0) {
            bundles[i].push_back(match[i]);
            taken[match[i]] = 1;
        }
    int next_agent = 0;
    for (GoodId g = 0; g < inst.m(); ++g) {
        if (taken[g]) continue;
        while (next_agent < inst.n() && !bundles[next_agent].empty()) ++next_agent;
        bundles[next_agent < inst.n() ? next_agent : 0].push_back(g);
    }
    return Allocation(std::move(bundles));
}

inline bool has_positive_perfect_cover(const Instance& inst) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 0; g < inst.m(); ++g)
            if (inst.value(i, g) > 0) adj[i].push_back(g);
    return matching_size(max_cardinality(inst.n(), inst.m(), adj)) == inst.n();
}

inline void require_surplus_budget(int c, int max_c) {
    if (c > max_c)
        throw BudgetExceeded("surplus c = " + std::to_string(c) + " exceeds the configured maximum " +
                             std::to_string(max_c));
}

inline OracleOptions oracle_options(const SolverOptions& opts) {
    OracleOptions o;
    o.budget = opts.oracle_budget;
    o.threads = opts.threads;
    o.order = opts.order;
    return o;
}

inline SolverResult delegate_to_oracle(const Instance& inst, const PExponent& p, Filter filter,
                                       const SolverOptions& opts) {
    if (allocation_count(inst.n(), inst.m()) > opts.oracle_budget)
        throw HardnessError("W_p optimization for p = " + p.str() +
                            " is NP-hard in general; instance exceeds the exhaustive budget of " +
                            std::to_string(opts.oracle_budget) + " allocations");
    SolverResult r = brute_opt(inst, p, filter, oracle_options(opts));
    r.note = "exhaustive search";
    return r;
}

}  // namespace detail

/// W_p-maximizing complete allocation over all allocations (p <= 0; p > 0 goes to the oracle).
inline SolverResult global_optimum(const Instance& inst, const PExponent& p, const SolverOptions& opts = {}) {
    validate_instance(inst, true);
    if (p.is_positive()) return detail::delegate_to_oracle(inst, p, Filter::All, opts);
    const int c = surplus(inst);
    if (c < 0 || !detail::has_positive_perfect_cover(inst)) {
        SolverResult r = make_result(inst, detail::singleton_style(inst), p, opts.order);
        r.status = SolveStatus::NoPositiveWelfare;
        r.note = c < 0 ? "fewer goods than agents" : "no allocation gives every agent positive value";
        return r;
    }
    detail::require_surplus_budget(c, opts.max_c);
    auto best = detail::PartSearch(inst, p, opts.order, std::nullopt).run();
    if (!best) return make_empty_result(inst, p, opts.order, SolveStatus::NoPositiveWelfare);
    return *best;
}

/// Best allocation among the EFX (or EFX0) ones.
inline SolverResult optimize_within_fair(const Instance& inst, const PExponent& p, FairnessNotion notion,
                                         const SolverOptions& opts = {});

/// Within-fair optimum when every value is positive (EFX and EFX0 coincide), for any p <= 1.
inline SolverResult solve_nmu(const Instance& inst, const PExponent& p, FairnessNotion notion,
                              const SolverOptions& opts = {}) {
    validate_instance(inst);
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 0; g < inst.m(); ++g)
            if (inst.value(i, g) == 0)
                throw ValidationError("instance is not NMU: agent " + inst.agent_name(i) + " values good " +
                                          inst.good_name(g) + " at 0",
                                      static_cast<std::size_t>(i));
    const int c = surplus(inst);
    if (c < 0) {
        if (p.is_nonpositive()) {
            SolverResult r = make_result(inst, detail::singleton_style(inst), p, opts.order);
            r.status = SolveStatus::NoPositiveWelfare;
            r.note = "fewer goods than agents";
            return r;
        }
        // Goods to distinct agents, maximizing sum v^p; padding columns carry the zero weight.
        const int n = inst.n();
        std::optional<Matching> match;
        if (p.tag() == PExponent::Tag::One) {
            BipartiteWeights<Rational> g(n, n);
            for (int i = 0; i < n; ++i)
                for (int r = 0; r < n; ++r) g.add_edge(i, r, r < inst.m() ? inst.value(i, r) : Rational(0));
            match = max_weight_perfect(g);
        } else {
            BipartiteWeights<RadicalSum> g(n, n);
            for (int i = 0; i < n; ++i)
                for (int r = 0; r < n; ++r)
                    g.add_edge(i, r, r < inst.m() ? RadicalSum::power(inst.value(i, r), p.value())
                                                  : RadicalSum::constant(0, denominator_of(p.value()).convert_to<unsigned long>()));
            match = max_weight_perfect(g);
        }
        std::vector<Bundle> bundles(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            if ((*match)[i] < inst.m()) bundles[i].push_back((*match)[i]);
        return make_result(inst, Allocation(std::move(bundles)), p, opts.order);
    }
    detail::require_surplus_budget(c, opts.max_c);
    auto best = detail::PartSearch(inst, p, opts.order, notion).run();
    if (!best) return make_empty_result(inst, p, opts.order, SolveStatus::InfeasibleObjective,
                                        "no fair completion found");
    return *best;
}

inline SolverResult optimize_within_fair(const Instance& inst, const PExponent& p, FairnessNotion notion,
                                         const SolverOptions& opts) {
    validate_instance(inst, true);
    if (p.is_positive()) {
        if (is_nmu(inst)) return solve_nmu(inst, p, notion, opts);
        return detail::delegate_to_oracle(inst, p, filter_for(notion), opts);
    }
    const int c = surplus(inst);
    if (c <= 0 && (c < 0 || !detail::has_positive_perfect_cover(inst))) {
        // Bundles of size <= 1 are always EFX0.
        SolverResult r = make_result(inst, detail::singleton_style(inst), p, opts.order);
        r.status = SolveStatus::NoPositiveWelfare;
        r.note = "every allocation has welfare 0";
        return r;
    }
    detail::require_surplus_budget(c, opts.max_c);
    if (auto best = detail::PartSearch(inst, p, opts.order, notion).run()) return *best;

    if (c > 3)
        return make_empty_result(inst, p, opts.order, SolveStatus::InfeasibleObjective,
                                 "no positive-welfare fair allocation; existence is open beyond c = 3");
    if (allocation_count(inst.n(), inst.m()) <= opts.oracle_budget) {
        SolverResult r = brute_opt(inst, p, filter_for(notion), detail::oracle_options(opts));
        if (r.allocation) {
            r.status = SolveStatus::NoPositiveWelfare;
            r.note = "no positive-welfare fair allocation; fair allocation found by exhaustive search";
            return r;
        }
    }
    return make_empty_result(inst, p, opts.order, SolveStatus::NoPositiveWelfare,
                             "no positive-welfare fair allocation; constructing one is not implemented");
}

struct CompatibilityResult {
    bool compatible = false;
    std::optional<Allocation> allocation;  // fair and globally optimal, when compatible
    SolverResult global;
    SolverResult fair;
};

/// Whether some fair allocation attains the unconstrained W_p optimum.
inline CompatibilityResult decide_compatibility(const Instance& inst, const PExponent& p, FairnessNotion notion,
                                                const SolverOptions& opts = {}) {
    CompatibilityResult out;
    out.global = global_optimum(inst, p, opts);
    if (surplus(inst) <= 0 && p.is_nonpositive()) {
        // The singleton optimum is EFX0.
        out.fair = out.global;
        out.compatible = out.global.allocation.has_value();
        out.allocation = out.global.allocation;
        return out;
    }
    out.fair = optimize_within_fair(inst, p, notion, opts);
    out.compatible = out.fair.allocation.has_value() && out.fair.key == out.global.key;
    if (out.compatible) out.allocation = out.fair.allocation;
    return out;
}

/// Price of fairness from the solver (p <= 0) instead of exhaustive search.
inline PriceReport solver_price(const Instance& inst, const PExponent& p, FairnessNotion notion,
                                const SolverOptions& opts = {}, unsigned precision_bits = 128) {
    return make_price_report(global_optimum(inst, p, opts), optimize_within_fair(inst, p, notion, opts), p,
                             precision_bits);
}

}  // namespace efxw
