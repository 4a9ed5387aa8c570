#pragma once

#include "efxw/enumeration.hpp"
#include "efxw/model.hpp"
#include "efxw/welfare.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace efxw {

/// Agent `envier` prefers `envied`'s bundle, after dropping `dropped_good` when present.
struct EnvyWitness {
    AgentId envier = 0;
    AgentId envied = 0;
    std::optional<GoodId> dropped_good;
    Rational lhs;  // v_envier(A_envier)
    Rational rhs;  // v_envier(A_envied \ {dropped_good})

    friend bool operator==(const EnvyWitness&, const EnvyWitness&) = default;
};

/// Largest value x can see in B after one droppable good is removed.
///
/// EFX0 may drop any good; EFX only goods x values positively, and yields 0 when there is none.
inline Rational tau(const Instance& inst, AgentId x, const Bundle& bundle, FairnessNotion notion) {
    if (bundle.empty()) throw ValidationError("tau of an empty bundle");
    Rational total = inst.bundle_value(x, bundle);
    std::optional<Rational> cheapest;
    for (GoodId g : bundle) {
        const Rational& v = inst.value(x, g);
        if (notion == FairnessNotion::EFX && v == 0) continue;
        if (!cheapest || v < *cheapest) cheapest = v;
    }
    if (!cheapest) return 0;
    return total - *cheapest;
}

/// First violation in (envier, envied, good) order, or nullopt when alloc satisfies the notion.
inline std::optional<EnvyWitness> is_fair(const Instance& inst, const Allocation& alloc, FairnessNotion notion) {
    const UtilityProfile own = utilities(inst, alloc);
    for (AgentId i = 0; i < inst.n(); ++i) {
        for (AgentId j = 0; j < inst.n(); ++j) {
            if (i == j || alloc.bundle(j).empty()) continue;
            Rational other = inst.bundle_value(i, alloc.bundle(j));
            if (other <= own[i]) continue;
            for (GoodId g : alloc.bundle(j)) {
                if (notion == FairnessNotion::EFX && inst.value(i, g) == 0) continue;
                Rational rest = other - inst.value(i, g);
                if (own[i] < rest) return EnvyWitness{i, j, g, own[i], rest};
            }
        }
    }
    return std::nullopt;
}

inline std::optional<EnvyWitness> is_envy_free(const Instance& inst, const Allocation& alloc) {
    const UtilityProfile own = utilities(inst, alloc);
    for (AgentId i = 0; i < inst.n(); ++i)
        for (AgentId j = 0; j < inst.n(); ++j) {
            if (i == j) continue;
            Rational other = inst.bundle_value(i, alloc.bundle(j));
            if (own[i] < other) return EnvyWitness{i, j, std::nullopt, own[i], other};
        }
    return std::nullopt;
}

/// True when `a` weakly improves every entry of `b` and strictly improves one.
template <class T>
bool pareto_dominates(const std::vector<T>& a, const std::vector<T>& b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (b[i] < a[i]) strict = true;
    }
    return strict;
}

struct ParetoResult {
    bool optimal = true;
    std::optional<Allocation> dominator;  // first in canonical order
};

/// Exhaustive Pareto-optimality certificate. Throws BudgetExceeded when n^m > budget.
inline ParetoResult is_pareto_optimal(const Instance& inst, const Allocation& alloc,
                                      std::uint64_t budget = default_budget()) {
    require_budget(inst.n(), inst.m(), budget);
    ParetoResult result;
    const int n = inst.n();
    if (auto scaled = scaled_valuations(inst)) {
        std::vector<std::int64_t> target(static_cast<std::size_t>(n), 0), u(static_cast<std::size_t>(n));
        for (AgentId i = 0; i < n; ++i)
            for (GoodId g : alloc.bundle(i)) target[i] += (*scaled)[i][g];
        for_each_assignment(n, inst.m(), [&](const std::vector<AgentId>& owner) {
            std::fill(u.begin(), u.end(), 0);
            for (std::size_t g = 0; g < owner.size(); ++g) u[owner[g]] += (*scaled)[owner[g]][g];
            if (pareto_dominates(u, target)) {
                result.optimal = false;
                result.dominator = Allocation::from_owners(owner, n);
                return false;
            }
            return true;
        });
        return result;
    }
    const UtilityProfile target = utilities(inst, alloc);
    UtilityProfile u(static_cast<std::size_t>(n));
    for_each_assignment(n, inst.m(), [&](const std::vector<AgentId>& owner) {
        std::fill(u.begin(), u.end(), Rational(0));
        for (std::size_t g = 0; g < owner.size(); ++g) u[owner[g]] += inst.value(owner[g], static_cast<GoodId>(g));
        if (pareto_dominates(u, target)) {
            result.optimal = false;
            result.dominator = Allocation::from_owners(owner, n);
            return false;
        }
        return true;
    });
    return result;
}

}  // namespace efxw
