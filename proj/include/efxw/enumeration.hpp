#pragma once

#include "efxw/model.hpp"

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace efxw {

inline constexpr std::uint64_t kDefaultBudget = 100'000'000;

/// Oracle budget: EFXW_BUDGET when set to a positive integer, else 10^8.
inline std::uint64_t default_budget() {
    if (const char* env = std::getenv("EFXW_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return kDefaultBudget;
}

/// n^m, saturating at UINT64_MAX.
inline std::uint64_t allocation_count(int n, int m) {
    std::uint64_t total = 1;
    for (int g = 0; g < m; ++g) {
        if (total > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(n))
            return std::numeric_limits<std::uint64_t>::max();
        total *= static_cast<std::uint64_t>(n);
    }
    return total;
}

inline void require_budget(int n, int m, std::uint64_t budget) {
    std::uint64_t count = allocation_count(n, m);
    if (count > budget)
        throw BudgetExceeded("exhaustive search over " + std::to_string(n) + "^" + std::to_string(m) +
                             " allocations exceeds budget " + std::to_string(budget));
}

/// Visits every good -> agent map, good 0 varying slowest. fn(owner) returns false to stop.
template <class Fn>
void for_each_assignment(int n, int m, Fn&& fn) {
    std::vector<AgentId> owner(static_cast<std::size_t>(m), 0);
    while (true) {
        if (!fn(static_cast<const std::vector<AgentId>&>(owner))) return;
        int g = m - 1;
        while (g >= 0 && owner[g] == n - 1) owner[g--] = 0;
        if (g < 0) return;
        ++owner[g];
    }
}

/// Integer valuations proportional to the rational ones (common denominator), when every bundle
/// value stays well inside int64. Orderings of sums are preserved exactly.
inline std::optional<std::vector<std::vector<std::int64_t>>> scaled_valuations(const Instance& inst) {
    BigInt lcm = 1;
    for (const auto& row : inst.valuations())
        for (const auto& v : row) {
            BigInt d = denominator_of(v);
            lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
        }
    const BigInt limit = BigInt(std::numeric_limits<std::int64_t>::max() / 4) / BigInt(std::max(1, inst.m()));
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(inst.n()));
    for (int i = 0; i < inst.n(); ++i) {
        out[i].reserve(static_cast<std::size_t>(inst.m()));
        for (int g = 0; g < inst.m(); ++g) {
            BigInt scaled = numerator_of(inst.value(i, g)) * (lcm / denominator_of(inst.value(i, g)));
            if (scaled > limit) return std::nullopt;
            out[i].push_back(scaled.convert_to<std::int64_t>());
        }
    }
    return out;
}

}  // namespace efxw
