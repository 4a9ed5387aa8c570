#pragma once

// Reference implementations written straight from the definitions, sharing no code paths with
// the library's search and matching kernels.

#include "efxw/efxw.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace ref {

using efxw::Instance;
using efxw::Rational;
using Float = boost::multiprecision::cpp_bin_float_50;

/// All good -> agent maps, by recursion.
inline void each_owner_map(int n, int m, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> owner(static_cast<std::size_t>(m));
    std::function<void(int)> rec = [&](int g) {
        if (g == m) {
            fn(owner);
            return;
        }
        for (int a = 0; a < n; ++a) {
            owner[g] = a;
            rec(g + 1);
        }
    };
    rec(0);
}

inline std::vector<Rational> utilities(const Instance& inst, const std::vector<int>& owner) {
    std::vector<Rational> u(static_cast<std::size_t>(inst.n()), Rational(0));
    for (std::size_t g = 0; g < owner.size(); ++g) u[owner[g]] += inst.value(owner[g], static_cast<int>(g));
    return u;
}

enum class Notion { All, EF, EFX, EFX0 };

/// Checks the envy condition pair by pair, removing each droppable good explicitly.
inline bool fair(const Instance& inst, const std::vector<int>& owner, Notion notion) {
    if (notion == Notion::All) return true;
    const int n = inst.n();
    for (int i = 0; i < n; ++i) {
        Rational mine = 0;
        for (std::size_t g = 0; g < owner.size(); ++g)
            if (owner[g] == i) mine += inst.value(i, static_cast<int>(g));
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<int> bundle;
            for (std::size_t g = 0; g < owner.size(); ++g)
                if (owner[g] == j) bundle.push_back(static_cast<int>(g));
            if (notion == Notion::EF) {
                Rational theirs = 0;
                for (int g : bundle) theirs += inst.value(i, g);
                if (mine < theirs) return false;
                continue;
            }
            for (int drop : bundle) {
                if (notion == Notion::EFX && inst.value(i, drop) == 0) continue;
                Rational rest = 0;
                for (int g : bundle)
                    if (g != drop) rest += inst.value(i, g);
                if (mine < rest) return false;
            }
        }
    }
    return true;
}

/// W_p in 50-digit binary floating point; p given as tag + rational.
inline Float pmean(const std::vector<Rational>& u, const efxw::PExponent& p) {
    using Tag = efxw::PExponent::Tag;
    const Float n = static_cast<int>(u.size());
    std::vector<Float> x;
    for (const auto& v : u) x.push_back(Float(v));
    const bool zero = std::any_of(x.begin(), x.end(), [](const Float& f) { return f == 0; });
    switch (p.tag()) {
    case Tag::One: {
        Float s = 0;
        for (const auto& f : x) s += f;
        return s / n;
    }
    case Tag::NegInf: return *std::min_element(x.begin(), x.end());
    case Tag::Zero: {
        if (zero) return 0;
        Float s = 0;
        for (const auto& f : x) s += log(f);
        return exp(s / n);
    }
    default: {
        if (zero && p.is_nonpositive()) return 0;
        const Float q = Float(p.value());
        Float s = 0;
        for (const auto& f : x)
            if (f != 0) s += pow(f, q);
        if (s == 0) return 0;
        return pow(s / n, 1 / q);
    }
    }
}

/// Best W_p over the filtered allocations (nullopt when none passes).
inline std::optional<Float> best_pmean(const Instance& inst, const efxw::PExponent& p, Notion notion) {
    std::optional<Float> best;
    each_owner_map(inst.n(), inst.m(), [&](const std::vector<int>& owner) {
        if (!fair(inst, owner, notion)) return;
        Float w = pmean(utilities(inst, owner), p);
        if (!best || w > *best) best = w;
    });
    return best;
}

inline bool close(const Float& a, const Float& b) {
    const Float scale = std::max(Float(1), std::max(abs(a), abs(b)));
    return abs(a - b) <= scale * Float("1e-35");
}

/// Permutation brute force over a square matrix: best value of combine(entries) under better.
template <class T, class Better, class Combine>
auto best_permutation(const std::vector<std::vector<T>>& w, Better better, Combine combine) {
    const int n = static_cast<int>(w.size());
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    using R = std::decay_t<std::invoke_result_t<Combine, std::vector<T>>>;
    std::optional<R> best;
    std::vector<int> arg;
    do {
        std::vector<T> picked;
        for (int l = 0; l < n; ++l) picked.push_back(w[l][perm[l]]);
        R total = combine(picked);
        if (!best || better(total, *best)) {
            best = total;
            arg = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pair<R, std::vector<int>>{*best, arg};
}

inline Instance random_instance(std::mt19937_64& rng, int n, int m, int max_value, int zero_percent) {
    std::uniform_int_distribution<int> val(1, max_value), pct(0, 99);
    std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(m)));
    for (int g = 0; g < m; ++g) {
        bool any = false;
        while (!any)
            for (int i = 0; i < n; ++i) {
                v[i][g] = pct(rng) < zero_percent ? 0 : val(rng);
                any = any || v[i][g] > 0;
            }
    }
    return Instance::from_matrix(std::move(v));
}

}  // namespace ref
