#pragma once

#include "efxw/model.hpp"
#include "efxw/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace efxw {

/// Bipartite graph with optional edge weights; an absent entry means "no edge".
template <class W>
class BipartiteWeights {
public:
    BipartiteWeights(int left, int right)
        : left_(left), right_(right),
          w_(static_cast<std::size_t>(left), std::vector<std::optional<W>>(static_cast<std::size_t>(right))) {}

    /// Square matrix; every entry is an edge.
    static BipartiteWeights dense(const std::vector<std::vector<W>>& matrix) {
        int n = static_cast<int>(matrix.size());
        BipartiteWeights g(n, n == 0 ? 0 : static_cast<int>(matrix.front().size()));
        for (int l = 0; l < g.left_; ++l)
            for (int r = 0; r < g.right_; ++r) g.add_edge(l, r, matrix[l][r]);
        return g;
    }

    void add_edge(int l, int r, W weight) {
        if (l < 0 || l >= left_ || r < 0 || r >= right_) throw std::out_of_range("edge endpoint out of range");
        if (w_[l][r]) throw std::invalid_argument("duplicate edge (" + std::to_string(l) + "," + std::to_string(r) + ")");
        w_[l][r] = std::move(weight);
    }

    int left_size() const { return left_; }
    int right_size() const { return right_; }
    bool has_edge(int l, int r) const { return w_[l][r].has_value(); }
    const W& weight(int l, int r) const { return *w_[l][r]; }
    const std::optional<W>& entry(int l, int r) const { return w_[l][r]; }

private:
    int left_;
    int right_;
    std::vector<std::vector<std::optional<W>>> w_;
};

/// left -> right assignment; -1 marks an unmatched left vertex.
using Matching = std::vector<int>;

inline int matching_size(const Matching& m) {
    return static_cast<int>(std::count_if(m.begin(), m.end(), [](int r) { return r >= 0; }));
}

/// Hopcroft-Karp on an adjacency list (neighbors visited in the given order).
inline Matching max_cardinality(int left, int right, const std::vector<std::vector<int>>& adj) {
    const int inf = std::numeric_limits<int>::max();
    std::vector<int> match_l(static_cast<std::size_t>(left), -1), match_r(static_cast<std::size_t>(right), -1);
    std::vector<int> dist(static_cast<std::size_t>(left));

    auto bfs = [&] {
        std::queue<int> q;
        bool found = false;
        for (int l = 0; l < left; ++l) {
            if (match_l[l] < 0) {
                dist[l] = 0;
                q.push(l);
            } else {
                dist[l] = inf;
            }
        }
        while (!q.empty()) {
            int l = q.front();
            q.pop();
            for (int r : adj[l]) {
                int next = match_r[r];
                if (next < 0) {
                    found = true;
                } else if (dist[next] == inf) {
                    dist[next] = dist[l] + 1;
                    q.push(next);
                }
            }
        }
        return found;
    };

    auto dfs = [&](auto&& self, int l) -> bool {
        for (int r : adj[l]) {
            int next = match_r[r];
            if (next < 0 || (dist[next] == dist[l] + 1 && self(self, next))) {
                match_l[l] = r;
                match_r[r] = l;
                return true;
            }
        }
        dist[l] = inf;
        return false;
    };

    while (bfs())
        for (int l = 0; l < left; ++l)
            if (match_l[l] < 0) dfs(dfs, l);
    return match_l;
}

template <class W>
Matching max_cardinality(const BipartiteWeights<W>& g) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.left_size()));
    for (int l = 0; l < g.left_size(); ++l)
        for (int r = 0; r < g.right_size(); ++r)
            if (g.has_edge(l, r)) adj[l].push_back(r);
    return max_cardinality(g.left_size(), g.right_size(), adj);
}

/// Positive rationals under multiplication, written additively so the assignment kernel can
/// optimize products exactly: a + b is a*b, a - b is a/b, zero() is 1.
struct MultiplicativeWeight {
    Rational x = 1;

    MultiplicativeWeight() = default;
    explicit MultiplicativeWeight(Rational v) : x(std::move(v)) {
        if (x <= 0) throw std::domain_error("multiplicative weight must be positive");
    }

    MultiplicativeWeight& operator+=(const MultiplicativeWeight& o) {
        x *= o.x;
        return *this;
    }
    MultiplicativeWeight& operator-=(const MultiplicativeWeight& o) {
        x /= o.x;
        return *this;
    }
    friend MultiplicativeWeight operator+(MultiplicativeWeight a, const MultiplicativeWeight& b) { return a += b; }
    friend MultiplicativeWeight operator-(MultiplicativeWeight a, const MultiplicativeWeight& b) { return a -= b; }
    MultiplicativeWeight operator-() const {
        MultiplicativeWeight out;
        out.x = 1 / x;
        return out;
    }
    friend bool operator<(const MultiplicativeWeight& a, const MultiplicativeWeight& b) { return a.x < b.x; }
    friend bool operator==(const MultiplicativeWeight& a, const MultiplicativeWeight& b) { return a.x == b.x; }
};

/// Minimum-cost perfect matching (square graphs) over any ordered abelian group W, where W{} is
/// the identity. Absent edges are never used; returns nullopt when no perfect matching exists.
template <class W>
std::optional<Matching> min_cost_perfect(const BipartiteWeights<W>& g) {
    const int n = g.left_size();
    if (g.right_size() != n) throw std::invalid_argument("perfect matching needs a square graph");
    if (n == 0) return Matching{};

    // Shortest augmenting paths with potentials, 1-indexed; column 0 is a virtual root.
    std::vector<W> u(static_cast<std::size_t>(n + 1)), v(static_cast<std::size_t>(n + 1));
    std::vector<int> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<std::optional<W>> minv(static_cast<std::size_t>(n + 1));
        std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            std::optional<W> delta;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                if (const auto& c = g.entry(i0 - 1, j - 1)) {
                    W cur = *c - u[i0] - v[j];
                    if (!minv[j] || cur < *minv[j]) {
                        minv[j] = std::move(cur);
                        way[j] = j0;
                    }
                }
                if (minv[j] && (!delta || *minv[j] < *delta)) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (!delta) return std::nullopt;
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += *delta;
                    v[j] -= *delta;
                } else if (minv[j]) {
                    *minv[j] -= *delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    Matching m(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j) m[p[j] - 1] = j - 1;
    return m;
}

/// Maximum-weight perfect matching: min-cost on the negated weights.
template <class W>
std::optional<Matching> max_weight_perfect(const BipartiteWeights<W>& g) {
    BipartiteWeights<W> neg(g.left_size(), g.right_size());
    for (int l = 0; l < g.left_size(); ++l)
        for (int r = 0; r < g.right_size(); ++r)
            if (g.has_edge(l, r)) neg.add_edge(l, r, -g.weight(l, r));
    return min_cost_perfect(neg);
}

template <class W>
W matching_total(const BipartiteWeights<W>& g, const Matching& m) {
    W total{};
    for (std::size_t l = 0; l < m.size(); ++l)
        if (m[l] >= 0) total += g.weight(static_cast<int>(l), m[l]);
    return total;
}

/// Perfect matching maximizing the smallest edge value, ties broken leximin over the ascending
/// edge values. Each distinct value of rank r (ascending, 0-based, K values) costs (n+1)^(K-1-r):
/// cost totals then order matchings exactly as their rank-count vectors, i.e. leximin.
inline std::optional<Matching> bottleneck_perfect(const BipartiteWeights<Rational>& g) {
    const int n = g.left_size();
    if (g.right_size() != n) throw std::invalid_argument("perfect matching needs a square graph");
    std::vector<Rational> distinct;
    for (int l = 0; l < n; ++l)
        for (int r = 0; r < n; ++r)
            if (g.has_edge(l, r)) distinct.push_back(g.weight(l, r));
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto k = static_cast<unsigned long>(distinct.size());

    BipartiteWeights<Rational> cost(n, n);
    for (int l = 0; l < n; ++l)
        for (int r = 0; r < n; ++r) {
            if (!g.has_edge(l, r)) continue;
            auto rank = static_cast<unsigned long>(
                std::lower_bound(distinct.begin(), distinct.end(), g.weight(l, r)) - distinct.begin());
            cost.add_edge(l, r, Rational(pow_int(BigInt(n + 1), k - 1 - rank)));
        }
    return min_cost_perfect(cost);
}

}  // namespace efxw
