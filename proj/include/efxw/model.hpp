#pragma once

#include "efxw/rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace efxw {

// Error hierarchy. Every failure surfaced by the library derives from Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    ValidationError(std::string what, std::optional<std::size_t> index = std::nullopt)
        : Error(std::move(what)), index_(index) {}
    std::optional<std::size_t> index() const { return index_; }

private:
    std::optional<std::size_t> index_;
};

/// An exhaustive search would exceed its configured size budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

/// Two distinct values could not be separated within the interval precision cap.
class PrecisionExhausted : public Error {
public:
    using Error::Error;
};

/// The request falls in an NP-hard regime and is too large for the exhaustive fallback.
class HardnessError : public Error {
public:
    using Error::Error;
};

using AgentId = int;
using GoodId = int;
using Bundle = std::vector<GoodId>;

/// Additive fair-division instance: n agents, m goods, nonnegative rational values.
class Instance {
public:
    Instance() = default;

    Instance(std::vector<std::string> agents, std::vector<std::string> goods,
             std::vector<std::vector<Rational>> valuations)
        : agents_(std::move(agents)), goods_(std::move(goods)), values_(std::move(valuations)) {
        if (values_.size() != agents_.size())
            throw ValidationError("valuation matrix has " + std::to_string(values_.size()) +
                                  " rows for " + std::to_string(agents_.size()) + " agents");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i].size() != goods_.size())
                throw ValidationError("valuation row " + std::to_string(i) + " has " +
                                          std::to_string(values_[i].size()) + " entries for " +
                                          std::to_string(goods_.size()) + " goods",
                                      i);
    }

    /// Instance with default identifiers a1..an and g1..gm.
    static Instance from_matrix(std::vector<std::vector<Rational>> valuations) {
        std::size_t m = valuations.empty() ? 0 : valuations.front().size();
        std::vector<std::string> agents, goods;
        for (std::size_t i = 0; i < valuations.size(); ++i) agents.push_back("a" + std::to_string(i + 1));
        for (std::size_t j = 0; j < m; ++j) goods.push_back("g" + std::to_string(j + 1));
        return Instance(std::move(agents), std::move(goods), std::move(valuations));
    }

    int n() const { return static_cast<int>(agents_.size()); }
    int m() const { return static_cast<int>(goods_.size()); }

    const Rational& value(AgentId i, GoodId g) const { return values_[i][g]; }
    const std::vector<Rational>& row(AgentId i) const { return values_[i]; }
    const std::vector<std::vector<Rational>>& valuations() const { return values_; }

    const std::vector<std::string>& agent_names() const { return agents_; }
    const std::vector<std::string>& good_names() const { return goods_; }
    const std::string& agent_name(AgentId i) const { return agents_[i]; }
    const std::string& good_name(GoodId g) const { return goods_[g]; }

    std::optional<GoodId> find_good(const std::string& name) const {
        auto it = std::find(goods_.begin(), goods_.end(), name);
        if (it == goods_.end()) return std::nullopt;
        return static_cast<GoodId>(it - goods_.begin());
    }

    /// v_i(S) for an additive valuation.
    Rational bundle_value(AgentId i, const Bundle& bundle) const {
        Rational total = 0;
        for (GoodId g : bundle) total += values_[i][g];
        return total;
    }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<std::string> agents_;
    std::vector<std::string> goods_;
    std::vector<std::vector<Rational>> values_;
};

/// A complete allocation: bundle i belongs to agent i. Bundles are kept sorted.
class Allocation {
public:
    Allocation() = default;

    explicit Allocation(std::vector<Bundle> bundles) : bundles_(std::move(bundles)) {
        for (auto& b : bundles_) std::sort(b.begin(), b.end());
    }

    /// Builds bundles from a good -> agent map.
    static Allocation from_owners(const std::vector<AgentId>& owner, int n) {
        std::vector<Bundle> bundles(static_cast<std::size_t>(n));
        for (std::size_t g = 0; g < owner.size(); ++g) bundles[owner[g]].push_back(static_cast<GoodId>(g));
        return Allocation(std::move(bundles));
    }

    int n() const { return static_cast<int>(bundles_.size()); }
    const Bundle& bundle(AgentId i) const { return bundles_[i]; }
    const std::vector<Bundle>& bundles() const { return bundles_; }

    /// good -> owning agent; -1 for goods not present in any bundle.
    std::vector<AgentId> owners(int m) const {
        std::vector<AgentId> owner(static_cast<std::size_t>(m), -1);
        for (std::size_t i = 0; i < bundles_.size(); ++i)
            for (GoodId g : bundles_[i])
                if (g >= 0 && g < m) owner[g] = static_cast<AgentId>(i);
        return owner;
    }

    friend bool operator==(const Allocation&, const Allocation&) = default;

private:
    std::vector<Bundle> bundles_;
};

/// The welfare exponent p <= 1, tagged by regime.
class PExponent {
public:
    enum class Tag { One, Zero, Pos, Neg, NegInf };

    static PExponent one() { return PExponent(Tag::One, 1); }
    static PExponent zero() { return PExponent(Tag::Zero, 0); }
    static PExponent neg_inf() { return PExponent(Tag::NegInf, 0); }

    /// Any rational p <= 1; picks the matching tag.
    static PExponent of(const Rational& q) {
        if (q == 1) return one();
        if (q == 0) return zero();
        if (q > 1) throw ValidationError("p must be at most 1, got " + to_string(q));
        if (q > 0) return PExponent(Tag::Pos, q);
        return PExponent(Tag::Neg, q);
    }

    /// Parses "1", "0", "-2", "1/2", "0.5", "-inf".
    static PExponent parse(const std::string& text) {
        if (text == "-inf" || text == "-infinity" || text == "neg-inf") return neg_inf();
        return of(parse_rational(text));
    }

    Tag tag() const { return tag_; }
    const Rational& value() const { return q_; }

    bool is_nonpositive() const { return tag_ == Tag::Zero || tag_ == Tag::Neg || tag_ == Tag::NegInf; }
    bool is_positive() const { return tag_ == Tag::One || tag_ == Tag::Pos; }
    bool is_integer() const { return tag_ != Tag::NegInf && efxw::is_integer(q_); }

    std::string str() const { return tag_ == Tag::NegInf ? "-inf" : to_string(q_); }

    friend bool operator==(const PExponent&, const PExponent&) = default;

private:
    PExponent(Tag tag, Rational q) : tag_(tag), q_(std::move(q)) {}

    Tag tag_ = Tag::One;
    Rational q_ = 1;
};

enum class FairnessNotion { EFX, EFX0 };

inline std::string to_string(FairnessNotion notion) { return notion == FairnessNotion::EFX ? "efx" : "efx0"; }

inline FairnessNotion parse_notion(const std::string& text) {
    if (text == "efx" || text == "EFX") return FairnessNotion::EFX;
    if (text == "efx0" || text == "EFX0") return FairnessNotion::EFX0;
    throw ValidationError("unknown fairness notion '" + text + "'");
}

/// m - n; negative when goods are scarcer than agents.
inline int surplus(const Instance& inst) { return inst.m() - inst.n(); }

/// Throws ValidationError naming the first violated invariant.
inline void validate_instance(const Instance& inst, bool allow_worthless = false) {
    if (inst.n() < 1) throw ValidationError("instance needs at least one agent");
    if (inst.m() < 1) throw ValidationError("instance needs at least one good");
    for (int i = 0; i < inst.n(); ++i)
        for (int g = 0; g < inst.m(); ++g)
            if (inst.value(i, g) < 0)
                throw ValidationError("negative value for agent " + inst.agent_name(i) + " on good " +
                                          inst.good_name(g),
                                      static_cast<std::size_t>(i));
    if (allow_worthless) return;
    for (int g = 0; g < inst.m(); ++g) {
        bool valued = false;
        for (int i = 0; i < inst.n() && !valued; ++i) valued = inst.value(i, g) > 0;
        if (!valued)
            throw ValidationError("worthless good " + inst.good_name(g) + " (index " + std::to_string(g) + ")",
                                  static_cast<std::size_t>(g));
    }
}

/// Throws ValidationError unless alloc partitions all goods into n bundles.
inline void validate_allocation(const Instance& inst, const Allocation& alloc) {
    if (alloc.n() != inst.n())
        throw ValidationError("allocation has " + std::to_string(alloc.n()) + " bundles for " +
                              std::to_string(inst.n()) + " agents");
    std::vector<int> seen(static_cast<std::size_t>(inst.m()), 0);
    for (int i = 0; i < alloc.n(); ++i) {
        for (GoodId g : alloc.bundle(i)) {
            if (g < 0 || g >= inst.m())
                throw ValidationError("unknown good index " + std::to_string(g), static_cast<std::size_t>(i));
            if (seen[g]++ > 0)
                throw ValidationError("duplicate good " + inst.good_name(g), static_cast<std::size_t>(g));
        }
    }
    for (int g = 0; g < inst.m(); ++g)
        if (seen[g] == 0) throw ValidationError("missing good " + inst.good_name(g), static_cast<std::size_t>(g));
}

}  // namespace efxw
