#pragma once

#include "efxw/model.hpp"
#include "efxw/radical.hpp"
#include "efxw/rational.hpp"
#include "efxw/welfare.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace efxw {

// ---------------------------------------------------------------------------------------------
// Documents

namespace detail {

inline std::string location_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline nlohmann::json parse_document(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed document at " + location_of(text, e.byte) + ": " + e.what());
    }
}

inline std::vector<std::string> string_list(const nlohmann::json& doc, const char* field) {
    if (!doc.contains(field) || !doc[field].is_array()) throw ParseError(std::string("missing array field '") + field + "'");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < doc[field].size(); ++i) {
        const auto& v = doc[field][i];
        if (!v.is_string()) throw ParseError(std::string(field) + "[" + std::to_string(i) + "] must be a string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

inline Rational value_of(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (v.is_number_integer()) return Rational(v.dump());
    throw ParseError(where + ": values must be decimal or \"num/den\" strings");
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
    auto doc = detail::parse_document(text);
    if (!doc.is_object()) throw ParseError("instance document must be an object");
    auto agents = detail::string_list(doc, "agents");
    auto goods = detail::string_list(doc, "goods");
    if (!doc.contains("valuations") || !doc["valuations"].is_array())
        throw ParseError("missing array field 'valuations'");
    const auto& rows = doc["valuations"];
    std::vector<std::vector<Rational>> values;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array()) throw ParseError("valuations[" + std::to_string(i) + "] must be an array");
        std::vector<Rational> row;
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            row.push_back(detail::value_of(rows[i][j], "valuations[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
        values.push_back(std::move(row));
    }
    return Instance(std::move(agents), std::move(goods), std::move(values));
}

/// Canonical form: fixed key order, two-space indent, values as "n" or "n/d", trailing newline.
inline std::string serialize_instance(const Instance& inst) {
    nlohmann::ordered_json doc;
    doc["agents"] = inst.agent_names();
    doc["goods"] = inst.good_names();
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : inst.valuations()) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& v : row) r.push_back(to_string(v));
        rows.push_back(std::move(r));
    }
    doc["valuations"] = std::move(rows);
    return doc.dump(2) + "\n";
}

/// Bundles name goods of `inst`; unknown names are a ValidationError.
inline Allocation parse_allocation(const std::string& text, const Instance& inst) {
    auto doc = detail::parse_document(text);
    if (!doc.is_object() || !doc.contains("bundles") || !doc["bundles"].is_array())
        throw ParseError("allocation document needs a 'bundles' array");
    std::vector<Bundle> bundles;
    for (std::size_t i = 0; i < doc["bundles"].size(); ++i) {
        const auto& b = doc["bundles"][i];
        if (!b.is_array()) throw ParseError("bundles[" + std::to_string(i) + "] must be an array");
        Bundle bundle;
        for (const auto& name : b) {
            if (!name.is_string()) throw ParseError("bundles[" + std::to_string(i) + "] entries must be strings");
            auto g = inst.find_good(name.get<std::string>());
            if (!g) throw ValidationError("unknown good '" + name.get<std::string>() + "'", i);
            bundle.push_back(*g);
        }
        bundles.push_back(std::move(bundle));
    }
    return Allocation(std::move(bundles));
}

inline nlohmann::ordered_json allocation_json(const Instance& inst, const Allocation& alloc) {
    auto bundles = nlohmann::ordered_json::array();
    for (const auto& b : alloc.bundles()) {
        auto names = nlohmann::ordered_json::array();
        for (GoodId g : b) names.push_back(inst.good_name(g));
        bundles.push_back(std::move(names));
    }
    nlohmann::ordered_json doc;
    doc["bundles"] = std::move(bundles);
    return doc;
}

inline std::string serialize_allocation(const Instance& inst, const Allocation& alloc) {
    return allocation_json(inst, alloc).dump(2) + "\n";
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

// ---------------------------------------------------------------------------------------------
// Families

namespace detail {

inline std::vector<std::string> numbered(const std::string& prefix, int count, int first = 1) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(first + i));
    return out;
}

}  // namespace detail

/// Three agents, four goods, one surplus good: no EFX allocation maximizes Nash welfare.
inline Instance gen_example_compat() {
    return Instance({"a1", "a2", "a3"}, {"g1", "g2", "g3", "g4"},
                    {{5, 1, 0, 0}, {0, 0, 0, 5}, {2, Rational(1, 10), 1, 0}});
}

/// Agent 1 values every good at 1, all others at eps.
inline Instance gen_hoarding_family(int n, int c, const Rational& eps) {
    if (n < 2) throw ValidationError("hoarding family needs n >= 2");
    if (c > 3) throw ValidationError("hoarding family needs c <= 3");
    if (n + c < 1) throw ValidationError("hoarding family needs m = n + c >= 1");
    if (eps <= 0) throw ValidationError("eps must be positive");
    const int m = n + c;
    std::vector<std::vector<Rational>> values(static_cast<std::size_t>(n));
    values[0].assign(static_cast<std::size_t>(m), Rational(1));
    for (int i = 1; i < n; ++i) values[i].assign(static_cast<std::size_t>(m), eps);
    return Instance(detail::numbered("a", n), detail::numbered("g", m), std::move(values));
}

/// Goods p_2..p_n (private to agents 2..n) and a shared pool S of c+1 goods. Agent 1 values each
/// good of S at 1/(c+1); agent i >= 2 values p_i at 1 and each good of S at 1 + eps.
inline Instance gen_private_shared_family(int n, int c, const Rational& eps) {
    if (n < 2) throw ValidationError("private-shared family needs n >= 2");
    if (c < 0 || c > 3) throw ValidationError("private-shared family needs c in 0..3");
    if (eps <= 0) throw ValidationError("eps must be positive");
    const int shared = c + 1;
    std::vector<std::string> goods = detail::numbered("p", n - 1, 2);
    for (const auto& s : detail::numbered("s", shared)) goods.push_back(s);
    const int m = static_cast<int>(goods.size());
    std::vector<std::vector<Rational>> values(static_cast<std::size_t>(n),
                                              std::vector<Rational>(static_cast<std::size_t>(m), Rational(0)));
    for (int s = 0; s < shared; ++s) values[0][n - 1 + s] = Rational(1, shared);
    for (int i = 1; i < n; ++i) {
        values[i][i - 1] = 1;
        for (int s = 0; s < shared; ++s) values[i][n - 1 + s] = 1 + eps;
    }
    return Instance(detail::numbered("a", n), std::move(goods), std::move(values));
}

enum class GadgetVariant { Compatibility, Optimization };

struct PartitionGadgetSpec {
    std::vector<long> weights;     // positive integers a_1..a_k
    int c = 0;                     // 0..3
    PExponent p = PExponent::one(); // p in (0, 1]
    std::optional<long> lambda;    // chosen automatically when absent
};

struct PartitionGadget {
    Instance instance;
    std::vector<long> weights;  // after doubling, if the sum was odd
    long total = 0;             // T
    long lambda = 0;
    RadicalSum target;          // largest attainable sum_i v_i(A_i)^p
    std::optional<Allocation> witness;
};

/// Lambda^p (2^p - 1) > 1, decided exactly.
inline bool lambda_separates(long lambda, const PExponent& p) {
    const Rational q = p.value();
    RadicalSum lhs = RadicalSum::power(Rational(2 * lambda), q) - RadicalSum::power(Rational(lambda), q) -
                     RadicalSum::constant(1, denominator_of(q).convert_to<unsigned long>());
    return lhs.sign() > 0;
}

/// Smallest integer Lambda >= 2 with Lambda^p (2^p - 1) > 1.
inline long smallest_lambda(const PExponent& p) {
    const double q = p.value().convert_to<double>();
    const double estimate = std::pow(1.0 / (std::pow(2.0, q) - 1.0), 1.0 / q);
    if (!(estimate < 1e15)) throw ValidationError("Lambda for p = " + p.str() + " is too large to represent");
    long lambda = std::max(2L, static_cast<long>(estimate) - 2);
    while (lambda > 2 && lambda_separates(lambda - 1, p)) --lambda;
    while (!lambda_separates(lambda, p)) ++lambda;
    return lambda;
}

/// Reduction instance from a Partition instance. With `half` (indices summing to T/2) the proof's
/// witness allocation is attached.
inline PartitionGadget gen_partition_gadget(const PartitionGadgetSpec& spec, GadgetVariant variant,
                                            const std::optional<std::vector<int>>& half = std::nullopt) {
    if (spec.weights.empty()) throw ValidationError("gadget needs at least one weight");
    for (std::size_t j = 0; j < spec.weights.size(); ++j)
        if (spec.weights[j] <= 0) throw ValidationError("gadget weights must be positive", j);
    if (spec.c < 0 || spec.c > 3) throw ValidationError("gadget needs c in 0..3");
    if (!spec.p.is_positive()) throw ValidationError("gadget needs p in (0, 1]");

    PartitionGadget out;
    out.weights = spec.weights;
    long total = 0;
    for (long a : out.weights) total += a;
    if (total % 2 != 0) {
        for (long& a : out.weights) a *= 2;
        total *= 2;
    }
    out.total = total;
    out.lambda = spec.lambda ? *spec.lambda : smallest_lambda(spec.p);
    if (out.lambda < 2 || !lambda_separates(out.lambda, spec.p))
        throw ValidationError("Lambda = " + std::to_string(out.lambda) + " violates Lambda^p (2^p - 1) > 1");

    const int k = static_cast<int>(out.weights.size());
    const int c = spec.c;
    const Rational T(total), lam(out.lambda), half_t = T / 2;
    const Rational q = spec.p.value();

    std::vector<std::string> agents = detail::numbered("a", k + 3);
    std::vector<std::string> goods = detail::numbered("g", k);
    goods.push_back("x");
    goods.push_back("y");
    const int gx = k, gy = k + 1;
    if (variant == GadgetVariant::Compatibility) {
        for (int t = 0; t <= c; ++t) goods.push_back("z" + std::to_string(t));
    } else {
        goods.push_back("z");
        for (int t = 1; t <= c; ++t) {
            agents.push_back("d" + std::to_string(t));
            goods.push_back("x" + std::to_string(t));
            goods.push_back("y" + std::to_string(t));
        }
    }
    const int n = static_cast<int>(agents.size());
    const int m = static_cast<int>(goods.size());
    std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n),
                                         std::vector<Rational>(static_cast<std::size_t>(m), Rational(0)));
    for (int j = 0; j < k; ++j) v[0][j] = v[1][j] = out.weights[j];
    for (int g : {gx, gy}) {
        v[0][g] = v[1][g] = half_t;
        v[2][g] = lam * T / 2;
    }
    if (variant == GadgetVariant::Compatibility) {
        for (int t = 0; t <= c; ++t) v[3][k + 2 + t] = lam * T;
        out.target = RadicalSum::power(half_t, q, 2) + RadicalSum::power(lam * T, q) +
                     RadicalSum::power(Rational(c + 1) * lam * T, q);
    } else {
        const int gz = k + 2;
        for (int i = 3; i < k + 3; ++i) v[i][gz] = lam * T;
        for (int t = 1; t <= c; ++t) {
            const int d = k + 2 + t;
            v[d][gz + 2 * t - 1] = v[d][gz + 2 * t] = 1;
        }
        // B_c = c 2^p + 2 (Lambda T)^p + 2 (T/2)^p
        out.target = RadicalSum::power(Rational(2), q, Rational(c)) + RadicalSum::power(lam * T, q, 2) +
                     RadicalSum::power(half_t, q, 2);
    }
    out.instance = Instance(std::move(agents), std::move(goods), std::move(v));

    if (half) {
        std::vector<char> in_half(static_cast<std::size_t>(k), 0);
        long sum = 0;
        for (int j : *half) {
            if (j < 0 || j >= k || in_half[j]) throw ValidationError("invalid partition index " + std::to_string(j));
            in_half[j] = 1;
            sum += out.weights[j];
        }
        if (2 * sum != total) throw ValidationError("supplied subset does not sum to T/2");
        std::vector<Bundle> bundles(static_cast<std::size_t>(n));
        for (int j = 0; j < k; ++j) bundles[in_half[j] ? 0 : 1].push_back(j);
        bundles[2] = {gx, gy};
        if (variant == GadgetVariant::Compatibility) {
            for (int t = 0; t <= c; ++t) bundles[3].push_back(k + 2 + t);
        } else {
            const int gz = k + 2;
            bundles[3] = {gz};
            for (int t = 1; t <= c; ++t) bundles[k + 2 + t] = {gz + 2 * t - 1, gz + 2 * t};
        }
        out.witness = Allocation(std::move(bundles));
    }
    return out;
}

/// sum_i v_i(A_i)^p as an exact radical sum.
inline RadicalSum phi(const UtilityProfile& u, const Rational& q) {
    RadicalSum s;
    for (const auto& x : u) s += RadicalSum::power(x, q);
    return s;
}

namespace detail {

inline std::string fresh_name(const std::vector<std::string>& taken, const std::string& base) {
    auto used = [&](const std::string& s) { return std::find(taken.begin(), taken.end(), s) != taken.end(); };
    if (!used(base)) return base;
    for (int i = 1;; ++i)
        if (!used(base + std::to_string(i))) return base + std::to_string(i);
}

}  // namespace detail

/// Adds an agent who values every good at 0 (surplus drops by one).
inline Instance pad_zero_agent(const Instance& inst) {
    validate_instance(inst);
    auto agents = inst.agent_names();
    agents.push_back(detail::fresh_name(agents, "d"));
    auto values = inst.valuations();
    values.emplace_back(static_cast<std::size_t>(inst.m()), Rational(0));
    return Instance(std::move(agents), inst.good_names(), std::move(values));
}

/// Adds an agent d and two goods x, y that only d values, each at 1 (surplus grows by one).
inline Instance pad_private_pair(const Instance& inst) {
    validate_instance(inst);
    auto agents = inst.agent_names();
    auto goods = inst.good_names();
    agents.push_back(detail::fresh_name(agents, "d"));
    const std::string x = detail::fresh_name(goods, "x");
    goods.push_back(x);
    goods.push_back(detail::fresh_name(goods, "y"));
    auto values = inst.valuations();
    for (auto& row : values) {
        row.push_back(0);
        row.push_back(0);
    }
    std::vector<Rational> d(static_cast<std::size_t>(inst.m()), Rational(0));
    d.push_back(1);
    d.push_back(1);
    values.push_back(std::move(d));
    return Instance(std::move(agents), std::move(goods), std::move(values));
}

/// Reproducible integer valuations in [0, max_value] (or [1, max_value] under nmu). Each entry is 0
/// with probability zero_density, otherwise uniform on [1, max_value]; all-zero goods are redrawn.
inline Instance gen_random(int n, int c, int max_value, std::uint64_t seed, bool nmu = false,
                           const Rational& zero_density = 0) {
    const int m = n + c;
    if (n < 1 || m < 1) throw ValidationError("random instance needs n >= 1 and m = n + c >= 1");
    if (max_value < 1) throw ValidationError("max_value must be at least 1");
    if (zero_density < 0 || zero_density >= 1) throw ValidationError("zero_density must lie in [0, 1)");
    const Rational density = nmu ? Rational(0) : zero_density;
    const auto num = numerator_of(density).convert_to<std::uint64_t>();
    const auto den = denominator_of(density).convert_to<std::uint64_t>();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> coin(0, den - 1);
    std::uniform_int_distribution<int> value(1, max_value);
    std::vector<std::vector<Rational>> values(static_cast<std::size_t>(n),
                                              std::vector<Rational>(static_cast<std::size_t>(m)));
    for (int g = 0; g < m; ++g) {
        bool any = false;
        while (!any) {
            for (int i = 0; i < n; ++i) {
                const bool zero = num > 0 && coin(rng) < num;
                values[i][g] = zero ? 0 : value(rng);
                any = any || values[i][g] > 0;
            }
        }
    }
    return Instance(detail::numbered("a", n), detail::numbered("g", m), std::move(values));
}

}  // namespace efxw
