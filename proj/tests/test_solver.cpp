#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace efxw;

namespace {

const PExponent kNash = PExponent::zero();

std::vector<PExponent> nonpositive_exponents() {
    return {PExponent::zero(), PExponent::parse("-1"), PExponent::parse("-2"), PExponent::neg_inf()};
}

ref::Notion ref_notion(FairnessNotion n) { return n == FairnessNotion::EFX ? ref::Notion::EFX : ref::Notion::EFX0; }

std::vector<int> owners_of(const Allocation& a, int m) {
    std::vector<int> owner(static_cast<std::size_t>(m));
    for (int i = 0; i < a.n(); ++i)
        for (GoodId g : a.bundle(i)) owner[g] = i;
    return owner;
}

void expect_structural_bound(const Instance& inst, const SolverResult& r) {
    if (!r.allocation || r.key.is_zero_welfare() || surplus(inst) < 0) return;
    int heavy = 0;
    std::size_t goods = 0;
    for (const auto& b : r.allocation->bundles())
        if (b.size() >= 2) {
            ++heavy;
            goods += b.size();
        }
    EXPECT_LE(heavy, surplus(inst));
    EXPECT_LE(static_cast<int>(goods), 2 * surplus(inst));
}

}  // namespace

TEST(GlobalOptimum, ExampleNashMaximizer) {
    auto r = global_optimum(gen_example_compat(), kNash);
    EXPECT_EQ(r.status, SolveStatus::Found);
    EXPECT_EQ(*r.allocation, Allocation({{0, 1}, {3}, {2}}));
    EXPECT_EQ(r.key.exact(), 30);
}

TEST(GlobalOptimum, FewerGoodsThanAgentsHasZeroWelfare) {
    auto inst = Instance::from_matrix({{1, 2}, {3, 4}, {5, 6}});
    auto r = global_optimum(inst, PExponent::parse("-1"));
    EXPECT_EQ(r.status, SolveStatus::NoPositiveWelfare);
    EXPECT_TRUE(r.key.is_zero_welfare());
    ASSERT_TRUE(r.allocation);
    EXPECT_NO_THROW(validate_allocation(inst, *r.allocation));
}

TEST(GlobalOptimum, TwoAgentsThreeGoods) {
    auto inst = Instance::from_matrix({{4, 1, 1}, {1, 4, 1}});
    auto r = global_optimum(inst, kNash);
    EXPECT_EQ(r.key.exact(), 20);
    EXPECT_EQ(*r.allocation, Allocation({{0, 2}, {1}}));
}

TEST(GlobalOptimum, SurplusBudget) {
    auto inst = Instance::from_matrix({{1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}});
    SolverOptions opts;
    opts.max_c = 2;
    EXPECT_THROW(global_optimum(inst, kNash, opts), BudgetExceeded);
    EXPECT_THROW(optimize_within_fair(inst, kNash, FairnessNotion::EFX, opts), BudgetExceeded);
}

TEST(GlobalOptimum, PositiveExponentsAreDelegatedWithinBudget) {
    auto inst = gen_example_compat();
    auto r = global_optimum(inst, PExponent::one());
    EXPECT_EQ(r.key.exact(), 12);
    SolverOptions opts;
    opts.oracle_budget = 10;
    EXPECT_THROW(global_optimum(inst, PExponent::one(), opts), HardnessError);
    EXPECT_THROW(optimize_within_fair(inst, PExponent::parse("1/2"), FairnessNotion::EFX, opts), HardnessError);
}

TEST(WithinFair, ExampleEfxOptimum) {
    auto inst = gen_example_compat();
    for (auto notion : {FairnessNotion::EFX, FairnessNotion::EFX0}) {
        auto r = optimize_within_fair(inst, kNash, notion);
        EXPECT_EQ(r.status, SolveStatus::Found);
        EXPECT_EQ(*r.allocation, Allocation({{0}, {3}, {1, 2}}));
        EXPECT_EQ(r.key.exact(), Rational(55, 2));
    }
}

TEST(WithinFair, HoardingAgentBundleIsBounded) {
    auto inst = gen_hoarding_family(3, 3, Rational(1, 100));
    auto r = optimize_within_fair(inst, kNash, FairnessNotion::EFX);
    ASSERT_TRUE(r.allocation);
    EXPECT_LE(r.allocation->bundle(0).size(), 2u);
    EXPECT_FALSE(is_fair(inst, *r.allocation, FairnessNotion::EFX));
}

TEST(WithinFair, SingleInterestedAgentPerGood) {
    // every good is wanted by exactly one agent
    auto inst = Instance::from_matrix({{3, 0, 0, 1}, {0, 2, 0, 0}, {0, 0, 5, 0}});
    for (const auto& p : nonpositive_exponents())
        for (auto notion : {FairnessNotion::EFX, FairnessNotion::EFX0}) {
            auto r = optimize_within_fair(inst, p, notion);
            auto o = brute_opt(inst, p, filter_for(notion));
            EXPECT_EQ(r.key, o.key) << p.str();
            EXPECT_EQ(r.allocation, o.allocation) << p.str();
        }
}

TEST(Compatibility, ExampleIsIncompatible) {
    for (auto notion : {FairnessNotion::EFX, FairnessNotion::EFX0}) {
        auto c = decide_compatibility(gen_example_compat(), kNash, notion);
        EXPECT_FALSE(c.compatible);
        EXPECT_FALSE(c.allocation);
        EXPECT_EQ(c.global.key.exact(), 30);
        EXPECT_EQ(c.fair.key.exact(), Rational(55, 2));
    }
}

TEST(Compatibility, FewGoodsAlwaysCompatible) {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 30; ++t) {
        const int n = 2 + t % 3;
        auto inst = ref::random_instance(rng, n, 1 + static_cast<int>(rng() % n), 7, 30);
        for (const auto& p : nonpositive_exponents()) {
            auto c = decide_compatibility(inst, p, FairnessNotion::EFX);
            EXPECT_TRUE(c.compatible);
            ASSERT_TRUE(c.allocation);
            EXPECT_FALSE(is_fair(inst, *c.allocation, FairnessNotion::EFX));
        }
    }
    auto ones = Instance::from_matrix({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    auto c = decide_compatibility(ones, kNash, FairnessNotion::EFX0);
    EXPECT_TRUE(c.compatible);
    for (const auto& b : c.allocation->bundles()) EXPECT_EQ(b.size(), 1u);
}

TEST(Nmu, FewerGoodsGivesDistinctSingletons) {
    auto inst = Instance::from_matrix({{1, 2}, {3, 4}, {5, 6}});
    auto r = solve_nmu(inst, PExponent::parse("-1"), FairnessNotion::EFX);
    EXPECT_TRUE(r.key.is_zero_welfare());
    ASSERT_TRUE(r.allocation);
    for (const auto& b : r.allocation->bundles()) EXPECT_LE(b.size(), 1u);
    EXPECT_NO_THROW(validate_allocation(inst, *r.allocation));
}

TEST(Nmu, UtilitarianOnIdenticalGoods) {
    auto inst = Instance::from_matrix({{2, 2, 2}, {2, 2, 2}});
    auto r = solve_nmu(inst, PExponent::one(), FairnessNotion::EFX);
    EXPECT_EQ(r.key.exact(), 6);
    auto sizes = std::vector<std::size_t>{r.allocation->bundle(0).size(), r.allocation->bundle(1).size()};
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2}));
}

TEST(Nmu, RejectsZeroEntries) {
    try {
        solve_nmu(gen_example_compat(), kNash, FairnessNotion::EFX);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("a1 values good g3 at 0"), std::string::npos) << e.what();
    }
}

TEST(Nmu, MatchesOracleForPositiveExponents) {
    std::mt19937_64 rng(67);
    for (int t = 0; t < 60; ++t) {
        const int n = 2 + t % 3, m = std::max(1, n - 1 + static_cast<int>(rng() % 5));
        auto inst = ref::random_instance(rng, n, m, 9, 0);
        for (const auto& p : {PExponent::one(), PExponent::parse("1/2")}) {
            auto r = solve_nmu(inst, p, FairnessNotion::EFX);
            auto o = brute_opt(inst, p, Filter::EFX);
            EXPECT_EQ(r.key, o.key) << p.str();
            ASSERT_TRUE(r.allocation);
            EXPECT_FALSE(is_fair(inst, *r.allocation, FairnessNotion::EFX));
        }
    }
}

TEST(HeavyParts, Counts) {
    auto inst = gen_example_compat();
    EXPECT_EQ(heavy_parts(inst, 1, 1).size(), 18u);
    EXPECT_EQ(heavy_part_count(3, 4, 1), 18);
    EXPECT_TRUE(heavy_parts(inst, 0, 0).empty());
    auto one = Instance::from_matrix({{1, 2, 3}});
    auto parts = heavy_parts(one, 1, 1);
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts[0].goods, (Bundle{0, 1, 2}));
}

TEST(HeavyParts, EnumerationMatchesClosedFormAndInvariants) {
    for (int n = 1; n <= 5; ++n)
        for (int m = n; m <= n + 3; ++m) {
            std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(m), Rational(1)));
            auto inst = Instance::from_matrix(v);
            const int c = m - n;
            for (int k = 1; k <= std::min(c, n); ++k) {
                auto parts = heavy_parts(inst, k, k);
                EXPECT_EQ(BigInt(parts.size()), heavy_part_count(n, m, k)) << n << " " << m << " " << k;
                std::set<std::vector<int>> seen;
                for (const auto& part : parts) {
                    ASSERT_EQ(static_cast<int>(part.agents.size()), k);
                    EXPECT_EQ(static_cast<int>(part.goods.size()), k + c);
                    std::vector<int> key(static_cast<std::size_t>(m), -1), covered;
                    for (std::size_t t = 0; t < part.bundles.size(); ++t) {
                        EXPECT_GE(part.bundles[t].size(), 2u);
                        for (GoodId g : part.bundles[t]) {
                            key[g] = part.agents[t];
                            covered.push_back(g);
                        }
                    }
                    std::sort(covered.begin(), covered.end());
                    EXPECT_EQ(covered, part.goods);
                    EXPECT_TRUE(seen.insert(key).second);
                }
            }
        }
}

TEST(Completion, PowerCostMinimumMaximizesWelfare) {
    std::mt19937_64 rng(71);
    std::uniform_int_distribution<int> val(1, 9);
    for (int t = 0; t < 60; ++t) {
        const int n = 1 + t % 6;
        const long e = 1 + t % 3;
        std::vector<std::vector<Rational>> v(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n)));
        for (auto& row : v)
            for (auto& x : row) x = val(rng);
        BipartiteWeights<Rational> cost(n, n);
        for (int l = 0; l < n; ++l)
            for (int r = 0; r < n; ++r) cost.add_edge(l, r, pow_int(v[l][r], -e));
        auto m = min_cost_perfect(cost);
        ASSERT_TRUE(m);
        UtilityProfile got;
        for (int l = 0; l < n; ++l) got.push_back(v[l][(*m)[l]]);
        const PExponent p = PExponent::of(Rational(-e));
        auto best = ref::best_permutation(
            v, [&](const UtilityProfile& a, const UtilityProfile& b) { return compare(a, b, p) > 0; },
            [](const std::vector<Rational>& xs) { return xs; });
        EXPECT_EQ(compare(got, best.first, p), std::strong_ordering::equal);
    }
}

TEST(Properties, OracleEquivalenceAndCompatibility) {
    std::mt19937_64 rng(73);
    for (int n = 2; n <= 4; ++n)
        for (int m = n - 1; m <= n + 3; ++m)
            for (int t = 0; t < 12; ++t) {
                auto inst = ref::random_instance(rng, n, m, 6, t % 2 ? 40 : 20);
                for (const auto& p : nonpositive_exponents()) {
                    auto oracle = brute_opt_multi(inst, p, {Filter::All, Filter::EFX, Filter::EFX0});
                    auto global = global_optimum(inst, p);
                    EXPECT_EQ(global.key, oracle[0].key) << p.str() << "\n" << serialize_instance(inst);
                    ASSERT_TRUE(global.allocation);
                    EXPECT_NO_THROW(validate_allocation(inst, *global.allocation));
                    EXPECT_EQ(score_key(utilities(inst, *global.allocation), p), global.key);
                    expect_structural_bound(inst, global);
                    for (auto notion : {FairnessNotion::EFX, FairnessNotion::EFX0}) {
                        const auto& best = oracle[notion == FairnessNotion::EFX ? 1 : 2];
                        auto fair = optimize_within_fair(inst, p, notion);
                        EXPECT_EQ(fair.key, best.key) << p.str() << " " << to_string(notion) << "\n" << serialize_instance(inst);
                        ASSERT_TRUE(fair.allocation);
                        EXPECT_NO_THROW(validate_allocation(inst, *fair.allocation));
                        EXPECT_TRUE(ref::fair(inst, owners_of(*fair.allocation, m), ref_notion(notion)));
                        expect_structural_bound(inst, fair);
                        auto compat = decide_compatibility(inst, p, notion);
                        EXPECT_EQ(compat.compatible, best.key == oracle[0].key);
                    }
                }
            }
}

TEST(Properties, WelfareAgreesWithReferenceOptimum) {
    std::mt19937_64 rng(79);
    for (int t = 0; t < 30; ++t) {
        const int n = 2 + t % 2, m = n + 1 + t % 3;
        auto inst = ref::random_instance(rng, n, m, 5, 25);
        for (const auto& p : nonpositive_exponents()) {
            auto fair = optimize_within_fair(inst, p, FairnessNotion::EFX);
            auto expect = ref::best_pmean(inst, p, ref::Notion::EFX);
            ASSERT_TRUE(expect);
            EXPECT_TRUE(ref::close(ref::pmean(fair.profile, p), *expect)) << p.str();
        }
    }
}
