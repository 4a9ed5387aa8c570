#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace efxw;

namespace {

const PExponent kZero = PExponent::zero();
const PExponent kOne = PExponent::one();

UtilityProfile prof(std::initializer_list<Rational> xs) { return UtilityProfile(xs); }

std::vector<PExponent> sample_exponents() {
    return {PExponent::one(), PExponent::parse("1/2"), PExponent::zero(), PExponent::parse("-1"),
            PExponent::parse("-2"), PExponent::parse("-1/2"), PExponent::parse("1/3"), PExponent::neg_inf()};
}

}  // namespace

TEST(Utilities, ExampleAllocations) {
    auto inst = gen_example_compat();
    EXPECT_EQ(utilities(inst, Allocation({{0, 1}, {3}, {2}})), prof({6, 5, 1}));
    EXPECT_EQ(utilities(inst, Allocation({{0}, {3}, {1, 2}})), prof({5, 5, Rational(11, 10)}));
    auto single = Instance::from_matrix({{1, 2, 3}});
    EXPECT_EQ(utilities(single, Allocation({{0, 1, 2}})), prof({6}));
}

TEST(ScoreKey, NashProductOfExampleOptimum) {
    auto k = score_key(prof({6, 5, 1}), kZero);
    EXPECT_EQ(k.kind(), ScoreKey::Kind::Product);
    EXPECT_EQ(k.exact(), 30);
}

TEST(ScoreKey, ZeroFlagSitsBelowEveryPositiveProfile) {
    auto z = score_key(prof({6, 5, 0}), kZero);
    EXPECT_TRUE(z.zero_flag());
    EXPECT_LT(z, score_key(prof({Rational(1, 1000), Rational(1, 1000), Rational(1, 1000)}), kZero));
    EXPECT_EQ(z, score_key(prof({0, 100, 100}), kZero));
}

TEST(ScoreKey, HarmonicComparison) {
    auto p = PExponent::parse("-1");
    auto a = score_key(prof({2, 8}), p);
    EXPECT_EQ(a.exact(), Rational(-5, 8));
    EXPECT_LT(a, score_key(prof({4, 4}), p));
}

TEST(PmeanValue, ReportsDecimalApproximations) {
    EXPECT_EQ(pmean_value(prof({6, 5, 1}), kZero, 64, 6), "3.10723");
    for (const auto& p : sample_exponents()) EXPECT_EQ(pmean_value(prof({7, 7, 7}), p, 64, 12), "7") << p.str();
    EXPECT_EQ(pmean_value(prof({2, 8}), kOne, 64, 12), "5");
    EXPECT_EQ(pmean_value(prof({2, 8}), PExponent::parse("-1"), 64, 6), "3.2");
    EXPECT_EQ(pmean_value(prof({0, 8}), PExponent::parse("-1"), 64, 6), "0");
}

TEST(Compare, SpecExamples) {
    EXPECT_EQ(compare(prof({6, 5, 1}), prof({5, 5, Rational(11, 10)}), kZero), std::strong_ordering::greater);
    for (const auto& p : sample_exponents()) EXPECT_EQ(compare(prof({1, 1}), prof({1, 1}), p), std::strong_ordering::equal);
    EXPECT_EQ(compare(prof({0, 9}), prof({1, 1}), PExponent::parse("-1")), std::strong_ordering::less);
}

TEST(Compare, RejectsProfilesOfDifferentLength) {
    EXPECT_THROW(compare(prof({1}), prof({1, 1}), kOne), std::invalid_argument);
}

TEST(Compare, EgalitarianLeximinAndMinOnly) {
    auto p = PExponent::neg_inf();
    EXPECT_EQ(compare(prof({1, 5}), prof({1, 3}), p), std::strong_ordering::greater);
    EXPECT_EQ(compare(prof({1, 5}), prof({1, 3}), p, EgalitarianOrder::MinOnly), std::strong_ordering::equal);
    EXPECT_EQ(compare(prof({2, 2}), prof({1, 9}), p), std::strong_ordering::greater);
}

TEST(Compare, RegimeAgreementWithHighPrecisionValues) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> val(1, 12), len(1, 5), den(1, 4);
    const std::vector<PExponent> ps = {PExponent::one(), PExponent::parse("1/2"), PExponent::zero(),
                                       PExponent::parse("-1"), PExponent::parse("-2")};
    int decided = 0;
    for (int t = 0; t < 500; ++t) {
        const int n = len(rng);
        UtilityProfile a, b;
        for (int i = 0; i < n; ++i) {
            a.push_back(Rational(val(rng), den(rng)));
            b.push_back(Rational(val(rng), den(rng)));
        }
        for (const auto& p : ps) {
            ref::Float wa = ref::pmean(a, p), wb = ref::pmean(b, p);
            auto ord = compare(a, b, p);
            ref::Float gap = abs(wa - wb) / std::max(wa, wb);
            if (gap > ref::Float("5.421010862427522e-20")) {  // 2^-64
                EXPECT_EQ(ord, wa < wb ? std::strong_ordering::less : std::strong_ordering::greater);
                ++decided;
            }
        }
    }
    EXPECT_GT(decided, 2000);
}

TEST(Compare, MonotoneInEachUtility) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> val(0, 9), len(1, 5);
    for (int t = 0; t < 200; ++t) {
        UtilityProfile a;
        for (int i = 0, n = len(rng); i < n; ++i) a.push_back(val(rng));
        UtilityProfile b = a;
        b[static_cast<std::size_t>(t) % b.size()] += Rational(val(rng) + 1, 3);
        for (const auto& p : sample_exponents()) EXPECT_NE(compare(b, a, p), std::strong_ordering::less) << p.str();
    }
}

TEST(Compare, KeysArePermutationInvariant) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> val(0, 9);
    for (int t = 0; t < 100; ++t) {
        UtilityProfile a;
        for (int i = 0; i < 4; ++i) a.push_back(val(rng));
        UtilityProfile b = a;
        std::shuffle(b.begin(), b.end(), rng);
        for (const auto& p : sample_exponents()) EXPECT_EQ(compare(a, b, p), std::strong_ordering::equal);
    }
}

TEST(RadicalSum, DetectsAlgebraicIdentities) {
    const Rational half(1, 2);
    // sqrt(8) = 2 sqrt(2)
    EXPECT_EQ((RadicalSum::power(8, half) - RadicalSum::power(2, half, 2)).sign(), 0);
    // sqrt(1/2) = sqrt(2)/2
    EXPECT_EQ((RadicalSum::power(half, half) - RadicalSum::power(2, half, half)).sign(), 0);
    // 12^(1/3) vs (3/2)^(1/3) * 2
    const Rational third(1, 3);
    EXPECT_EQ((RadicalSum::power(12, third) - RadicalSum::power(Rational(3, 2), third, 2)).sign(), 0);
    // sqrt(2) + sqrt(3) = sqrt(9.898979...)
    const auto s = RadicalSum::power(2, half) + RadicalSum::power(3, half);
    EXPECT_GT((s - RadicalSum::power(Rational(989, 100), half)).sign(), 0);
    EXPECT_LT((s - RadicalSum::power(Rational(99, 10), half)).sign(), 0);
}

TEST(RadicalSum, NegativeExponentsAndSymmetricProfilesTie) {
    auto p = PExponent::parse("-1/2");
    EXPECT_EQ(compare(prof({1, 9}), prof({9, 1}), p), std::strong_ordering::equal);
    // 2^(-1/2) + 8^(-1/2) = (3/4) sqrt(2) vs 2 * 4^(-1/2) = 1
    EXPECT_EQ(compare(prof({2, 8}), prof({4, 4}), p), std::strong_ordering::less);
}

TEST(RadicalSum, PrecisionCapHasFloor) {
    const unsigned saved = numeric::precision_cap();
    numeric::set_precision_cap(10);
    EXPECT_EQ(numeric::precision_cap(), 128u);
    numeric::set_precision_cap(saved);
}
