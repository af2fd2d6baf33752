#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stairscale/error.hpp"
#include "stairscale/fractal.hpp"

using namespace stairscale;

TEST(Oracle, StaircaseKnownValues) {
    EXPECT_NEAR(oracle::triadic_staircase(1, 4), 1.0L / 3, 1e-18L);
    EXPECT_NEAR(oracle::triadic_staircase(1, 3), 0.5L, 1e-18L);
    EXPECT_NEAR(oracle::triadic_staircase(3, 4), 2.0L / 3, 1e-18L);
    EXPECT_NEAR(oracle::triadic_staircase(1, 10), 0.2L, 1e-18L);  // 0.(0022)_3 -> 0.(0011)_2
}

TEST(Ratio, ParseAndOrder) {
    EXPECT_EQ(Ratio::parse("2/6"), Ratio(1, 3));
    EXPECT_EQ(Ratio::parse("0.25"), Ratio(1, 4));
    EXPECT_EQ(Ratio::parse("1"), Ratio(1, 1));
    EXPECT_EQ(Ratio(3, -9), Ratio(-1, 3));
    EXPECT_LT(Ratio(1, 3), Ratio(34, 100));
    EXPECT_EQ(Ratio(2, 4).to_string(), "1/2");
    EXPECT_THROW((void)Ratio::parse("1/0"), Error);
    EXPECT_THROW((void)Ratio::parse("abc"), Error);
}

TEST(CantorSpec, Validation) {
    const auto t = CantorSpec::triadic();
    EXPECT_EQ(t.base(), 3);
    EXPECT_EQ(t.pieces(), 2);
    EXPECT_EQ(t.dimension(), std::log(2.0) / std::log(3.0));
    EXPECT_EQ(t.plateau_index(1), 1);
    EXPECT_EQ(t.retained_index(2), 1);
    EXPECT_EQ(t.retained_index(1), -1);
    EXPECT_NO_THROW(CantorSpec(5, {0, 2, 4}));
    EXPECT_THROW(CantorSpec(2, {0, 1}), Error);        // base too small
    EXPECT_THROW(CantorSpec(5, {1, 4}), Error);        // 0 dropped
    EXPECT_THROW(CantorSpec(5, {0, 2}), Error);        // 1 dropped
    EXPECT_THROW(CantorSpec(5, {0, 3, 2, 4}), Error);  // unsorted
    EXPECT_THROW(CantorSpec(5, {0}), Error);           // single piece
    EXPECT_THROW(CantorSpec(5, {0, 1, 2, 3, 4}), Error);
}

TEST(ConstructLevel, Examples) {
    const auto t = CantorSpec::triadic();
    const auto l0 = construct_level(t, 0);
    ASSERT_EQ(l0.intervals.size(), 1u);
    EXPECT_EQ(l0.intervals[0].lo, Ratio(0, 1));
    EXPECT_EQ(l0.intervals[0].hi, Ratio(1, 1));
    EXPECT_TRUE(l0.gaps.empty());

    const auto l1 = construct_level(t, 1);
    ASSERT_EQ(l1.intervals.size(), 2u);
    EXPECT_EQ(l1.intervals[0].hi, Ratio(1, 3));
    EXPECT_EQ(l1.intervals[1].lo, Ratio(2, 3));
    ASSERT_EQ(l1.gaps.size(), 1u);
    EXPECT_EQ(l1.gaps[0].lo, Ratio(1, 3));
    EXPECT_EQ(l1.gaps[0].hi, Ratio(2, 3));

    const auto five = construct_level(CantorSpec(5, {0, 2, 4}), 1);
    ASSERT_EQ(five.intervals.size(), 3u);
    EXPECT_EQ(five.intervals[1].lo, Ratio(2, 5));
    EXPECT_EQ(five.intervals[1].hi, Ratio(3, 5));
    EXPECT_EQ(five.intervals[2].lo, Ratio(4, 5));
}

TEST(ConstructLevel, StructureAndRefinement) {
    const CantorSpec spec(7, {0, 3, 6});
    for (int n = 1; n <= 5; ++n) {
        const auto lvl = construct_level(spec, n);
        const auto prev = construct_level(spec, n - 1);
        ASSERT_EQ(lvl.intervals.size(), static_cast<std::size_t>(std::pow(3, n)));
        const Ratio width(1, static_cast<std::int64_t>(std::pow(7, n)));
        for (std::size_t i = 0; i < lvl.intervals.size(); ++i) {
            const auto& iv = lvl.intervals[i];
            EXPECT_EQ(Ratio(iv.hi.num * iv.lo.den - iv.lo.num * iv.hi.den, iv.hi.den * iv.lo.den), width);
            if (i > 0) EXPECT_LT(lvl.intervals[i - 1].hi, iv.lo);
            const auto parent = std::find_if(prev.intervals.begin(), prev.intervals.end(),
                                             [&](const ClosedInterval& p) { return p.lo <= iv.lo && iv.hi <= p.hi; });
            EXPECT_NE(parent, prev.intervals.end());
        }
        // intervals and gaps tile [0,1]
        std::vector<std::pair<Ratio, Ratio>> all;
        for (const auto& iv : lvl.intervals) all.emplace_back(iv.lo, iv.hi);
        for (const auto& g : lvl.gaps) all.emplace_back(g.lo, g.hi);
        std::sort(all.begin(), all.end());
        EXPECT_EQ(all.front().first, Ratio(0, 1));
        EXPECT_EQ(all.back().second, Ratio(1, 1));
        for (std::size_t i = 1; i < all.size(); ++i) EXPECT_EQ(all[i - 1].second, all[i].first);
    }
}

TEST(ConstructLevel, CapIsEnforced) {
    try {
        (void)construct_level(CantorSpec::triadic(), 12, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Resource);
    }
}

TEST(Membership, Examples) {
    const auto t = CantorSpec::triadic();
    EXPECT_EQ(membership(t, Ratio(1, 2), 1), Membership::Out);
    EXPECT_EQ(membership(t, Ratio(1, 4), 30), Membership::In);
    for (int n = 0; n <= 5; ++n) {
        EXPECT_EQ(membership(t, Ratio(1, 3), n), Membership::In) << n;
        EXPECT_EQ(membership(t, Ratio(2, 3), n), Membership::In) << n;
    }
    EXPECT_EQ(membership(t, Ratio(0, 1), 1), Membership::In);
    EXPECT_EQ(membership(t, Ratio(1, 1), 1), Membership::In);
    // 1/54 = 0.0001111..._3: the first gap digit sits at position 4
    EXPECT_EQ(membership(t, Ratio(1, 54), 3), Membership::Undetermined);
    EXPECT_EQ(membership(t, Ratio(1, 54), 4), Membership::Out);
    EXPECT_EQ(membership(t, Ratio(1, 9), 0), Membership::In);
    EXPECT_EQ(membership(t, Ratio(4, 9), 0), Membership::Out);
    EXPECT_THROW((void)membership(t, Ratio(3, 2), 4), Error);
}

TEST(Membership, AgreesWithLevelSets) {
    const auto t = CantorSpec::triadic();
    const auto lvl = construct_level(t, 4);
    for (std::int64_t p = 0; p <= 162; ++p) {
        const Ratio x(p, 162);
        const bool inside = std::any_of(lvl.intervals.begin(), lvl.intervals.end(),
                                        [&](const ClosedInterval& iv) { return iv.lo <= x && x <= iv.hi; });
        const auto m = membership(t, x, 4);
        if (!inside) EXPECT_EQ(m, Membership::Out) << x.to_string();
        if (m == Membership::In) EXPECT_TRUE(inside) << x.to_string();
    }
}

TEST(Staircase, Endpoints) {
    for (const auto& spec : {CantorSpec::triadic(), CantorSpec(5, {0, 2, 4}), CantorSpec(10, {0, 4, 9})}) {
        EXPECT_EQ(staircase_eval(spec, 0.0, 40).value, 0.0);
        EXPECT_EQ(staircase_eval(spec, 1.0, 40).value, 1.0);
        EXPECT_EQ(staircase_eval(spec, Ratio(1, 1), 40).value, 1.0);
    }
}

TEST(Staircase, FirstGapIsExactlyOneHalf) {
    const auto t = CantorSpec::triadic();
    for (double x : {0.34, 0.4, 0.5, 0.6, 0.66}) {
        const auto v = staircase_eval(t, x, 30);
        EXPECT_EQ(v.value, 0.5) << x;
        EXPECT_EQ(v.error, 0.0) << x;
    }
    EXPECT_EQ(staircase_eval(t, Ratio(1, 3), 30).value, 0.5);
    EXPECT_EQ(staircase_eval(t, Ratio(2, 3), 30).value, 0.5);
}

TEST(Staircase, QuarterIsOneThird) {
    const auto t = CantorSpec::triadic();
    const auto v = staircase_eval(t, Ratio(1, 4), 30);
    EXPECT_LE(v.value, 1.0 / 3);
    EXPECT_GE(v.value + v.error, 1.0 / 3 - 1e-16);
    EXPECT_NEAR(v.value, 1.0 / 3, std::ldexp(1.0, -30));
    EXPECT_NEAR(staircase_eval(t, 0.25, 40).value, 1.0 / 3, std::ldexp(1.0, -40));
}

TEST(Staircase, MatchesDigitOracleOnRationals) {
    struct Case {
        CantorSpec spec;
        std::vector<int> layout;
    };
    const std::vector<Case> cases{{CantorSpec::triadic(), {0, 2}},
                                  {CantorSpec(5, {0, 2, 4}), {0, 2, 4}},
                                  {CantorSpec(7, {0, 3, 6}), {0, 3, 6}},
                                  {CantorSpec(10, {0, 4, 9}), {0, 4, 9}}};
    for (const auto& c : cases) {
        const int depth = 40;
        const double bound = std::pow(static_cast<double>(c.spec.pieces()), -depth);
        for (std::int64_t q = 2; q <= 60; ++q) {
            for (std::int64_t p = 0; p <= q; ++p) {
                const auto v = staircase_eval(c.spec, Ratio(p, q), depth);
                const long double exact = oracle::staircase(p, q, c.spec.base(), c.layout);
                EXPECT_LE(static_cast<long double>(v.value), exact + 1e-15L) << p << "/" << q;
                EXPECT_GE(static_cast<long double>(v.value) + v.error, exact - 1e-15L) << p << "/" << q;
                EXPECT_LE(v.error, bound * (1 + 1e-12));
            }
        }
    }
}

TEST(Staircase, DoubleInputExpandsExactly) {
    // Dyadic doubles are exact rationals; compare against the oracle at q = 2^k.
    const auto t = CantorSpec::triadic();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t q = std::int64_t{1} << 20;
        const std::int64_t p = static_cast<std::int64_t>(rng() % (q + 1));
        const double x = static_cast<double>(p) / static_cast<double>(q);
        const auto v = staircase_eval(t, x, 45);
        EXPECT_NEAR(static_cast<long double>(v.value), oracle::triadic_staircase(p, q), 1e-13L) << x;
    }
    // tiny and near-one doubles go through the wide expansion
    EXPECT_NEAR(staircase_eval(t, 1e-300, 40).value, 0.0, 1e-12);
    // F(1 - eps) = 1 - F(eps) >= 1 - eps^s; the rise is far steeper than eps
    const double eps = 1.0 - std::nextafter(1.0, 0.0);
    const double top = staircase_eval(t, 1.0 - eps, 40).value;
    EXPECT_LT(top, 1.0);
    EXPECT_GE(top, 1.0 - std::pow(eps, t.dimension()) - std::ldexp(1.0, -40));
}

TEST(Staircase, Monotone) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& spec : {CantorSpec::triadic(), CantorSpec(5, {0, 2, 4})}) {
        const StaircaseEvaluator F(spec, 30);
        for (int i = 0; i < 10000; ++i) {
            double a = u(rng);
            double b = u(rng);
            if (a > b) std::swap(a, b);
            const double fa = F(a);
            const double fb = F(b);
            EXPECT_LE(fa, fb);
            EXPECT_GE(fa, 0.0);
            EXPECT_LE(fb, 1.0);
        }
    }
}

TEST(Staircase, ConstantOnGaps) {
    const auto t = CantorSpec::triadic();
    const StaircaseEvaluator F(t, 30);
    for (int n = 1; n <= 6; ++n) {
        for (const auto& g : construct_level(t, n).gaps) {
            const double lo = g.lo.to_double();
            const double hi = g.hi.to_double();
            const double v = F(lo + (hi - lo) / 2);
            EXPECT_EQ(F(lo + (hi - lo) * 0.01), v);
            EXPECT_EQ(F(lo + (hi - lo) * 0.99), v);
            EXPECT_EQ(staircase_eval(t, g.lo, 30).value, v);
            EXPECT_EQ(staircase_eval(t, g.hi, 30).value, v);
        }
    }
}

TEST(Staircase, SelfSimilarityAndSymmetry) {
    const int depth = 30;
    const StaircaseEvaluator F(CantorSpec::triadic(), depth);
    const double tol = 2 * std::ldexp(1.0, -depth);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(F(x / 3), F(x) / 2, tol);
        EXPECT_NEAR(F((x + 2) / 3), (1 + F(x)) / 2, tol);
        EXPECT_NEAR(F(1 - x), 1 - F(x), tol);
    }
}

TEST(Staircase, EvaluatorBound) {
    const StaircaseEvaluator F(CantorSpec(5, {0, 2, 4}), 10);
    EXPECT_DOUBLE_EQ(F.error_bound(), std::pow(3.0, -10));
    EXPECT_EQ(F.depth(), 10);
}

TEST(SharpBound, TriadicConstant) {
    const auto t = CantorSpec::triadic();
    EXPECT_NEAR(sharp_bound_constant(t), std::pow(2.0, t.dimension()), 1e-15);
    EXPECT_NEAR(sharp_bound_constant(t), 1.54856, 1e-5);
}

TEST(SharpBound, HoldsOnSamples) {
    const auto t = CantorSpec::triadic();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(std::max(u(rng), 1e-300));
    const auto report = bound_check(t, xs, 50);
    EXPECT_TRUE(report.upper_holds);
    EXPECT_TRUE(report.lower_holds);
    EXPECT_LE(report.max_upper_ratio, 1.0 + 1e-12);
    EXPECT_GE(report.min_lower_ratio, 1.0 - 1e-12);
}

TEST(SharpBound, UpperAttainedAtPowersOfThree) {
    const auto t = CantorSpec::triadic();
    const double s = t.dimension();
    for (int n = 0; n <= 10; ++n) {
        const Ratio x(1, static_cast<std::int64_t>(std::pow(3, n)));
        const double ratio = staircase_eval(t, x, 50).value / std::pow(x.to_double(), s);
        EXPECT_NEAR(ratio, 1.0, 1e-12) << n;
    }
}

TEST(SharpBound, TwoThirds) {
    const auto t = CantorSpec::triadic();
    const double ratio = staircase_eval(t, Ratio(2, 3), 40).value / std::pow(2.0 / 3.0, t.dimension());
    EXPECT_NEAR(ratio, 0.6457, 1e-4);
    EXPECT_GE(ratio, 1.0 / sharp_bound_constant(t));
    EXPECT_LE(ratio, 1.0);
}

TEST(SharpBound, GeneralLayout) {
    const CantorSpec spec(5, {0, 2, 4});
    const double k = sharp_bound_constant(spec);
    EXPECT_GT(k, 1.0);
    std::vector<double> xs;
    for (int i = 1; i <= 4000; ++i) xs.push_back(i / 4000.0);
    const auto report = bound_check(spec, xs, 40);
    EXPECT_TRUE(report.upper_holds);
    EXPECT_TRUE(report.lower_holds);
}
