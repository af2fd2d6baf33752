#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "stairscale/asymptotics.hpp"

using namespace stairscale;

namespace {

// x = delta^p written through the exponent, never through pow on tiny bases.
double power_of(double delta, double p) { return std::exp(p * std::log(delta)); }

}  // namespace

TEST(VisibilityNormReal, ScaleAnnihilatesItself) {
    for (double delta : {0.5, 1e-3, 1e-8, 1e-12, 1e-300}) {
        EXPECT_EQ(visibility_norm_real(delta, delta), 0.0) << delta;
    }
}

TEST(VisibilityNormReal, PowerRule) {
    for (double delta : {1e-4, 1e-8, 1e-12}) {
        for (int i = 1; i <= 39; ++i) {
            const double p = i / 10.0;
            const double v = visibility_norm_real(power_of(delta, p), delta);
            EXPECT_NEAR(v, std::abs(p - 1.0), 1e-12 * std::max(1.0, std::abs(p - 1.0))) << p;
        }
    }
}

TEST(VisibilityNormReal, Examples) {
    EXPECT_NEAR(visibility_norm_real(power_of(1e-8, 0.7), 1e-8), 0.3, 1e-14);
    EXPECT_NEAR(visibility_norm_real(1e-6, 1e-8), 0.25, 1e-15);
    EXPECT_NEAR(visibility_norm_real(power_of(1e-3, 4.0), 1e-3), 3.0, 1e-13);
    EXPECT_EQ(visibility_norm_real(0.0, 1e-3), 0.0);
}

TEST(VisibilityNormReal, LongDoubleAgrees) {
    const long double delta = 1e-10L;
    EXPECT_NEAR(visibility_norm_real(delta * delta, delta), 1.0L, 1e-18L);
}

TEST(VisibilityNormReal, RejectsBadScale) {
    for (double delta : {0.0, 1.0, -0.5, 2.0}) {
        try {
            (void)visibility_norm_real(0.1, delta);
            FAIL() << "accepted delta " << delta;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::Domain);
        }
    }
}

TEST(VisibilityNormReal, ConstantInvarianceWithinSlack) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> p(0.05, 3.0);
    std::uniform_real_distribution<double> k(-50.0, 50.0);
    for (double delta : {1e-4, 1e-12}) {
        for (int i = 0; i < 500; ++i) {
            const double x = power_of(delta, p(rng));
            const double c = k(rng);
            if (std::abs(c) < 1e-3) continue;
            const double diff = std::abs(visibility_norm_real(c * x, delta) - visibility_norm_real(x, delta));
            EXPECT_LE(diff, std::abs(std::log(std::abs(c))) / -std::log(delta) + 1e-12);
        }
    }
}

TEST(VisibilityNormReal, ExponentAdditivity) {
    const double delta = 1e-6;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> e(1.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const double p = e(rng);
        const double q = e(rng);
        const double x = power_of(delta, p);
        const double y = power_of(delta, q);
        EXPECT_NEAR(visibility_norm_real(x * y / delta, delta),
                    visibility_norm_real(x, delta) + visibility_norm_real(y, delta), 1e-12);
    }
}

TEST(VisibilityNormSeq, GeometricIsExact) {
    const auto est = visibility_norm_seq(SequenceSpec::geometric(0.5), ScaleSpec::geometric(0.25), 2, 1e-12);
    EXPECT_EQ(est.value, 0.5);
    for (long long n : {2LL, 10LL, 1000LL, 100000LL}) {
        EXPECT_EQ(visibility_norm_seq(SequenceSpec::geometric(0.5), ScaleSpec::geometric(0.25), n, 1e-12).value,
                  0.5);
    }
}

TEST(VisibilityNormSeq, ScaledGeometricConverges) {
    const auto est =
        visibility_norm_seq(SequenceSpec::scaled_geometric(7.0, 0.5), ScaleSpec::geometric(0.25), 10000, 1e-6);
    // value_n = |1 - (log 7 - n log 2) / (n log 1/4)| = 1/2 + log 7 / (n log 4)
    const double expected = 0.5 + std::log(7.0) / (10000 * std::log(4.0));
    EXPECT_NEAR(est.value, expected, 1e-12);
    EXPECT_NEAR(est.value, 0.5, 1e-3);
    EXPECT_LE(est.residual, 1e-6);
    EXPECT_TRUE(est.converged);
}

TEST(VisibilityNormSeq, SequenceAgainstItself) {
    EXPECT_EQ(visibility_norm_seq(SequenceSpec::geometric(0.25), ScaleSpec::geometric(0.25), 50, 1e-9).value, 0.0);
}

TEST(VisibilityNormSeq, UnionTakesSupremum) {
    const double delta = 1e-3;
    const auto un = SequenceSpec::union_of({SequenceSpec::geometric(0.5), SequenceSpec::geometric(0.5, 1.0 / 3.0)});
    const auto est = visibility_norm_seq(un, ScaleSpec::real_delta(delta), 500, 1e-9);
    EXPECT_NEAR(est.value, 1.0 - std::log(2.0) / std::log(1.0 / delta), 1e-12);

    const auto mixed = SequenceSpec::union_of({SequenceSpec::geometric(0.5), SequenceSpec::geometric(0.1, 2.0)});
    const auto a = visibility_norm_seq(SequenceSpec::geometric(0.5), ScaleSpec::geometric(0.25), 400, 1e-9);
    const auto b = visibility_norm_seq(SequenceSpec::geometric(0.1), ScaleSpec::geometric(0.25), 400, 1e-9);
    const auto u = visibility_norm_seq(mixed, ScaleSpec::geometric(0.25), 400, 1e-9);
    EXPECT_EQ(u.value, std::max(a.value, b.value));
}

TEST(VisibilityNormSeq, PowerSequenceDecays) {
    // log(n^-p) / (n log a) -> 0, so the norm tends to 1.
    const auto est = visibility_norm_seq(SequenceSpec::power(2.0), ScaleSpec::geometric(0.5), 100000, 1e-3);
    const double expected = 1.0 - 2.0 * std::log(100000.0) / (100000 * std::log(2.0));
    EXPECT_NEAR(est.value, expected, 1e-12);
}

TEST(VisibilityNormSeq, Errors) {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Format;  // sentinel: nothing thrown
    };
    EXPECT_EQ(code_of([] { (void)visibility_norm_seq(SequenceSpec::geometric(0.0), ScaleSpec::geometric(0.5), 10, 1e-9); }),
              ErrorCode::DegenerateSequence);
    EXPECT_EQ(code_of([] {
                  (void)visibility_norm_seq(SequenceSpec::scaled_geometric(0.0, 0.5), ScaleSpec::geometric(0.5), 10, 1e-9);
              }),
              ErrorCode::DegenerateSequence);
    EXPECT_EQ(code_of([] { (void)visibility_norm_seq(SequenceSpec::geometric(1.5), ScaleSpec::geometric(0.5), 10, 1e-9); }),
              ErrorCode::NotNullSequence);
    EXPECT_EQ(code_of([] { (void)visibility_norm_seq(SequenceSpec::power(-1.0), ScaleSpec::geometric(0.5), 10, 1e-9); }),
              ErrorCode::NotNullSequence);
    EXPECT_THROW((void)ScaleSpec::geometric(1.0), Error);
}

TEST(ClassifySector, Bands) {
    const double delta = 1e-4;
    EXPECT_EQ(classify_sector(power_of(delta, 3.0), delta), SectorLabel::Invisible);
    EXPECT_EQ(classify_sector(delta * delta, delta), SectorLabel::Invisible);
    EXPECT_EQ(classify_sector(std::sqrt(delta), delta), SectorLabel::Visible);
    EXPECT_EQ(classify_sector(2 * delta, delta), SectorLabel::ScaleEquivalent);
    EXPECT_EQ(classify_sector(-2 * delta, delta), SectorLabel::ScaleEquivalent);
    EXPECT_EQ(classify_sector(10 * delta, delta), SectorLabel::ScaleEquivalent);
    EXPECT_EQ(classify_sector(11 * delta, delta), SectorLabel::Visible);
    EXPECT_EQ(classify_sector(1.0, delta), SectorLabel::NonAsymptotic);
    EXPECT_EQ(classify_sector(5 * delta, delta, 2.0), SectorLabel::Visible);
    EXPECT_EQ(to_string(SectorLabel::ScaleEquivalent), "ScaleEquivalent");
}

TEST(Duality, ExponentsSumToTwo) {
    const double delta = 1e-6;
    const auto half = duality_pair(power_of(delta, 0.5), delta);
    EXPECT_NEAR(std::log(half.dual) / std::log(delta), 1.5, 1e-12);
    EXPECT_NEAR(half.norm_product, 0.25, 1e-12);
    // delta^1.5 lies above delta^2: the dual of a visible element need not be invisible.
    EXPECT_EQ(half.dual_sector, SectorLabel::ScaleEquivalent);
    EXPECT_EQ(duality_pair(power_of(delta, 0.5), delta, 1e-4).dual_sector, SectorLabel::Invisible);

    const auto third = duality_pair(power_of(delta, 0.3), delta);
    EXPECT_NEAR(std::log(third.dual) / std::log(delta), 1.7, 1e-12);

    const auto self = duality_pair(delta, delta);
    EXPECT_NEAR(self.dual, delta, 1e-20);
}

TEST(Duality, NearScaleDualIsNotInvisible) {
    // x = delta^0.9 maps to delta^1.1, which is above delta^2.
    const double delta = 1e-6;
    const auto pair = duality_pair(power_of(delta, 0.9), delta);
    EXPECT_EQ(pair.dual_sector, SectorLabel::ScaleEquivalent);
}

TEST(Duality, RequiresVisible) {
    EXPECT_THROW((void)duality_pair(1e-20, 1e-6), Error);
    EXPECT_THROW((void)duality_pair(0.5, 1e-6, 0.0), Error);
}

TEST(Ultrametric, Examples) {
    const double delta = 1e-12;
    const auto a = ultrametric_check(power_of(delta, 0.3), power_of(delta, 0.5), delta);
    EXPECT_NEAR(a.rhs, 0.7, 1e-12);
    EXPECT_NEAR(a.lhs, 0.7, 1e-3);
    EXPECT_TRUE(a.holds);

    const double x = power_of(delta, 0.4);
    const auto b = ultrametric_check(x, x, delta);
    // The doubling pushes x + x above the larger norm, by less than the slack.
    EXPECT_NEAR(b.lhs, 0.6 + std::log(2.0) / std::log(1.0 / delta), 1e-12);
    EXPECT_GT(b.lhs, b.rhs);
    EXPECT_TRUE(b.holds);

    const auto c = ultrametric_check(power_of(delta, 2.5), power_of(delta, 3.0), delta);
    EXPECT_NEAR(c.lhs, 1.5, 1e-3);
    EXPECT_NEAR(c.rhs, 2.0, 1e-12);
    EXPECT_TRUE(c.holds);
}

TEST(Ultrametric, RandomPairsHold) {
    const double delta = 1e-12;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> visible(0.0, 1.0);
    std::uniform_real_distribution<double> invisible(2.0, 4.0);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_TRUE(ultrametric_check(power_of(delta, visible(rng)), power_of(delta, visible(rng)), delta).holds);
        EXPECT_TRUE(ultrametric_check(power_of(delta, invisible(rng)), power_of(delta, invisible(rng)), delta).holds);
    }
}

TEST(Ultrametric, MixedSectorsAreIncomparable) {
    try {
        (void)ultrametric_check(0.1, 1e-30, 1e-12);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IncomparableSectors);
    }
}

TEST(AsymptoticOrder, ComparesNorms) {
    const double delta = 1e-8;
    EXPECT_TRUE(asymptotically_le(power_of(delta, 0.9), power_of(delta, 0.5), delta));
    EXPECT_FALSE(asymptotically_le(power_of(delta, 0.2), power_of(delta, 0.5), delta));
}
