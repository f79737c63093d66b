#include "mixgp/geometric_phase.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace mixgp;

namespace {

// Amplitude from the eigen-decomposition of each branch, no matrices involved:
// for a spin-1/2 in field n with rate ω, <a|U|b> follows from
// U = cos(ωt/2) − i sin(ωt/2) n·σ written out by hand.
complex element(const Vec3& n, double angle, int a, int b) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    if (a == b) return {c, a == 0 ? -s * n.z() : s * n.z()};
    // <0|n·σ|1> = nx − i ny, <1|n·σ|0> = nx + i ny
    const complex off = a == 0 ? complex(n.x(), -n.y()) : complex(n.x(), n.y());
    return -kI * s * off;
}

complex amplitude_oracle(const MixedQubit& q, const AncillaScheme& sch, double t) {
    const double as = sch.system.omega() * t;
    const double aa = sch.ancilla.omega() * t;
    const double p[2] = {q.p1(), q.p2()};
    complex sum{};
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            sum += std::sqrt(p[k] * p[l]) * element(sch.system.axis(), as, k, l) * element(sch.ancilla.axis(), aa, k, l);
        }
    }
    return sum;
}

}  // namespace

TEST(SjoqvistAncilla, OpposesProjection) {
    const AncillaScheme s = sjoqvist_ancilla(kPi / 3, 2.0);
    EXPECT_NEAR(s.ancilla.omega(), 1.0, 1e-15);
    EXPECT_EQ(s.ancilla.axis(), Vec3(0, 0, -1));
    EXPECT_EQ(s.kind, SchemeKind::sjoqvist);
}

TEST(UhlmannAncilla, ReferenceAngle) {
    const MixedQubit q(5.0 / 6.0, 1.0 / 6.0);
    const AncillaScheme s = uhlmann_ancilla(q, kPi / 4, 1.0);
    // Root of tan(x) = 2√(5/36)·1 by bisection.
    const double k = 2 * std::sqrt(5.0 / 36.0);
    const double root = test::bisect([&](double x) { return std::tan(x) - k; }, 0.0, 1.5);
    EXPECT_NEAR(s.theta_a, root, 1e-12);
    EXPECT_NEAR(s.theta_a, 0.6405223126794244, 1e-12);
    EXPECT_NEAR(s.ancilla.omega(), 0.8819171036881968, 1e-12);
}

TEST(UhlmannAncilla, PureStateCopiesSjoqvist) {
    for (double th : linspace(0, kPi / 2, 7)) {
        const AncillaScheme u = uhlmann_ancilla(MixedQubit(1, 0), th, 1.0);
        const AncillaScheme s = sjoqvist_ancilla(th, 1.0);
        EXPECT_NEAR(u.theta_a, 0.0, 1e-15);
        EXPECT_NEAR(u.ancilla.omega(), s.ancilla.omega(), 1e-15);
        EXPECT_LE((u.ancilla.axis() - s.ancilla.axis()).norm(), 1e-15);
    }
}

TEST(UhlmannAncilla, EquatorLimitIsContinuous) {
    const MixedQubit q = MixedQubit::from_purity(0.4);
    const AncillaScheme at = uhlmann_ancilla(q, kPi / 2, 1.0);
    const AncillaScheme near = uhlmann_ancilla(q, kPi / 2 - 1e-7, 1.0);
    EXPECT_NEAR(at.theta_a, kPi / 2, 1e-15);
    EXPECT_NEAR(at.ancilla.omega(), near.ancilla.omega(), 1e-6);
    EXPECT_NEAR(at.theta_a, near.theta_a, 1e-6);
}

TEST(UhlmannAncilla, ConditionsHoldOnGrid) {
    for (double r : linspace(0, 1, 9)) {
        const MixedQubit q = MixedQubit::from_purity(r);
        for (double th : linspace(0, kPi / 2, 9)) {
            const ConditionResiduals res = uhlmann_condition_residuals(q, uhlmann_ancilla(q, th, 1.0));
            EXPECT_LE(res.projection, 1e-12);
            EXPECT_LE(res.tangent, 1e-12) << r << " " << th;
            if (th <= kPi / 4) {
                EXPECT_LE(res.tangent_quotient, 1e-12);
            }
        }
    }
}

TEST(Amplitude, MatchesHandExpandedOracle) {
    for (int i = 0; i < 200; ++i) {
        const MixedQubit q = MixedQubit::from_purity(test::uniform(0, 1));
        const double th = test::uniform(0, kPi / 2);
        const SchemeKind kind = i % 2 ? SchemeKind::uhlmann : SchemeKind::sjoqvist;
        const AncillaScheme sch = make_scheme(kind, q, th, test::uniform(0.2, 3));
        const double wt = test::uniform(0, 4 * kPi);
        const complex a = interference_amplitude(q, sch, wt);
        EXPECT_LE(std::abs(a - amplitude_oracle(q, sch, wt / sch.system.omega())), 1e-12);
        EXPECT_LE(std::abs(a), 1.0 + 1e-12);
    }
}

TEST(Amplitude, PureCyclicVisibilityIsOne) {
    for (double th : linspace(0, kPi / 2, 11)) {
        for (SchemeKind k : {SchemeKind::sjoqvist, SchemeKind::uhlmann}) {
            const MixedQubit q(1, 0);
            EXPECT_NEAR(std::abs(interference_amplitude(q, make_scheme(k, q, th))), 1.0, 1e-12);
        }
    }
}

TEST(Amplitude, KnownSjoqvistValue) {
    const MixedQubit q = MixedQubit::from_purity(2.0 / 3.0);
    const PhaseResult pr = phase_of(interference_amplitude(q, sjoqvist_ancilla(kPi / 4, 1.0)));
    EXPECT_NEAR(pr.phase, -0.7192737522729822, 1e-12);
}

TEST(Amplitude, KnownUhlmannValue) {
    const MixedQubit q(5.0 / 6.0, 1.0 / 6.0);
    const PhaseResult pr = phase_of(interference_amplitude(q, uhlmann_ancilla(q, kPi / 4, 1.0)));
    EXPECT_NEAR(pr.phase, -0.20499661191583535, 1e-12);
}

TEST(Amplitude, ZeroAngleIsExactlyTrivial) {
    for (double r : {0.0, 0.3, 1.0}) {
        const MixedQubit q = MixedQubit::from_purity(r);
        for (SchemeKind k : {SchemeKind::sjoqvist, SchemeKind::uhlmann}) {
            const PhaseResult pr = phase_of(interference_amplitude(q, make_scheme(k, q, 0.0)));
            EXPECT_EQ(pr.phase, 0.0);
        }
    }
}

TEST(PhaseOf, Examples) {
    EXPECT_EQ(phase_of({1, 0}).phase, 0.0);
    EXPECT_NEAR(phase_of({0, 2}).phase, kPi / 2, 1e-16);
    EXPECT_NEAR(phase_of({0, 2}).visibility, 2.0, 1e-16);
    EXPECT_EQ(phase_of({-1, 0}).phase, kPi);
    EXPECT_EQ(phase_of({-1, -0.0}).phase, kPi);
    EXPECT_FALSE(phase_of({1e-10, 0}).defined);
    EXPECT_TRUE(std::isnan(phase_of({0, 0}).phase));
}

TEST(PhaseOf, ConjugationNegates) {
    for (int i = 0; i < 100; ++i) {
        const complex a(test::uniform(-1, 1), test::uniform(-1, 1));
        if (std::abs(a.imag()) < 1e-9) continue;
        EXPECT_DOUBLE_EQ(phase_of(std::conj(a)).phase, -phase_of(a).phase);
    }
}

TEST(WrapPhase, Range) {
    EXPECT_EQ(wrap_phase(-kPi), kPi);
    EXPECT_EQ(wrap_phase(kPi), kPi);
    EXPECT_NEAR(wrap_phase(3 * kPi / 2), -kPi / 2, 1e-15);
    for (int i = 0; i < 200; ++i) {
        const double x = test::uniform(-50, 50);
        const double y = wrap_phase(x);
        EXPECT_GT(y, -kPi);
        EXPECT_LE(y, kPi);
        EXPECT_NEAR(std::remainder(x - y, 2 * kPi), 0.0, 1e-12);
    }
}

TEST(SjoqvistClosedForm, Examples) {
    EXPECT_EQ(sjoqvist_closed_form(0.5, 0.0), 0.0);
    EXPECT_EQ(sjoqvist_closed_form(0.0, kPi / 5), 0.0);
    // Pure state: minus half the solid angle, wrapped.
    for (double th : linspace(0.05, kPi / 2, 9)) {
        EXPECT_NEAR(std::remainder(sjoqvist_closed_form(1.0, th) + kPi * (1 - std::cos(th)), 2 * kPi), 0.0, 1e-12);
    }
    EXPECT_THROW(sjoqvist_closed_form(1.2, 0.1), std::out_of_range);
}

TEST(UhlmannClosedForm, ReferenceValue) {
    const MixedQubit q(5.0 / 6.0, 1.0 / 6.0);
    const AncillaScheme s = uhlmann_ancilla(q, kPi / 4, 1.0);
    EXPECT_NEAR(uhlmann_closed_form(q, s), -0.20499661191583535, 1e-12);
    EXPECT_NEAR(uhlmann_closed_form(q, s, 2 * kPi, CrossTerm::sqrt_p1p2, SignConvention::reversed_sense),
                0.2049966119158354, 1e-12);
}

TEST(UhlmannClosedForm, ConventionsAreNegatives) {
    for (int i = 0; i < 100; ++i) {
        const MixedQubit q = MixedQubit::from_purity(test::uniform(0, 1));
        const AncillaScheme s = uhlmann_ancilla(q, test::uniform(0, kPi / 2), 1.0);
        const double wt = test::uniform(0, 2 * kPi);
        const double a = uhlmann_closed_form(q, s, wt);
        const double b = uhlmann_closed_form(q, s, wt, CrossTerm::sqrt_p1p2, SignConvention::reversed_sense);
        EXPECT_NEAR(std::remainder(a + b, 2 * kPi), 0.0, 1e-12);
    }
}

TEST(UhlmannClosedForm, MatchesAmplitudeAtCycle) {
    for (double r : linspace(0, 1, 13)) {
        const MixedQubit q = MixedQubit::from_purity(r);
        for (double th : linspace(0, kPi / 2, 13)) {
            const AncillaScheme s = uhlmann_ancilla(q, th, 1.0);
            const PhaseResult pr = phase_of(interference_amplitude(q, s));
            if (pr.visibility <= 1e-6) continue;
            EXPECT_NEAR(wrap_phase(pr.phase - uhlmann_closed_form(q, s)), 0.0, 1e-9) << r << " " << th;
        }
    }
}

TEST(SjoqvistClosedForm, MatchesAmplitudeAtCycle) {
    for (double r : linspace(0, 1, 13)) {
        const MixedQubit q = MixedQubit::from_purity(r);
        for (double th : linspace(0, kPi / 2, 13)) {
            const PhaseResult pr = phase_of(interference_amplitude(q, sjoqvist_ancilla(th, 1.0)));
            if (pr.visibility <= 1e-6) continue;
            EXPECT_NEAR(wrap_phase(pr.phase - sjoqvist_closed_form(r, th)), 0.0, 1e-9) << r << " " << th;
        }
    }
}

TEST(ClosedForm, SjoqvistIsUndefinedOffCycle) {
    const MixedQubit q(0.7, 0.3);
    EXPECT_TRUE(std::isnan(closed_form(q, sjoqvist_ancilla(0.4, 1.0), 1.0)));
    EXPECT_FALSE(std::isnan(closed_form(q, uhlmann_ancilla(q, 0.4, 1.0), 1.0)));
}

TEST(SchemeIdentity, PureStatesAgree) {
    const MixedQubit q(1, 0);
    for (double th : linspace(0, kPi / 2, 9)) {
        const complex a = interference_amplitude(q, sjoqvist_ancilla(th, 1.0));
        const complex b = interference_amplitude(q, uhlmann_ancilla(q, th, 1.0));
        EXPECT_LE(std::abs(a - b), 1e-14);
    }
}

TEST(SpinorOffset, BothSchemesHaveZeroOffset) {
    for (SchemeKind k : {SchemeKind::sjoqvist, SchemeKind::uhlmann}) {
        const OffsetStats st = measure_spinor_offset(k, 13);
        EXPECT_NEAR(st.mean, 0.0, 1e-9);
        EXPECT_LE(st.stddev, 1e-9);
        EXPECT_GT(st.count, 150u);
    }
}

TEST(SpinorOffset, ReversedSenseIsNotAConstantShift) {
    const OffsetStats st = measure_spinor_offset(SchemeKind::uhlmann, 13, 1e-6, CrossTerm::sqrt_p1p2,
                                                 SignConvention::reversed_sense);
    EXPECT_GT(st.stddev, 0.1);
}

TEST(OffsetStats, CircularMeanHandlesWrap) {
    const std::vector<double> d = {kPi - 0.01, -kPi + 0.01};
    const OffsetStats st = offset_stats(d);
    EXPECT_NEAR(std::abs(st.mean), kPi, 1e-12);
    EXPECT_NEAR(st.stddev, 0.01, 1e-12);
    EXPECT_EQ(offset_stats({}).count, 0u);
}

TEST(Linspace, Endpoints) {
    const auto v = linspace(0, kPi / 2, 13);
    EXPECT_EQ(v.front(), 0.0);
    EXPECT_EQ(v.back(), kPi / 2);
    EXPECT_EQ(linspace(2, 3, 1), std::vector<double>{2});
}
