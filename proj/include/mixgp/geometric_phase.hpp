#pragma once

// The two ancilla constructions on one purification, the interferometric
// amplitude <Ψ|U_s⊗U_a|Ψ>, and closed-form phase evaluators.

#include "mixgp/complex_linalg.hpp"
#include "mixgp/purification.hpp"
#include "mixgp/spin_dynamics.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <string_view>

namespace mixgp {

enum class SchemeKind { sjoqvist, uhlmann };

inline std::string_view to_string(SchemeKind kind) {
    return kind == SchemeKind::sjoqvist ? "sjoqvist" : "uhlmann";
}

inline std::optional<SchemeKind> parse_scheme(std::string_view text) {
    if (text == "sjoqvist") return SchemeKind::sjoqvist;
    if (text == "uhlmann") return SchemeKind::uhlmann;
    return std::nullopt;
}

struct AncillaScheme {
    SchemeKind kind;
    FieldSpec system;
    FieldSpec ancilla;
    double theta_s = 0.0;
    double theta_a = 0.0;

    BilocalEvolution evolution() const { return {system, ancilla}; }

    /// Propagators after the system has turned by `omega_s_t` radians.
    BilocalPropagator at_system_angle(double omega_s_t) const {
        return evolution()(omega_s_t / system.omega());
    }
};

/// B_a = −e_z B_s cos θ_s: cancels the dynamical phase of both eigenbranches.
inline AncillaScheme sjoqvist_ancilla(double theta_s, double omega_s) {
    const FieldSpec sys = system_field(omega_s, theta_s);
    return {SchemeKind::sjoqvist, sys, FieldSpec(omega_s * std::cos(theta_s), Vec3(0.0, 0.0, -1.0)),
            theta_s, 0.0};
}

/// B_a = −B_a(sin θ_a, 0, cos θ_a) with tan θ_a = 2√(p1p2) tan θ_s and
/// ω_a cos θ_a = ω_s cos θ_s. At θ_s = π/2 the tangent condition degenerates and
/// the continuity limit θ_a = π/2, ω_a = 2√(p1p2)·ω_s is used.
inline AncillaScheme uhlmann_ancilla(const MixedQubit& state, double theta_s, double omega_s) {
    const FieldSpec sys = system_field(omega_s, theta_s);
    const double k = 2.0 * std::sqrt(state.p1() * state.p2());
    double theta_a = 0.0;
    double omega_a = 0.0;
    if (theta_s == kPi / 2.0) {
        theta_a = k > 0.0 ? kPi / 2.0 : 0.0;
        omega_a = k * omega_s;
    } else {
        theta_a = std::atan(k * std::tan(theta_s));
        omega_a = omega_s * std::cos(theta_s) / std::cos(theta_a);
    }
    return {SchemeKind::uhlmann, sys,
            FieldSpec(omega_a, Vec3(-std::sin(theta_a), 0.0, -std::cos(theta_a))), theta_s, theta_a};
}

inline AncillaScheme make_scheme(SchemeKind kind, const MixedQubit& state, double theta_s,
                                 double omega_s = 1.0) {
    return kind == SchemeKind::sjoqvist ? sjoqvist_ancilla(theta_s, omega_s)
                                        : uhlmann_ancilla(state, theta_s, omega_s);
}

// tan θ_a = k tan θ_s is checked multiplied through by cos θ_a cos θ_s. The
// quotient form cannot do better than ~ulp·tan²θ near π/2 whatever θ_a is,
// because tan itself is that ill-conditioned there.
struct ConditionResiduals {
    double tangent;           // |sin θ_a cos θ_s − 2√(p1p2) sin θ_s cos θ_a|
    double projection;        // |ω_a cos θ_a − ω_s cos θ_s|
    double tangent_quotient;  // |tan θ_a − 2√(p1p2) tan θ_s|, diagnostic only
};

inline ConditionResiduals uhlmann_condition_residuals(const MixedQubit& state, const AncillaScheme& s) {
    const double k = 2.0 * std::sqrt(state.p1() * state.p2());
    return {std::abs(std::sin(s.theta_a) * std::cos(s.theta_s) - k * std::sin(s.theta_s) * std::cos(s.theta_a)),
            std::abs(s.ancilla.omega() * std::cos(s.theta_a) - s.system.omega() * std::cos(s.theta_s)),
            std::abs(std::tan(s.theta_a) - k * std::tan(s.theta_s))};
}

/// A = <Ψ|(U_s⊗U_a)|Ψ>.
inline complex interference_amplitude(const MixedQubit& state, const Propagator& us, const Propagator& ua) {
    check_same_duration(us, ua);
    const ComplexVector psi = purify(state).vector;
    return psi.dot(kron(us.matrix, ua.matrix) * psi);
}

inline complex interference_amplitude(const MixedQubit& state, const AncillaScheme& scheme,
                                      double omega_s_t = 2.0 * kPi) {
    const BilocalPropagator u = scheme.at_system_angle(omega_s_t);
    return interference_amplitude(state, u.system, u.ancilla);
}

/// Wraps an angle into (−π, π].
inline double wrap_phase(double x) {
    double y = std::remainder(x, 2.0 * kPi);
    if (y <= -kPi) y += 2.0 * kPi;
    return y;
}

inline constexpr double kUndefinedPhaseVisibility = 1e-9;

struct PhaseResult {
    double phase = 0.0;  // principal value in (−π, π]; NaN when undefined
    double visibility = 0.0;
    bool defined = false;
};

inline PhaseResult phase_of(complex a) {
    const double v = std::abs(a);
    if (!(v > kUndefinedPhaseVisibility)) {
        return {std::numeric_limits<double>::quiet_NaN(), v, false};
    }
    double phase = std::atan2(a.imag(), a.real());
    if (phase == -kPi) phase = kPi;
    return {phase, v, true};
}

enum class CrossTerm { sqrt_p1p2, two_sqrt_p1p2 };

// The textbook form of the expression assumes the opposite sense of rotation.
// Reversing rotation sense maps every propagator to its complex conjugate and
// the expression to its negative, so `pinned` evaluates it with ω → −ω.
enum class SignConvention { pinned, reversed_sense };

/// Uhlmann phase, evaluated as −atan2(N, D) on the pole-free pair obtained by
/// multiplying through by cos(ω_s t/2)·cos(ω_a t/2).
inline double uhlmann_closed_form(const MixedQubit& state, double theta_s, double theta_a, double omega_s,
                                  double omega_a, double t, CrossTerm cross = CrossTerm::sqrt_p1p2,
                                  SignConvention convention = SignConvention::pinned) {
    const auto [ss, cs] = sincos_reduced(omega_s * t / 2.0);
    const auto [sa, ca] = sincos_reduced(omega_a * t / 2.0);
    const double root = std::sqrt(state.p1() * state.p2()) * (cross == CrossTerm::two_sqrt_p1p2 ? 2.0 : 1.0);
    const double n = state.purity() * (std::cos(theta_s) * ss * ca + std::cos(theta_a) * sa * cs);
    const double d = cs * ca + (std::cos(theta_s) * std::cos(theta_a) -
                                root * std::sin(theta_s) * std::sin(theta_a)) * ss * sa;
    const double literal = -std::atan2(n, d);
    return wrap_phase(convention == SignConvention::pinned ? -literal : literal);
}

inline double uhlmann_closed_form(const MixedQubit& state, const AncillaScheme& scheme,
                                  double omega_s_t = 2.0 * kPi, CrossTerm cross = CrossTerm::sqrt_p1p2,
                                  SignConvention convention = SignConvention::pinned) {
    const double t = omega_s_t / scheme.system.omega();
    return uhlmann_closed_form(state, scheme.theta_s, scheme.theta_a, scheme.system.omega(),
                               scheme.ancilla.omega(), t, cross, convention);
}

/// Cyclic (ω_s t = 2π) Sjöqvist phase −arctan(r·tan(Ω/2)), Ω = 2π(1 − cos θ_s),
/// in pole-free atan2 form.
inline double sjoqvist_closed_form(double r, double theta_s) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::out_of_range("sjoqvist_closed_form: r outside [0, 1]");
    check_theta_s(theta_s);
    const auto [s, c] = sincos_reduced(kPi * (1.0 - std::cos(theta_s)));
    return wrap_phase(-std::atan2(r * s, c));
}

/// Closed form for `scheme` at the cyclic point; NaN elsewhere for Sjöqvist.
inline double closed_form(const MixedQubit& state, const AncillaScheme& scheme, double omega_s_t = 2.0 * kPi) {
    if (scheme.kind == SchemeKind::uhlmann) return uhlmann_closed_form(state, scheme, omega_s_t);
    if (std::abs(omega_s_t - 2.0 * kPi) > 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return sjoqvist_closed_form(state.purity(), scheme.theta_s);
}

/// Circular mean and spread of a set of angle differences.
struct OffsetStats {
    double mean = 0.0;    // in (−π, π]
    double stddev = 0.0;  // of the wrapped deviations from the mean
    std::size_t count = 0;
};

inline OffsetStats offset_stats(std::span<const double> diffs) {
    OffsetStats out;
    double sx = 0.0;
    double sy = 0.0;
    for (double d : diffs) {
        sx += std::cos(d);
        sy += std::sin(d);
    }
    out.count = diffs.size();
    if (diffs.empty()) return out;
    out.mean = wrap_phase(std::atan2(sy, sx));
    double acc = 0.0;
    for (double d : diffs) {
        const double dev = wrap_phase(d - out.mean);
        acc += dev * dev;
    }
    out.stddev = std::sqrt(acc / static_cast<double>(diffs.size()));
    return out;
}

inline std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        out[i] = points == 1 ? lo : (i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1));
    }
    return out;
}

/// Offset between arg A and the closed form over an r×θ_s grid at ω_s t = 2π,
/// restricted to points whose visibility exceeds `min_visibility`.
inline OffsetStats measure_spinor_offset(SchemeKind kind, int points = 13, double min_visibility = 1e-6,
                                         CrossTerm cross = CrossTerm::sqrt_p1p2,
                                         SignConvention convention = SignConvention::pinned) {
    std::vector<double> diffs;
    for (double r : linspace(0.0, 1.0, points)) {
        const MixedQubit state = MixedQubit::from_purity(r);
        for (double theta_s : linspace(0.0, kPi / 2.0, points)) {
            const AncillaScheme scheme = make_scheme(kind, state, theta_s);
            const PhaseResult pr = phase_of(interference_amplitude(state, scheme));
            if (!pr.defined || pr.visibility <= min_visibility) continue;
            const double cf = kind == SchemeKind::uhlmann
                                  ? uhlmann_closed_form(state, scheme, 2.0 * kPi, cross, convention)
                                  : sjoqvist_closed_form(r, theta_s);
            diffs.push_back(wrap_phase(pr.phase - cf));
        }
    }
    return offset_stats(diffs);
}

}  // namespace mixgp
