#pragma once

// Diagonal qubit mixed states, their canonical purification, and
// finite-difference diagnostics for the two parallel-transport conditions.

#include "mixgp/complex_linalg.hpp"
#include "mixgp/spin_dynamics.hpp"

#include <cmath>
#include <concepts>
#include <stdexcept>

namespace mixgp {

/// ρ_s = p1|0><0| + p2|1><1| with p1 ≥ p2; purity r = p1 − p2.
class MixedQubit {
public:
    MixedQubit(double p1, double p2) : p1_(p1), p2_(p2) {
        if (!(p2 >= 0.0) || !(p1 >= p2) || std::abs(p1 + p2 - 1.0) > 1e-12) {
            throw std::domain_error("MixedQubit: need p1 >= p2 >= 0 and p1 + p2 = 1");
        }
    }

    static MixedQubit from_purity(double r) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw std::out_of_range("MixedQubit: purity must lie in [0, 1]");
        }
        return MixedQubit(0.5 * (1.0 + r), 0.5 * (1.0 - r));
    }

    double p1() const { return p1_; }
    double p2() const { return p2_; }
    double purity() const { return p1_ - p2_; }

    ComplexMatrix density() const {
        ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
        rho(0, 0) = p1_;
        rho(1, 1) = p2_;
        return rho;
    }

    ComplexMatrix sqrt_density() const {
        ComplexMatrix s = ComplexMatrix::Zero(2, 2);
        s(0, 0) = std::sqrt(p1_);
        s(1, 1) = std::sqrt(p2_);
        return s;
    }

private:
    double p1_;
    double p2_;
};

/// |Ψ> over system ⊗ ancilla, system index most significant.
struct PurifiedState {
    ComplexVector vector;
};

inline PurifiedState purify(const MixedQubit& state) {
    ComplexVector psi = ComplexVector::Zero(4);
    psi(0) = std::sqrt(state.p1());
    psi(3) = std::sqrt(state.p2());
    return {psi};
}

/// w with vec(w) = |Ψ(t)>; rows index the system, columns the ancilla.
struct AmplitudeOperator {
    ComplexMatrix w;
    double t = 0.0;

    ComplexVector vectorized() const {
        ComplexVector v(w.size());
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) v(i * w.cols() + j) = w(i, j);
        }
        return v;
    }
};

inline void check_same_duration(const Propagator& a, const Propagator& b) {
    if (std::abs(a.duration - b.duration) > 1e-12 * std::max(1.0, std::abs(a.duration))) {
        throw std::invalid_argument("system and ancilla propagators have different durations");
    }
}

inline AmplitudeOperator amplitude_operator(const Propagator& us, const Propagator& ua,
                                            const MixedQubit& state) {
    check_same_duration(us, ua);
    return {us.matrix * state.sqrt_density() * ua.matrix.transpose(), us.duration};
}

template <class E>
concept BilocalScheme = requires(const E& e, double t) {
    { e(t) } -> std::convertible_to<BilocalPropagator>;
};

namespace detail {

inline void check_step(double delta) {
    if (!(delta > 0.0)) throw std::domain_error("finite-difference step must be positive");
}

template <BilocalScheme E>
ComplexVector evolved(const E& evolution, const ComplexVector& psi0, double t) {
    const BilocalPropagator u = evolution(t);
    return u.tensor() * psi0;
}

}  // namespace detail

/// |<Ψ(t)|Ψ'(t)>| by central differences; zero when |Ψ> is parallel
/// transported in the pure-state sense.
template <BilocalScheme E>
double pure_transport_residual(const E& evolution, const MixedQubit& state, double t, double delta) {
    detail::check_step(delta);
    const ComplexVector psi0 = purify(state).vector;
    const ComplexVector now = detail::evolved(evolution, psi0, t);
    const ComplexVector ahead = detail::evolved(evolution, psi0, t + delta);
    const ComplexVector behind = detail::evolved(evolution, psi0, t - delta);
    return std::abs(now.dot((ahead - behind) / (2.0 * delta)));
}

/// ‖M − M†‖_max with M = w† dw/dt; zero when the amplitude obeys Uhlmann's
/// parallelity condition (w† dw/dt Hermitian).
template <BilocalScheme E>
double uhlmann_parallel_residual(const E& evolution, const MixedQubit& state, double t, double delta) {
    detail::check_step(delta);
    auto w_at = [&](double tau) {
        const BilocalPropagator u = evolution(tau);
        return amplitude_operator(u.system, u.ancilla, state).w;
    };
    const ComplexMatrix w = w_at(t);
    const ComplexMatrix m = w.adjoint() * (w_at(t + delta) - w_at(t - delta)) / (2.0 * delta);
    return hermiticity_residual(m);
}

}  // namespace mixgp
