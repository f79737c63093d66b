#pragma once

// Static-field spin-1/2 propagators.
//
// Convention: H = +(ω/2)(n·σ) with ω = μB ≥ 0 and ħ = 1. All sign freedom
// lives in the axis, so fields pointing "against" B_s are negated axes.
// Under this convention a pure |0> precessing once about (sin θ, 0, cos θ)
// picks up the geometric phase −π(1 − cos θ).

#include "mixgp/complex_linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mixgp {

class FieldSpec {
public:
    FieldSpec(double omega, const Vec3& axis) : omega_(omega), axis_(axis) {
        if (!(omega >= 0.0) || !std::isfinite(omega)) {
            throw std::domain_error("FieldSpec: precession rate must be finite and >= 0");
        }
        if (std::abs(axis.norm() - 1.0) > 1e-12) {
            throw std::domain_error("FieldSpec: axis is not a unit vector");
        }
    }

    double omega() const { return omega_; }
    const Vec3& axis() const { return axis_; }

    /// Generator H = (ω/2)(n·σ).
    ComplexMatrix hamiltonian() const { return 0.5 * omega_ * pauli::dot(axis_); }

private:
    double omega_;
    Vec3 axis_;
};

struct Propagator {
    ComplexMatrix matrix;
    double duration = 0.0;
};

inline void check_theta_s(double theta_s) {
    if (!(theta_s >= 0.0 && theta_s <= kPi / 2.0)) {
        throw std::out_of_range("theta_s must lie in [0, pi/2]");
    }
}

/// B_s = B_s·(sin θ_s, 0, cos θ_s).
inline FieldSpec system_field(double omega_s, double theta_s) {
    check_theta_s(theta_s);
    if (!(omega_s > 0.0)) {
        throw std::domain_error("system_field: omega_s must be positive");
    }
    return FieldSpec(omega_s, Vec3(std::sin(theta_s), 0.0, std::cos(theta_s)));
}

inline Propagator propagator(const FieldSpec& field, double t) {
    if (!(t >= 0.0)) {
        throw std::domain_error("propagator: duration must be >= 0");
    }
    return {su2_exp(field.axis(), field.omega() * t), t};
}

/// A system and an ancilla propagator for the same elapsed time.
struct BilocalPropagator {
    Propagator system;
    Propagator ancilla;

    ComplexMatrix tensor() const { return kron(system.matrix, ancilla.matrix); }
};

/// Independent precession of system and ancilla in two static fields.
struct BilocalEvolution {
    FieldSpec system;
    FieldSpec ancilla;

    BilocalPropagator operator()(double t) const { return {propagator(system, t), propagator(ancilla, t)}; }
};

/// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a single-qubit state vector.
inline Vec3 bloch_vector(const ComplexVector& psi) {
    auto ev = [&](const ComplexMatrix& op) { return (psi.adjoint() * op * psi)(0).real(); };
    return {ev(pauli::x()), ev(pauli::y()), ev(pauli::z())};
}

}  // namespace mixgp
