#pragma once

// Three-qubit interferometer: probe (qubit 0), system (1), ancilla (2).
// Basis index = 4·probe + 2·system + ancilla.

#include "mixgp/complex_linalg.hpp"
#include "mixgp/geometric_phase.hpp"
#include "mixgp/purification.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

namespace mixgp {

inline constexpr int kRegisterQubits = 3;
inline constexpr int kRegisterDim = 8;

namespace qubit {
inline constexpr int probe = 0;
inline constexpr int system = 1;
inline constexpr int ancilla = 2;
}  // namespace qubit

namespace gate {

/// R_y(β) = exp(−i(β/2)σ_y).
struct Ry {
    double beta;
    int target;
};

/// R_y(π/2): |0> → (|0>+|1>)/√2.
struct PseudoHadamard {
    int target;
};

struct Cnot {
    int control;
    int target;
};

/// U_s⊗U_a on (system, ancilla) iff the probe is |1>.
struct ControlledBilocal {
    ComplexMatrix us;
    ComplexMatrix ua;
};

}  // namespace gate

using Gate = std::variant<gate::Ry, gate::PseudoHadamard, gate::Cnot, gate::ControlledBilocal>;

namespace detail {

inline void check_target(int q) {
    if (q < 0 || q >= kRegisterQubits) throw std::out_of_range("gate target must be 0, 1 or 2");
}

inline ComplexMatrix projector(int bit) {
    ComplexMatrix p = ComplexMatrix::Zero(2, 2);
    p(bit, bit) = 1.0;
    return p;
}

/// Embeds a one-qubit operator at position `target`.
inline ComplexMatrix embed(const ComplexMatrix& op, int target) {
    check_target(target);
    ComplexMatrix factors[kRegisterQubits] = {pauli::identity(), pauli::identity(), pauli::identity()};
    factors[target] = op;
    return kron(factors[0], factors[1], factors[2]);
}

inline ComplexMatrix ry_matrix(double beta) {
    if (!std::isfinite(beta)) throw std::domain_error("Ry: non-finite angle");
    return su2_exp(Vec3::UnitY(), beta);
}

}  // namespace detail

inline ComplexMatrix gate_matrix(const Gate& g) {
    return std::visit(
        [](const auto& op) -> ComplexMatrix {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, gate::Ry>) {
                return detail::embed(detail::ry_matrix(op.beta), op.target);
            } else if constexpr (std::is_same_v<T, gate::PseudoHadamard>) {
                return detail::embed(detail::ry_matrix(kPi / 2.0), op.target);
            } else if constexpr (std::is_same_v<T, gate::Cnot>) {
                detail::check_target(op.control);
                detail::check_target(op.target);
                if (op.control == op.target) throw std::invalid_argument("Cnot: control equals target");
                ComplexMatrix factors0[kRegisterQubits] = {pauli::identity(), pauli::identity(), pauli::identity()};
                ComplexMatrix factors1[kRegisterQubits] = {pauli::identity(), pauli::identity(), pauli::identity()};
                factors0[op.control] = detail::projector(0);
                factors1[op.control] = detail::projector(1);
                factors1[op.target] = pauli::x();
                return kron(factors0[0], factors0[1], factors0[2]) + kron(factors1[0], factors1[1], factors1[2]);
            } else {
                if (op.us.rows() != 2 || op.us.cols() != 2 || op.ua.rows() != 2 || op.ua.cols() != 2) {
                    throw std::invalid_argument("ControlledBilocal: factors must be 2x2");
                }
                return kron(detail::projector(0), pauli::identity(4)) +
                       kron(detail::projector(1), kron(op.us, op.ua));
            }
        },
        g);
}

struct PseudoPureConfig {
    double epsilon = 1e-5;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) {
            throw std::out_of_range("PseudoPureConfig: epsilon must lie in (0, 1]");
        }
    }
};

/// Three-qubit register held either as a state vector or a density matrix.
class Register3 {
public:
    static Register3 ground_state() { return Register3(basis_vector(kRegisterDim, 0)); }

    /// ρ_000 = (1−ε)/8·1 + ε|000><000|.
    static Register3 pseudo_pure(const PseudoPureConfig& cfg) {
        cfg.validate();
        const ComplexVector g = basis_vector(kRegisterDim, 0);
        return Register3(ComplexMatrix((1.0 - cfg.epsilon) / kRegisterDim * pauli::identity(kRegisterDim) +
                                       cfg.epsilon * outer(g, g)));
    }

    explicit Register3(ComplexVector state) : data_(std::move(state)) {
        const auto& v = std::get<ComplexVector>(data_);
        if (v.size() != kRegisterDim) throw std::invalid_argument("Register3: state must have dimension 8");
        if (std::abs(v.norm() - 1.0) > 1e-12) throw std::domain_error("Register3: state is not normalized");
    }

    explicit Register3(ComplexMatrix density) : data_(std::move(density)) {
        const auto& m = std::get<ComplexMatrix>(data_);
        if (m.rows() != kRegisterDim || m.cols() != kRegisterDim) {
            throw std::invalid_argument("Register3: density must be 8x8");
        }
        if (std::abs(m.trace() - 1.0) > 1e-12) throw std::domain_error("Register3: density trace is not 1");
        if (hermiticity_residual(m) > 1e-10) throw std::domain_error("Register3: density is not Hermitian");
        const Eigen::MatrixXcd dense = m;
        if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense, Eigen::EigenvaluesOnly).eigenvalues().minCoeff() <
            -1e-10) {
            throw std::domain_error("Register3: density is not positive semidefinite");
        }
    }

    bool is_density() const { return std::holds_alternative<ComplexMatrix>(data_); }
    const ComplexVector& state() const { return std::get<ComplexVector>(data_); }
    const ComplexMatrix& density() const { return std::get<ComplexMatrix>(data_); }

    ComplexMatrix as_density() const { return is_density() ? density() : outer(state(), state()); }

    void apply(const ComplexMatrix& u) {
        if (is_density()) {
            auto& m = std::get<ComplexMatrix>(data_);
            m = u * m * u.adjoint();
        } else {
            auto& v = std::get<ComplexVector>(data_);
            v = u * v;
        }
    }

    void apply(const Gate& g) { apply(gate_matrix(g)); }

    ComplexMatrix probe_state() const {
        static constexpr int dims[] = {2, 2, 2};
        static constexpr int keep[] = {qubit::probe};
        return partial_trace(as_density(), dims, keep);
    }

private:
    std::variant<ComplexVector, ComplexMatrix> data_;
};

/// Preparation, beam splitter and controlled bilocal evolution, in order.
inline std::vector<Gate> interferometer_sequence(const MixedQubit& state, const ComplexMatrix& us,
                                                 const ComplexMatrix& ua) {
    return {
        gate::Ry{2.0 * std::acos(std::sqrt(state.p1())), qubit::system},
        gate::Cnot{qubit::system, qubit::ancilla},
        gate::PseudoHadamard{qubit::probe},
        gate::ControlledBilocal{us, ua},
    };
}

/// A = ⟨σ_x⟩ + i⟨σ_y⟩ of the probe. This equals conj⟨σ_−⟩ for σ_− = σ_x − iσ_y
/// and, after the interferometer, <Ψ_in|U|Ψ_in> (times ε for ρ_000 input).
inline complex probe_readout(const Register3& reg) {
    const ComplexMatrix rho = reg.probe_state();
    const double sx = (rho * pauli::x()).trace().real();
    const double sy = (rho * pauli::y()).trace().real();
    return {sx, sy};
}

inline Register3 run_sequence(Register3 reg, const MixedQubit& state, const AncillaScheme& scheme,
                              double omega_s_t) {
    const BilocalPropagator u = scheme.at_system_angle(omega_s_t);
    for (const Gate& g : interferometer_sequence(state, u.system.matrix, u.ancilla.matrix)) reg.apply(g);
    return reg;
}

inline PhaseResult run_interferometer(const MixedQubit& state, const AncillaScheme& scheme,
                                      double omega_s_t = 2.0 * kPi) {
    return phase_of(probe_readout(run_sequence(Register3::ground_state(), state, scheme, omega_s_t)));
}

/// Density matrix after the full sequence applied to ρ_000.
inline Register3 pseudo_pure_output(const MixedQubit& state, const AncillaScheme& scheme,
                                    const PseudoPureConfig& cfg, double omega_s_t = 2.0 * kPi) {
    return run_sequence(Register3::pseudo_pure(cfg), state, scheme, omega_s_t);
}

inline PhaseResult run_pseudo_pure(const MixedQubit& state, const AncillaScheme& scheme,
                                   const PseudoPureConfig& cfg, double omega_s_t = 2.0 * kPi) {
    return phase_of(probe_readout(pseudo_pure_output(state, scheme, cfg, omega_s_t)));
}

}  // namespace mixgp
