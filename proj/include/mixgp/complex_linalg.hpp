#pragma once

// Dense complex linear algebra for registers of at most three qubits.
//
// Every matrix here is at most 8x8, so storage is Eigen's fixed-capacity
// dynamic matrix: no heap traffic and no sparsity.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixgp {

using complex = std::complex<double>;

inline constexpr int kMaxDim = 8;
inline constexpr double kPi = std::numbers::pi;
inline constexpr complex kI{0.0, 1.0};

using ComplexMatrix =
    Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDim, kMaxDim>;
using ComplexVector = Eigen::Matrix<complex, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Vec3 = Eigen::Vector3d;

namespace pauli {

inline ComplexMatrix identity(int dim = 2) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline ComplexMatrix y() {
    ComplexMatrix m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return m;
}

inline ComplexMatrix z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

/// n·σ for a real 3-vector.
inline ComplexMatrix dot(const Vec3& n) { return n.x() * x() + n.y() * y() + n.z() * z(); }

}  // namespace pauli

/// Computational basis vector |index> of the given dimension.
inline ComplexVector basis_vector(int dim, int index) {
    if (dim < 1 || dim > kMaxDim || index < 0 || index >= dim) {
        throw std::invalid_argument("basis_vector: index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return v;
}

inline ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) {
    return a * b.adjoint();
}

/// Largest entry modulus; the norm used by every tolerance in this library.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_residual(const ComplexMatrix& u) {
    return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols()));
}

inline double hermiticity_residual(const ComplexMatrix& h) { return max_abs(h - h.adjoint()); }

/// Kronecker product; (a⊗b)[i·rb+k, j·cb+l] = a[i,j]·b[k,l].
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const Eigen::Index rows = a.rows() * b.rows();
    const Eigen::Index cols = a.cols() * b.cols();
    if (rows > kMaxDim || cols > kMaxDim) {
        throw std::invalid_argument("kron: result exceeds " + std::to_string(kMaxDim) + "x" +
                                    std::to_string(kMaxDim));
    }
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    return kron(kron(a, b), c);
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    if (a.size() * b.size() > kMaxDim) {
        throw std::invalid_argument("kron: vector result exceeds dimension 8");
    }
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

/// (sin x, cos x) with the quadrant reduced first, so exact multiples of π/2
/// produce exact 0 and ±1.
inline std::pair<double, double> sincos_reduced(double x) {
    constexpr double half_pi = kPi / 2.0;
    const double q = std::nearbyint(x / half_pi);
    const double rem = std::fma(-q, half_pi, x);
    const double s = rem == 0.0 ? 0.0 : std::sin(rem);
    const double c = rem == 0.0 ? 1.0 : std::cos(rem);
    const long long quadrant = ((static_cast<long long>(q) % 4) + 4) % 4;
    switch (quadrant) {
        case 0: return {s, c};
        case 1: return {c, -s};
        case 2: return {-s, -c};
        default: return {-c, s};
    }
}

/// exp(−i·(angle/2)·(axis·σ)) = cos(angle/2)·I − i·sin(angle/2)·(axis·σ).
inline ComplexMatrix su2_exp(const Vec3& axis, double angle) {
    if (std::abs(axis.norm() - 1.0) > 1e-12) {
        throw std::domain_error("su2_exp: axis is not a unit vector");
    }
    if (!std::isfinite(angle)) {
        throw std::domain_error("su2_exp: non-finite angle");
    }
    const auto [s, c] = sincos_reduced(angle / 2.0);
    return c * pauli::identity() - kI * s * pauli::dot(axis);
}

/// exp(−i·h·t) for Hermitian h, via its eigendecomposition.
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw std::invalid_argument("expm_hermitian: matrix must be square and non-empty");
    }
    if (hermiticity_residual(h) > 1e-10) {
        throw std::domain_error("expm_hermitian: generator is not Hermitian");
    }
    const Eigen::MatrixXcd dense = h;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense);
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("expm_hermitian: eigendecomposition failed");
    }
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    Eigen::VectorXcd phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases(k) = std::exp(-kI * lambda(k) * t);
    }
    const Eigen::MatrixXcd& v = eig.eigenvectors();
    return ComplexMatrix(v * phases.asDiagonal() * v.adjoint());
}

/// Reduced matrix over the factors listed in `keep` (order of `keep` is
/// irrelevant; kept factors stay in their original order).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::span<const int> dims,
                                   std::span<const int> keep) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("partial_trace: matrix is not square");
    }
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("partial_trace: factor dimension < 1");
        total *= d;
    }
    if (total != rho.rows()) {
        throw std::invalid_argument("partial_trace: factor dimensions do not match matrix");
    }
    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n || kept[k]) {
            throw std::invalid_argument("partial_trace: invalid keep index");
        }
        kept[k] = true;
    }

    // Split a flat index into (kept, traced) sub-indices, both row-major.
    auto split = [&](int flat) {
        int kept_index = 0;
        int traced_index = 0;
        int kept_stride = 1;
        int traced_stride = 1;
        for (int f = n - 1; f >= 0; --f) {
            const int digit = flat % dims[f];
            flat /= dims[f];
            if (kept[f]) {
                kept_index += digit * kept_stride;
                kept_stride *= dims[f];
            } else {
                traced_index += digit * traced_stride;
                traced_stride *= dims[f];
            }
        }
        return std::pair{kept_index, traced_index};
    };

    int out_dim = 1;
    for (int f = 0; f < n; ++f) {
        if (kept[f]) out_dim *= dims[f];
    }
    ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
    for (int i = 0; i < total; ++i) {
        const auto [ki, ti] = split(i);
        for (int j = 0; j < total; ++j) {
            const auto [kj, tj] = split(j);
            if (ti == tj) out(ki, kj) += rho(i, j);
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix& rho, std::initializer_list<int> dims,
                                   std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(dims.begin(), dims.size()),
                         std::span<const int>(keep.begin(), keep.size()));
}

}  // namespace mixgp
