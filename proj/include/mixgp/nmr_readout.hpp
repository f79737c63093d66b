#pragma once

// Liquid-state NMR readout of the probe spin: free evolution under the
// weak-coupling Hamiltonian, quadrature-detected FID, complex spectrum, and
// phase from the integrated real and imaginary spectra.

#include "mixgp/complex_linalg.hpp"
#include "mixgp/geometric_phase.hpp"
#include "mixgp/interferometer.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixgp {

/// Rotating-frame offsets ω_i (rad/s) and scalar couplings J_ij (Hz).
struct SpinSystem {
    std::array<double, 3> larmor_offsets{0.0, 0.0, 0.0};
    double j12 = -1.3;
    double j13 = 54.1;
    double j23 = 34.9;

    void validate() const {
        for (double w : larmor_offsets) {
            if (!std::isfinite(w)) throw std::domain_error("SpinSystem: non-finite offset");
        }
        if (!std::isfinite(j12) || !std::isfinite(j13) || !std::isfinite(j23)) {
            throw std::domain_error("SpinSystem: non-finite coupling");
        }
    }
};

struct AcquisitionConfig {
    double dwell = 2e-3;  // s
    int npoints = 4096;
    double t2 = 0.5;      // s

    void validate() const {
        if (!(dwell > 0.0)) throw std::domain_error("AcquisitionConfig: dwell must be positive");
        if (npoints < 2 || !std::has_single_bit(static_cast<unsigned>(npoints))) {
            throw std::domain_error("AcquisitionConfig: npoints must be a power of two");
        }
        if (!(t2 > 0.0)) throw std::domain_error("AcquisitionConfig: t2 must be positive");
    }

    /// Half width at half maximum of a line, in Hz.
    double half_width() const { return 1.0 / (2.0 * kPi * t2); }
};

struct FID {
    std::vector<complex> samples;
    double dwell = 0.0;
};

struct Spectrum {
    std::vector<complex> values;
    std::vector<double> freq_axis;  // Hz, ascending, zero at index N/2

    double bin_width() const { return freq_axis.size() > 1 ? freq_axis[1] - freq_axis[0] : 0.0; }
};

/// H = Σ ω_i I_z^i + 2π Σ_{i<j} J_ij I_z^i I_z^j (rad/s).
inline ComplexMatrix internal_hamiltonian(const SpinSystem& sys) {
    sys.validate();
    const ComplexMatrix iz = 0.5 * pauli::z();
    const ComplexMatrix id = pauli::identity();
    const ComplexMatrix iz1 = kron(iz, id, id);
    const ComplexMatrix iz2 = kron(id, iz, id);
    const ComplexMatrix iz3 = kron(id, id, iz);
    const double two_pi = 2.0 * kPi;
    return sys.larmor_offsets[0] * iz1 + sys.larmor_offsets[1] * iz2 + sys.larmor_offsets[2] * iz3 +
           two_pi * (sys.j12 * iz1 * iz2 + sys.j13 * iz1 * iz3 + sys.j23 * iz2 * iz3);
}

/// σ_− on the probe, normalized as (σ_x − iσ_y)/2 = |1><0|.
inline ComplexMatrix probe_lowering() {
    return detail::embed(0.5 * (pauli::x() - kI * pauli::y()), qubit::probe);
}

/// samples[k] = Tr[ρ(t_k) σ_−^p]·exp(−t_k/T2), t_k = k·dwell.
inline FID acquire_fid(const Register3& reg, const SpinSystem& sys, const AcquisitionConfig& cfg) {
    if (!reg.is_density()) throw std::invalid_argument("acquire_fid: register must hold a density matrix");
    cfg.validate();
    const Eigen::MatrixXcd h = internal_hamiltonian(sys);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    const Eigen::MatrixXcd& v = eig.eigenvectors();
    const Eigen::VectorXd& e = eig.eigenvalues();
    // In the eigenbasis ρ_ij(t) = ρ_ij·exp(−i(E_i − E_j)t); the signal is Σ_ij ρ_ij(t)·O_ji.
    const Eigen::MatrixXcd rho = v.adjoint() * Eigen::MatrixXcd(reg.density()) * v;
    const Eigen::MatrixXcd obs = v.adjoint() * Eigen::MatrixXcd(probe_lowering()) * v;

    struct Term {
        complex weight;
        double freq;
    };
    std::vector<Term> terms;
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            const complex w = rho(i, j) * obs(j, i);
            if (w != complex{}) terms.push_back({w, e(i) - e(j)});
        }
    }

    FID fid{std::vector<complex>(static_cast<std::size_t>(cfg.npoints)), cfg.dwell};
    for (int k = 0; k < cfg.npoints; ++k) {
        const double t = k * cfg.dwell;
        complex acc{};
        for (const Term& term : terms) acc += term.weight * std::exp(-kI * term.freq * t);
        fid.samples[k] = acc * std::exp(-t / cfg.t2);
    }
    return fid;
}

inline FID conjugated(FID fid) {
    for (complex& s : fid.samples) s = std::conj(s);
    return fid;
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// In-place DFT, out[j] = Σ_k in[k]·exp(∓2πi jk/N) for FFTW_FORWARD/BACKWARD.
inline void fftw_transform(std::vector<complex>& data, int sign) {
    const int n = static_cast<int>(data.size());
    auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, buffer, buffer, sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    fftw_execute(plan);
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace detail

/// Complex spectrum S(f_j) = Σ_k x_k exp(−2πi f_j t_k), centered so that
/// index N/2 is 0 Hz.
inline Spectrum dft(const FID& fid) {
    const std::size_t n = fid.samples.size();
    if (n < 2 || !std::has_single_bit(n)) throw std::domain_error("dft: length must be a power of two");
    if (!(fid.dwell > 0.0)) throw std::domain_error("dft: dwell must be positive");
    std::vector<complex> data = fid.samples;
    detail::fftw_transform(data, FFTW_FORWARD);

    Spectrum spec;
    spec.values.resize(n);
    spec.freq_axis.resize(n);
    const double df = 1.0 / (static_cast<double>(n) * fid.dwell);
    const std::size_t half = n / 2;
    for (std::size_t j = 0; j < n; ++j) {
        spec.values[j] = data[(j + half) % n];
        spec.freq_axis[j] = (static_cast<double>(j) - static_cast<double>(half)) * df;
    }
    return spec;
}

/// Time samples behind a centered spectrum (inverse of dft).
inline FID inverse_dft(const Spectrum& spec) {
    const std::size_t n = spec.values.size();
    if (n < 2 || !std::has_single_bit(n)) throw std::domain_error("inverse_dft: length must be a power of two");
    const std::size_t half = n / 2;
    std::vector<complex> data(n);
    for (std::size_t j = 0; j < n; ++j) data[(j + half) % n] = spec.values[j];
    detail::fftw_transform(data, FFTW_BACKWARD);
    for (complex& x : data) x /= static_cast<double>(n);
    return {std::move(data), 1.0 / (static_cast<double>(n) * spec.bin_width())};
}

struct FrequencyWindow {
    double lo;
    double hi;
};

/// The four probe lines ±(J13 ± J12)/2 Hz, ascending.
inline std::array<double, 4> probe_multiplet(const SpinSystem& sys) {
    std::array<double, 4> f = {0.5 * (sys.j13 + sys.j12), 0.5 * (sys.j13 - sys.j12),
                               -0.5 * (sys.j13 + sys.j12), -0.5 * (sys.j13 - sys.j12)};
    std::sort(f.begin(), f.end());
    return f;
}

/// Probe lines carried by the interferometer output. |Ψ_in> only populates
/// |00> and |11> of (system, ancilla), where the probe precesses at
/// ±(J12 + J13)/2 Hz.
inline std::array<double, 2> interferometer_lines(const SpinSystem& sys) {
    const double f = 0.5 * (sys.j12 + sys.j13);
    return {-std::abs(f), std::abs(f)};
}

/// ±`half_width_factor` line half-widths around each frequency.
inline std::vector<FrequencyWindow> windows_around(std::span<const double> lines, const AcquisitionConfig& cfg,
                                                   double half_width_factor = 2.0) {
    const double w = half_width_factor * cfg.half_width();
    std::vector<FrequencyWindow> out;
    for (double f : lines) out.push_back({f - w, f + w});
    return out;
}

namespace detail {

/// Value of the band-limited interpolant S(f) = Σ_k x_k exp(−2πi f k dt).
inline complex spectrum_at(const FID& x, double f) {
    complex acc{};
    for (std::size_t k = 0; k < x.samples.size(); ++k) {
        acc += x.samples[k] * std::exp(-2.0 * kPi * kI * f * (static_cast<double>(k) * x.dwell));
    }
    return acc;
}

/// ∫_lo^hi S(f) df, exact for the interpolant.
inline complex spectrum_integral(const FID& x, double lo, double hi) {
    complex acc = x.samples.empty() ? complex{} : x.samples[0] * (hi - lo);
    for (std::size_t k = 1; k < x.samples.size(); ++k) {
        const double t = static_cast<double>(k) * x.dwell;
        const complex kernel =
            (std::exp(-2.0 * kPi * kI * hi * t) - std::exp(-2.0 * kPi * kI * lo * t)) / (-2.0 * kPi * kI * t);
        acc += x.samples[k] * kernel;
    }
    return acc;
}

inline void check_windows(const Spectrum& spec, std::span<const FrequencyWindow> windows) {
    if (windows.empty()) throw std::invalid_argument("extract_phase: no integration windows");
    const double f_min = spec.freq_axis.front();
    const double f_max = spec.freq_axis.back();
    std::vector<FrequencyWindow> sorted(windows.begin(), windows.end());
    std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!(sorted[i].lo < sorted[i].hi)) throw std::invalid_argument("extract_phase: empty window");
        if (sorted[i].lo < f_min || sorted[i].hi > f_max) {
            throw std::out_of_range("extract_phase: window outside the frequency axis");
        }
        if (i > 0 && sorted[i].lo < sorted[i - 1].hi) {
            throw std::invalid_argument("extract_phase: overlapping windows");
        }
    }
}

}  // namespace detail

/// Int_Re + i·Int_Im: the spectrum integrated over each window after removing
/// a straight baseline through the window edges.
inline complex window_integral(const Spectrum& spec, std::span<const FrequencyWindow> windows,
                               bool baseline_correction = true) {
    detail::check_windows(spec, windows);
    const FID x = inverse_dft(spec);
    complex total{};
    for (const FrequencyWindow& w : windows) {
        total += detail::spectrum_integral(x, w.lo, w.hi);
        if (baseline_correction) {
            total -= 0.5 * (w.hi - w.lo) * (detail::spectrum_at(x, w.lo) + detail::spectrum_at(x, w.hi));
        }
    }
    return total;
}

/// γ = atan2(Int_Im, Int_Re); visibility is |Int| / reference.
inline PhaseResult extract_phase(const Spectrum& spec, std::span<const FrequencyWindow> windows,
                                 double reference = 1.0) {
    const complex integral = window_integral(spec, windows);
    if (std::abs(integral.real()) < 1e-12 && std::abs(integral.imag()) < 1e-12) {
        return {std::numeric_limits<double>::quiet_NaN(), 0.0, false};
    }
    double phase = std::atan2(integral.imag(), integral.real());
    if (phase == -kPi) phase = kPi;
    const PhaseResult out{phase, std::abs(integral) / reference, true};
    return out;
}

/// Spectrum of the probe after the interferometer, with the FID conjugated so
/// that its phase reads arg<Ψ_in|U|Ψ_in> rather than its conjugate.
inline Spectrum interferometer_spectrum(const Register3& output, const SpinSystem& sys,
                                        const AcquisitionConfig& cfg) {
    return dft(conjugated(acquire_fid(output, sys, cfg)));
}

/// |Int| for ε = 1 and <Ψ_in|U|Ψ_in> = 1 under the same windows.
inline double reference_integral(const SpinSystem& sys, const AcquisitionConfig& cfg,
                                 std::span<const FrequencyWindow> windows) {
    const MixedQubit state(1.0, 0.0);
    const AncillaScheme idle = sjoqvist_ancilla(0.0, 1.0);
    const Register3 out = pseudo_pure_output(state, idle, PseudoPureConfig{1.0}, 0.0);
    return std::abs(window_integral(interferometer_spectrum(out, sys, cfg), windows));
}

/// Full chain: ρ_000 → interferometer → FID → spectrum → integrated phase.
/// Visibility is normalized by ε times the reference integral, so it
/// estimates |<Ψ_in|U|Ψ_in>|.
inline PhaseResult nmr_phase(const MixedQubit& state, const AncillaScheme& scheme, const PseudoPureConfig& pps,
                             const SpinSystem& sys, const AcquisitionConfig& cfg,
                             double omega_s_t = 2.0 * kPi) {
    const Register3 out = pseudo_pure_output(state, scheme, pps, omega_s_t);
    const auto lines = interferometer_lines(sys);
    const auto windows = windows_around(lines, cfg);
    return extract_phase(interferometer_spectrum(out, sys, cfg), windows,
                         pps.epsilon * reference_integral(sys, cfg, windows));
}

inline void write_csv(std::ostream& os, const FID& fid) {
    char line[160];
    os << "index,time_s,re,im\n";
    for (std::size_t k = 0; k < fid.samples.size(); ++k) {
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g\n", k, static_cast<double>(k) * fid.dwell,
                      fid.samples[k].real(), fid.samples[k].imag());
        os << line;
    }
}

inline void write_csv(std::ostream& os, const Spectrum& spec) {
    char line[160];
    os << "index,freq_hz,re,im\n";
    for (std::size_t j = 0; j < spec.values.size(); ++j) {
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g\n", j, spec.freq_axis[j], spec.values[j].real(),
                      spec.values[j].imag());
        os << line;
    }
}

}  // namespace mixgp
