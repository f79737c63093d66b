#pragma once

// Executes the library's invariants end to end and reports margins.

#include "mixgp/config.hpp"
#include "mixgp/geometric_phase.hpp"
#include "mixgp/interferometer.hpp"
#include "mixgp/nmr_readout.hpp"
#include "mixgp/purification.hpp"
#include "mixgp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mixgp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // worst observed quantity
    double threshold = 0.0;  // pass iff value <= threshold
    bool informational = false;
    std::string detail;
};

namespace detail {

inline CheckResult bounded(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value <= threshold, value, threshold, false, std::move(detail)};
}

/// Distance of an angle from the nearest of {0, π}.
inline double distance_to_spinor_offsets(double mean) {
    return std::min(std::abs(wrap_phase(mean)), std::abs(wrap_phase(mean - kPi)));
}

inline CheckResult formula_check(std::string name, SchemeKind kind, const Settings& s) {
    const OffsetStats st = measure_spinor_offset(kind, s.grid_points, 1e-6, s.cross_term);
    const double worst = std::max(st.stddev, distance_to_spinor_offsets(st.mean));
    return bounded(std::move(name), worst, s.tol.formula,
                   "offset=" + format_double(st.mean) + " stddev=" + format_double(st.stddev) +
                       " points=" + std::to_string(st.count));
}

}  // namespace detail

inline CheckResult check_uhlmann_conditions(const Settings& s) {
    double worst = 0.0;
    for (double r : linspace(0.0, 1.0, s.grid_points)) {
        const MixedQubit state = MixedQubit::from_purity(r);
        for (double theta_s : linspace(0.0, kPi / 2.0 - 1e-6, s.grid_points)) {
            AncillaScheme scheme = uhlmann_ancilla(state, theta_s, 1.0);
            scheme.theta_a += s.fault_theta_a;
            const ConditionResiduals res = uhlmann_condition_residuals(state, scheme);
            worst = std::max({worst, res.tangent, res.projection});
        }
    }
    return detail::bounded("uhlmann_conditions", worst, s.tol.condition);
}

/// Samples (r, θ_s) pairs used by the parallel-transport checks.
inline std::vector<std::pair<double, double>> transport_sample_points() {
    return {{1.0 / 3.0, kPi / 4.0}, {2.0 / 3.0, kPi / 6.0}, {0.0, kPi / 3.0}, {1.0, kPi / 8.0}, {0.5, 5.0 * kPi / 12.0}};
}

inline CheckResult check_parallel_transport(const Settings& s) {
    const double omega_s = 1.0;
    const double delta = 1e-6 / omega_s;
    const double period = 2.0 * kPi / omega_s;
    double worst = 0.0;
    for (const auto& [r, theta_s] : transport_sample_points()) {
        const MixedQubit state = MixedQubit::from_purity(r);
        const BilocalEvolution sjo = sjoqvist_ancilla(theta_s, omega_s).evolution();
        const BilocalEvolution uhl = uhlmann_ancilla(state, theta_s, omega_s).evolution();
        for (int k = 1; k <= 16; ++k) {
            const double t = period * k / 17.0;
            worst = std::max(worst, pure_transport_residual(sjo, state, t, delta) / omega_s);
            worst = std::max(worst, uhlmann_parallel_residual(uhl, state, t, delta) / omega_s);
        }
    }
    return detail::bounded("parallel_transport", worst, s.tol.transport);
}

inline CheckResult check_circuit_equivalence(const Settings& s) {
    double worst = 0.0;
    for (const SweepSpec& spec : fig4_preset(s.fig4_points)) {
        SweepSpec circuit = spec;
        circuit.backend = Backend::circuit;
        const auto a = run_sweep(spec, s.threads);
        const auto c = run_sweep(circuit, s.threads);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::isnan(a[i].phase_rad) != std::isnan(c[i].phase_rad)) {
                return detail::bounded("circuit_equivalence", 1.0, 0.0, "definedness differs");
            }
            if (std::isnan(a[i].phase_rad)) continue;
            worst = std::max(worst, std::abs(wrap_phase(a[i].phase_rad - c[i].phase_rad)));
        }
    }
    return detail::bounded("circuit_equivalence", worst, s.tol.circuit);
}

inline CheckResult check_pseudo_pure(const Settings& s) {
    double worst = 0.0;
    for (const SweepSpec& spec : fig4_preset(s.fig4_points)) {
        const auto rows = run_sweep(spec, s.threads);
        for (const SweepRow& row : rows) {
            const MixedQubit state = MixedQubit::from_purity(row.r);
            const AncillaScheme scheme = make_scheme(row.scheme, state, row.theta_s);
            const PhaseResult ref = run_pseudo_pure(state, scheme, PseudoPureConfig{1.0});
            if (ref.visibility <= 1e-6) continue;
            for (double eps : {1e-5, 1e-2}) {
                const PhaseResult pr = run_pseudo_pure(state, scheme, PseudoPureConfig{eps});
                worst = std::max(worst, std::abs(wrap_phase(pr.phase - ref.phase)));
                worst = std::max(worst, std::abs(pr.visibility / (eps * ref.visibility) - 1.0));
            }
        }
    }
    return detail::bounded("pseudo_pure_invariance", worst, s.tol.epsilon);
}

inline CheckResult check_nmr_pipeline(const Settings& s) {
    double worst = 0.0;
    for (const SweepSpec& spec : fig4_preset(s.fig4_points)) {
        SweepSpec nmr = spec;
        nmr.backend = Backend::nmr;
        nmr.nmr = s.nmr;
        const auto rows = run_sweep(nmr, s.threads);
        for (const SweepRow& row : rows) {
            const MixedQubit state = MixedQubit::from_purity(row.r);
            const AncillaScheme scheme = make_scheme(row.scheme, state, row.theta_s);
            const PhaseResult ref = run_pseudo_pure(state, scheme, s.nmr.pps);
            if (ref.visibility <= 1e-6 * s.nmr.pps.epsilon) continue;
            worst = std::max(worst, std::abs(wrap_phase(row.phase_rad - ref.phase)));
        }
    }
    return detail::bounded("nmr_pipeline", worst, s.tol.nmr);
}

/// Largest distance, in bins, between a spectral peak of the probe multiplet
/// and its predicted position ±(J13 ± J12)/2.
inline double multiplet_line_offset_bins(const SpinSystem& sys, const AcquisitionConfig& acq) {
    // Probe in (|0>+|1>)/√2, system and ancilla unpolarized: all four lines.
    ComplexMatrix probe = 0.5 * (pauli::identity() + pauli::x());
    const ComplexMatrix rho = kron(probe, 0.5 * pauli::identity(), 0.5 * pauli::identity());
    const Spectrum spec = dft(conjugated(acquire_fid(Register3(rho), sys, acq)));
    const double df = spec.bin_width();
    double worst = 0.0;
    for (double line : probe_multiplet(sys)) {
        // Local maximum of |S| within ±3 bins of the prediction.
        const auto centre = static_cast<long>(std::lround(line / df)) + static_cast<long>(spec.values.size() / 2);
        long best = centre;
        for (long j = centre - 3; j <= centre + 3; ++j) {
            if (std::abs(spec.values[j]) > std::abs(spec.values[best])) best = j;
        }
        worst = std::max(worst, std::abs(spec.freq_axis[best] - line) / df);
    }
    return worst;
}

inline CheckResult check_limiting_cases(const Settings& s) {
    double worst = 0.0;
    for (double theta_s : linspace(0.0, kPi / 2.0, s.grid_points)) {
        for (SchemeKind kind : {SchemeKind::sjoqvist, SchemeKind::uhlmann}) {
            const MixedQubit mixed = MixedQubit::from_purity(0.0);
            worst = std::max(worst, std::abs(interference_amplitude(mixed, make_scheme(kind, mixed, theta_s)).imag()));
            const MixedQubit pure = MixedQubit::from_purity(1.0);
            const PhaseResult pr = phase_of(interference_amplitude(pure, make_scheme(kind, pure, theta_s)));
            const double expected = -kPi * (1.0 - std::cos(theta_s));
            worst = std::max(worst, detail::distance_to_spinor_offsets(pr.phase - expected));
        }
    }
    for (double r : linspace(0.0, 1.0, s.grid_points)) {
        const MixedQubit state = MixedQubit::from_purity(r);
        for (SchemeKind kind : {SchemeKind::sjoqvist, SchemeKind::uhlmann}) {
            const PhaseResult pr = phase_of(interference_amplitude(state, make_scheme(kind, state, 0.0)));
            if (!(pr.phase == 0.0 || pr.phase == kPi)) worst = std::max(worst, 1.0);
        }
    }
    return detail::bounded("limiting_cases", worst, s.tol.formula);
}

inline CheckResult check_cross_term_variants(const Settings& s) {
    double worst = 0.0;
    for (double r : linspace(0.0, 1.0, s.grid_points)) {
        const MixedQubit state = MixedQubit::from_purity(r);
        for (double theta_s : linspace(0.0, kPi / 2.0, s.grid_points)) {
            const AncillaScheme scheme = uhlmann_ancilla(state, theta_s, 1.0);
            const double a = uhlmann_closed_form(state, scheme, 2.0 * kPi, CrossTerm::sqrt_p1p2);
            const double b = uhlmann_closed_form(state, scheme, 2.0 * kPi, CrossTerm::two_sqrt_p1p2);
            worst = std::max(worst, std::abs(wrap_phase(a - b)));
        }
    }
    CheckResult out{"uhlmann_cross_term_variants", true, worst, 0.0, true,
                    "sqrt(p1p2) and 2sqrt(p1p2) coincide at omega_s t = 2pi"};
    return out;
}

inline std::vector<CheckResult> check_suite(const Settings& s) {
    std::vector<CheckResult> out;
    out.push_back(detail::formula_check("uhlmann_formula_offset", SchemeKind::uhlmann, s));
    out.push_back(detail::formula_check("sjoqvist_formula_offset", SchemeKind::sjoqvist, s));
    out.push_back(check_uhlmann_conditions(s));
    out.push_back(check_parallel_transport(s));
    out.push_back(check_circuit_equivalence(s));
    out.push_back(check_pseudo_pure(s));
    out.push_back(check_nmr_pipeline(s));
    const double bins = multiplet_line_offset_bins(s.nmr.spins, s.nmr.acquisition);
    out.push_back(detail::bounded("multiplet_line_positions", bins, 1.0, "bins"));
    out.push_back(check_limiting_cases(s));
    out.push_back(check_cross_term_variants(s));
    return out;
}

inline bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed || r.informational; });
}

}  // namespace mixgp
