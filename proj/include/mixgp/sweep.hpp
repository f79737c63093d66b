#pragma once

// Parameter sweeps over purity r and field angle θ_s, evaluated by one of
// three back ends, plus the CSV format they are exchanged in.

#include "mixgp/geometric_phase.hpp"
#include "mixgp/interferometer.hpp"
#include "mixgp/nmr_readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace mixgp {

enum class SchemeSelection { sjoqvist, uhlmann, both };
enum class SweepAxis { r, theta_s };
enum class Backend { amplitude, circuit, nmr };

inline std::string_view to_string(SweepAxis a) { return a == SweepAxis::r ? "r" : "theta_s"; }

inline std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::amplitude: return "amplitude";
        case Backend::circuit: return "circuit";
        default: return "nmr";
    }
}

inline std::string_view to_string(SchemeSelection s) {
    switch (s) {
        case SchemeSelection::sjoqvist: return "sjoqvist";
        case SchemeSelection::uhlmann: return "uhlmann";
        default: return "both";
    }
}

inline std::vector<SchemeKind> schemes_of(SchemeSelection s) {
    switch (s) {
        case SchemeSelection::sjoqvist: return {SchemeKind::sjoqvist};
        case SchemeSelection::uhlmann: return {SchemeKind::uhlmann};
        default: return {SchemeKind::sjoqvist, SchemeKind::uhlmann};
    }
}

struct NmrSettings {
    PseudoPureConfig pps{};
    SpinSystem spins{};
    AcquisitionConfig acquisition{};
};

struct SweepSpec {
    SchemeSelection scheme = SchemeSelection::both;
    SweepAxis axis = SweepAxis::r;
    double fixed_value = kPi / 6.0;  // θ_s when sweeping r, r when sweeping θ_s
    int points = 13;
    double omega_s_t = 2.0 * kPi;
    Backend backend = Backend::amplitude;
    NmrSettings nmr{};

    void validate() const {
        if (points < 2) throw std::invalid_argument("sweep: points must be >= 2");
        if (!std::isfinite(omega_s_t) || omega_s_t < 0.0) {
            throw std::invalid_argument("sweep: omega_s_t must be finite and >= 0");
        }
        if (axis == SweepAxis::r) {
            if (!(fixed_value >= 0.0 && fixed_value <= kPi / 2.0)) {
                throw std::invalid_argument("sweep: fixed theta_s must lie in [0, pi/2]");
            }
        } else if (!(fixed_value >= 0.0 && fixed_value <= 1.0)) {
            throw std::invalid_argument("sweep: fixed r must lie in [0, 1]");
        }
        if (backend == Backend::nmr) {
            nmr.pps.validate();
            nmr.acquisition.validate();
            nmr.spins.validate();
        }
    }

    std::string describe() const {
        std::ostringstream os;
        os.precision(12);
        os << "scheme=" << to_string(scheme) << " axis=" << to_string(axis) << " fixed=" << fixed_value
           << " points=" << points << " omega_s_t=" << omega_s_t << " backend=" << to_string(backend);
        return os.str();
    }
};

struct SweepRow {
    SchemeKind scheme = SchemeKind::sjoqvist;
    double r = 0.0;
    double theta_s = 0.0;
    double phase_rad = 0.0;
    double phase_unwrapped_rad = 0.0;
    double visibility = 0.0;
    double closed_form_rad = 0.0;
    double abs_diff_mod_2pi = 0.0;

    bool operator==(const SweepRow& o) const {
        auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
        return scheme == o.scheme && same(r, o.r) && same(theta_s, o.theta_s) && same(phase_rad, o.phase_rad) &&
               same(phase_unwrapped_rad, o.phase_unwrapped_rad) && same(visibility, o.visibility) &&
               same(closed_form_rad, o.closed_form_rad) && same(abs_diff_mod_2pi, o.abs_diff_mod_2pi);
    }
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results land in
/// index order whatever the completion order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn, unsigned threads = 0) {
    std::vector<T> out(n);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += threads) out[i] = fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

inline PhaseResult evaluate_phase(SchemeKind kind, double r, double theta_s, double omega_s_t, Backend backend,
                                  const NmrSettings& nmr = {}) {
    const MixedQubit state = MixedQubit::from_purity(r);
    const AncillaScheme scheme = make_scheme(kind, state, theta_s);
    switch (backend) {
        case Backend::amplitude: return phase_of(interference_amplitude(state, scheme, omega_s_t));
        case Backend::circuit: return run_interferometer(state, scheme, omega_s_t);
        default: return nmr_phase(state, scheme, nmr.pps, nmr.spins, nmr.acquisition, omega_s_t);
    }
}

inline SweepRow make_row(SchemeKind kind, double r, double theta_s, double omega_s_t, const PhaseResult& pr) {
    const MixedQubit state = MixedQubit::from_purity(r);
    const double cf = closed_form(state, make_scheme(kind, state, theta_s), omega_s_t);
    SweepRow row{kind, r, theta_s, pr.phase, pr.phase, pr.visibility, cf, 0.0};
    row.abs_diff_mod_2pi = (pr.defined && std::isfinite(cf)) ? std::abs(wrap_phase(pr.phase - cf))
                                                             : std::numeric_limits<double>::quiet_NaN();
    return row;
}

/// Fills phase_unwrapped_rad along [first, last): steps larger than π are
/// folded by multiples of 2π. Undefined phases are skipped.
inline void unwrap(std::vector<SweepRow>::iterator first, std::vector<SweepRow>::iterator last) {
    std::optional<double> prev;
    for (auto it = first; it != last; ++it) {
        if (std::isnan(it->phase_rad)) {
            it->phase_unwrapped_rad = it->phase_rad;
            continue;
        }
        double u = it->phase_rad;
        if (prev) u = *prev + wrap_phase(it->phase_rad - *prev);
        it->phase_unwrapped_rad = u;
        prev = u;
    }
}

struct PointSpec {
    SchemeKind scheme;
    double r;
    double theta_s;
};

inline std::vector<SweepRow> evaluate_points(const std::vector<PointSpec>& pts, double omega_s_t, Backend backend,
                                             const NmrSettings& nmr, unsigned threads) {
    return parallel_map<SweepRow>(
        pts.size(),
        [&](std::size_t i) {
            const PointSpec& p = pts[i];
            return make_row(p.scheme, p.r, p.theta_s, omega_s_t,
                            evaluate_phase(p.scheme, p.r, p.theta_s, omega_s_t, backend, nmr));
        },
        threads);
}

/// Equidistant sweep inclusive of both endpoints; rows grouped by scheme.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads = 0) {
    spec.validate();
    const std::vector<double> axis_values =
        spec.axis == SweepAxis::r ? linspace(0.0, 1.0, spec.points) : linspace(0.0, kPi / 2.0, spec.points);
    std::vector<PointSpec> pts;
    for (SchemeKind kind : schemes_of(spec.scheme)) {
        for (double v : axis_values) {
            pts.push_back(spec.axis == SweepAxis::r ? PointSpec{kind, v, spec.fixed_value}
                                                    : PointSpec{kind, spec.fixed_value, v});
        }
    }
    std::vector<SweepRow> rows = evaluate_points(pts, spec.omega_s_t, spec.backend, spec.nmr, threads);
    for (std::size_t start = 0; start < rows.size(); start += axis_values.size()) {
        unwrap(rows.begin() + static_cast<std::ptrdiff_t>(start),
               rows.begin() + static_cast<std::ptrdiff_t>(start + axis_values.size()));
    }
    return rows;
}

/// Full r×θ_s surface; θ_s-major, r inner, unwrapped along r.
inline std::vector<SweepRow> run_grid(SchemeSelection selection, int r_points, int theta_points,
                                      double omega_s_t = 2.0 * kPi, Backend backend = Backend::amplitude,
                                      const NmrSettings& nmr = {}, unsigned threads = 0) {
    if (r_points < 2 || theta_points < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
    std::vector<PointSpec> pts;
    for (SchemeKind kind : schemes_of(selection)) {
        for (double theta_s : linspace(0.0, kPi / 2.0, theta_points)) {
            for (double r : linspace(0.0, 1.0, r_points)) pts.push_back({kind, r, theta_s});
        }
    }
    std::vector<SweepRow> rows = evaluate_points(pts, omega_s_t, backend, nmr, threads);
    for (std::size_t start = 0; start < rows.size(); start += static_cast<std::size_t>(r_points)) {
        unwrap(rows.begin() + static_cast<std::ptrdiff_t>(start),
               rows.begin() + static_cast<std::ptrdiff_t>(start) + r_points);
    }
    return rows;
}

/// The four experiment families: r swept at θ_s ∈ {π/6, π/4}, θ_s swept at
/// r ∈ {1/3, 2/3}; both schemes.
inline std::vector<SweepSpec> fig4_preset(int points = 13, Backend backend = Backend::amplitude,
                                          const NmrSettings& nmr = {}) {
    std::vector<SweepSpec> out;
    for (double theta_s : {kPi / 6.0, kPi / 4.0}) {
        out.push_back({SchemeSelection::both, SweepAxis::r, theta_s, points, 2.0 * kPi, backend, nmr});
    }
    for (double r : {1.0 / 3.0, 2.0 / 3.0}) {
        out.push_back({SchemeSelection::both, SweepAxis::theta_s, r, points, 2.0 * kPi, backend, nmr});
    }
    return out;
}

inline std::vector<SweepRow> run_fig4(int points = 13, Backend backend = Backend::amplitude,
                                      const NmrSettings& nmr = {}, unsigned threads = 0) {
    std::vector<SweepRow> rows;
    for (const SweepSpec& spec : fig4_preset(points, backend, nmr)) {
        auto part = run_sweep(spec, threads);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCsvHeader =
    "scheme,r,theta_s,phase_rad,phase_unwrapped_rad,visibility,closed_form_rad,abs_diff_mod_2pi";

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// '#'-prefixed "key: value" metadata lines, the header, then one line per row.
inline void emit_csv(std::ostream& os, const std::vector<SweepRow>& rows, const Metadata& metadata = {}) {
    for (const auto& [key, value] : metadata) os << "# " << key << ": " << value << '\n';
    os << kCsvHeader << '\n';
    for (const SweepRow& row : rows) {
        os << to_string(row.scheme) << ',' << format_double(row.r) << ',' << format_double(row.theta_s) << ','
           << format_double(row.phase_rad) << ',' << format_double(row.phase_unwrapped_rad) << ','
           << format_double(row.visibility) << ',' << format_double(row.closed_form_rad) << ','
           << format_double(row.abs_diff_mod_2pi) << '\n';
    }
    if (!os) throw std::ios_base::failure("emit_csv: write failed");
}

struct CsvDocument {
    Metadata metadata;
    std::vector<SweepRow> rows;
};

inline CsvDocument parse_csv(std::istream& is) {
    CsvDocument doc;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            const auto colon = body.find(": ");
            if (colon == std::string::npos) {
                doc.metadata.emplace_back(body, "");
            } else {
                doc.metadata.emplace_back(body.substr(0, colon), body.substr(colon + 2));
            }
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader) throw std::runtime_error("parse_csv: unexpected header: " + line);
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw std::runtime_error("parse_csv: expected 8 columns: " + line);
        const auto kind = parse_scheme(cells[0]);
        if (!kind) throw std::runtime_error("parse_csv: unknown scheme " + cells[0]);
        auto num = [&](int i) {
            char* end = nullptr;
            const double v = std::strtod(cells[i].c_str(), &end);
            if (end == cells[i].c_str() || *end != '\0') throw std::runtime_error("parse_csv: bad number " + cells[i]);
            return v;
        };
        doc.rows.push_back({*kind, num(1), num(2), num(3), num(4), num(5), num(6), num(7)});
    }
    if (!header_seen) throw std::runtime_error("parse_csv: missing header");
    return doc;
}

}  // namespace mixgp
