// mixgp: command-line front end for the mixed-state geometric phase library.
//
// Exit codes: 0 success, 1 usage error, 2 check failure, 3 I/O error.

#include "mixgp/mixgp.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kCheckFailed = 2, kIoError = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string scheme = "both";
    std::optional<double> r;
    std::optional<double> theta_s;
    int points = 13;
    std::string backend = "amplitude";
    double omega_s_t = 2.0 * mixgp::kPi;
    std::string out;
    std::string config;
    bool no_timestamp = false;
    std::string fid_out;
    std::string spectrum_out;
};

mixgp::SchemeSelection parse_selection(const std::string& s) {
    if (s == "sjoqvist") return mixgp::SchemeSelection::sjoqvist;
    if (s == "uhlmann") return mixgp::SchemeSelection::uhlmann;
    if (s == "both") return mixgp::SchemeSelection::both;
    throw UsageError("--scheme must be sjoqvist, uhlmann or both");
}

mixgp::Backend parse_backend(const std::string& s) {
    if (s == "amplitude") return mixgp::Backend::amplitude;
    if (s == "circuit") return mixgp::Backend::circuit;
    if (s == "nmr") return mixgp::Backend::nmr;
    throw UsageError("--backend must be amplitude, circuit or nmr");
}

mixgp::Settings load_settings(const Options& o) {
    mixgp::Settings s;
    if (o.config.empty()) return s;
    std::ifstream in(o.config);
    if (!in) throw IoError("cannot open config file " + o.config);
    mixgp::apply_config(s, mixgp::parse_config(in));
    return s;
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

mixgp::Metadata metadata(const Options& o, const std::string& echo) {
    mixgp::Metadata md;
    md.emplace_back("tool", std::string("mixgp ") + mixgp::kVersion);
    md.emplace_back("run", echo);
    for (mixgp::SchemeKind kind : {mixgp::SchemeKind::sjoqvist, mixgp::SchemeKind::uhlmann}) {
        const mixgp::OffsetStats st = mixgp::measure_spinor_offset(kind);
        md.emplace_back(std::string("spinor_offset_") + std::string(mixgp::to_string(kind)),
                        mixgp::format_double(std::abs(st.mean) < 1e-6 ? 0.0 : st.mean));
    }
    if (!o.no_timestamp) md.emplace_back("generated", timestamp());
    return md;
}

void write_rows(const Options& o, const std::vector<mixgp::SweepRow>& rows, const std::string& echo) {
    if (o.out.empty() || o.out == "-") {
        mixgp::emit_csv(std::cout, rows, metadata(o, echo));
        return;
    }
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw IoError("cannot open output file " + o.out);
    try {
        mixgp::emit_csv(file, rows, metadata(o, echo));
    } catch (const std::ios_base::failure& e) {
        throw IoError(e.what());
    }
}

void print_phase(mixgp::SchemeKind kind, double r, double theta_s, const mixgp::PhaseResult& pr, double cf) {
    std::cout << mixgp::to_string(kind) << ": r=" << mixgp::format_double(r)
              << " theta_s=" << mixgp::format_double(theta_s)
              << " phase_rad=" << (pr.defined ? mixgp::format_double(pr.phase) : "undefined")
              << " visibility=" << mixgp::format_double(pr.visibility)
              << " closed_form_rad=" << mixgp::format_double(cf) << '\n';
}

int cmd_phase(const Options& o) {
    if (!o.r || !o.theta_s) throw UsageError("phase needs --r and --theta-s");
    const mixgp::Settings s = load_settings(o);
    const mixgp::Backend backend = parse_backend(o.backend);
    for (mixgp::SchemeKind kind : mixgp::schemes_of(parse_selection(o.scheme))) {
        const mixgp::PhaseResult pr = mixgp::evaluate_phase(kind, *o.r, *o.theta_s, o.omega_s_t, backend, s.nmr);
        const mixgp::MixedQubit state = mixgp::MixedQubit::from_purity(*o.r);
        print_phase(kind, *o.r, *o.theta_s, pr,
                    mixgp::closed_form(state, mixgp::make_scheme(kind, state, *o.theta_s), o.omega_s_t));
    }
    return kOk;
}

int cmd_sweep(const Options& o) {
    if (o.r.has_value() == o.theta_s.has_value()) {
        throw UsageError("sweep needs exactly one of --r or --theta-s as the fixed parameter");
    }
    const mixgp::Settings s = load_settings(o);
    mixgp::SweepSpec spec;
    spec.scheme = parse_selection(o.scheme);
    spec.axis = o.r ? mixgp::SweepAxis::theta_s : mixgp::SweepAxis::r;
    spec.fixed_value = o.r ? *o.r : *o.theta_s;
    spec.points = o.points;
    spec.omega_s_t = o.omega_s_t;
    spec.backend = parse_backend(o.backend);
    spec.nmr = s.nmr;
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    write_rows(o, mixgp::run_sweep(spec, s.threads), "sweep " + spec.describe());
    return kOk;
}

int cmd_fig2(const Options& o) {
    const mixgp::Settings s = load_settings(o);
    const mixgp::Backend backend = parse_backend(o.backend);
    const auto rows = mixgp::run_grid(parse_selection(o.scheme), s.fig2_points, s.fig2_points, o.omega_s_t,
                                      backend, s.nmr, s.threads);
    write_rows(o, rows,
               "fig2 grid=" + std::to_string(s.fig2_points) + "x" + std::to_string(s.fig2_points) +
                   " omega_s_t=" + mixgp::format_double(o.omega_s_t) + " backend=" + o.backend);
    return kOk;
}

int cmd_fig4(const Options& o) {
    const mixgp::Settings s = load_settings(o);
    const auto rows = mixgp::run_fig4(s.fig4_points, parse_backend(o.backend), s.nmr, s.threads);
    write_rows(o, rows, "fig4 points=" + std::to_string(s.fig4_points) + " backend=" + o.backend);
    return kOk;
}

int cmd_nmr(const Options& o) {
    if (!o.r || !o.theta_s) throw UsageError("nmr needs --r and --theta-s");
    const mixgp::Settings s = load_settings(o);
    for (mixgp::SchemeKind kind : mixgp::schemes_of(parse_selection(o.scheme))) {
        const mixgp::MixedQubit state = mixgp::MixedQubit::from_purity(*o.r);
        const mixgp::AncillaScheme scheme = mixgp::make_scheme(kind, state, *o.theta_s);
        const mixgp::Register3 out = mixgp::pseudo_pure_output(state, scheme, s.nmr.pps, o.omega_s_t);
        const mixgp::FID fid = mixgp::acquire_fid(out, s.nmr.spins, s.nmr.acquisition);
        const mixgp::Spectrum spec = mixgp::dft(mixgp::conjugated(fid));
        auto dump = [&](const std::string& path, const auto& data) {
            if (path.empty()) return;
            const std::string target = kind == mixgp::SchemeKind::sjoqvist || o.scheme != "both"
                                           ? path
                                           : path + ".uhlmann";
            std::ofstream f(target, std::ios::binary);
            if (!f) throw IoError("cannot open output file " + target);
            mixgp::write_csv(f, data);
            if (!f) throw IoError("write failed: " + target);
        };
        dump(o.fid_out, fid);
        dump(o.spectrum_out, spec);
        const mixgp::PhaseResult pr = mixgp::nmr_phase(state, scheme, s.nmr.pps, s.nmr.spins, s.nmr.acquisition,
                                                       o.omega_s_t);
        const mixgp::PhaseResult direct = mixgp::run_pseudo_pure(state, scheme, s.nmr.pps, o.omega_s_t);
        print_phase(kind, *o.r, *o.theta_s, pr, mixgp::closed_form(state, scheme, o.omega_s_t));
        std::cout << "  density_matrix_phase_rad=" << mixgp::format_double(direct.phase) << " spectral_error_rad="
                  << mixgp::format_double(std::abs(mixgp::wrap_phase(pr.phase - direct.phase))) << '\n';
    }
    return kOk;
}

int cmd_check(const Options& o) {
    const mixgp::Settings s = load_settings(o);
    const auto results = mixgp::check_suite(s);
    for (const mixgp::CheckResult& r : results) {
        const char* tag = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
        std::cout << '[' << tag << "] " << r.name << " value=" << mixgp::format_double(r.value);
        if (!r.informational) {
            std::cout << " threshold=" << mixgp::format_double(r.threshold)
                      << " margin=" << mixgp::format_double(r.threshold - r.value);
        }
        if (!r.detail.empty()) std::cout << " (" << r.detail << ')';
        std::cout << '\n';
    }
    if (!mixgp::all_passed(results)) {
        for (const mixgp::CheckResult& r : results) {
            if (!r.passed && !r.informational) std::cerr << "check failed: " << r.name << '\n';
        }
        return kCheckFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-state geometric phases: Sjoqvist and Uhlmann phases on one purification"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scheme", o.scheme, "sjoqvist, uhlmann or both");
        sub->add_option("--backend", o.backend, "amplitude, circuit or nmr");
        sub->add_option("--omega-s-t", o.omega_s_t, "system rotation angle omega_s*t (rad)");
        sub->add_option("--config", o.config, "key = value configuration file");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "CSV destination (default stdout)");
        sub->add_flag("--no-timestamp", o.no_timestamp, "omit the timestamp metadata line");
    };

    CLI::App* phase = app.add_subcommand("phase", "phase and visibility at one (r, theta_s)");
    add_common(phase);
    phase->add_option("--r", o.r, "purity r in [0, 1]");
    phase->add_option("--theta-s", o.theta_s, "field angle theta_s in [0, pi/2]");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep r or theta_s with the other fixed");
    add_common(sweep);
    add_output(sweep);
    sweep->add_option("--r", o.r, "fixed purity (sweeps theta_s)");
    sweep->add_option("--theta-s", o.theta_s, "fixed angle (sweeps r)");
    sweep->add_option("--points", o.points, "number of equidistant points");

    CLI::App* fig2 = app.add_subcommand("fig2", "phase surfaces over the r x theta_s grid");
    add_common(fig2);
    add_output(fig2);

    CLI::App* fig4 = app.add_subcommand("fig4", "the four 13-point experiment sweeps");
    add_common(fig4);
    add_output(fig4);

    CLI::App* nmr = app.add_subcommand("nmr", "full NMR readout chain at one (r, theta_s)");
    add_common(nmr);
    nmr->add_option("--r", o.r, "purity r in [0, 1]");
    nmr->add_option("--theta-s", o.theta_s, "field angle theta_s in [0, pi/2]");
    nmr->add_option("--fid-out", o.fid_out, "write the FID as CSV");
    nmr->add_option("--spectrum-out", o.spectrum_out, "write the spectrum as CSV");

    CLI::App* check = app.add_subcommand("check", "run every invariant check");
    check->add_option("--config", o.config, "key = value configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*phase) return cmd_phase(o);
        if (*sweep) return cmd_sweep(o);
        if (*fig2) return cmd_fig2(o);
        if (*fig4) return cmd_fig4(o);
        if (*nmr) return cmd_nmr(o);
        if (*check) return cmd_check(o);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
