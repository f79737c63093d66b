#pragma once

// Flat `key = value` configuration ('#' starts a comment).

#include "mixgp/geometric_phase.hpp"
#include "mixgp/sweep.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>

namespace mixgp {

struct Tolerances {
    double formula = 1e-9;     // closed form vs amplitude: spread and offset
    double condition = 1e-12;  // tangent and projection conditions
    double transport = 1e-6;   // parallel-transport residuals, in units of ω_s
    double circuit = 1e-10;    // circuit vs amplitude phase
    double epsilon = 1e-9;     // pseudo-pure phase and visibility scaling
    double nmr = 5e-3;         // spectral vs density-matrix phase
};

struct Settings {
    NmrSettings nmr{};
    Tolerances tol{};
    int fig2_points = 51;
    int fig4_points = 13;
    int grid_points = 13;
    unsigned threads = 0;
    // Fault injection for the check suite.
    double fault_theta_a = 0.0;
    CrossTerm cross_term = CrossTerm::sqrt_p1p2;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::map<std::string, std::string> parse_config(std::istream& is) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        }
        out[key] = value;
    }
    return out;
}

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("config: bad value for " + key + ": " + text);
    }
    return value;
}

}  // namespace detail

inline void apply_config(Settings& s, const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        auto real = [&] { return detail::parse_number<double>(key, value); };
        auto integer = [&] { return detail::parse_number<int>(key, value); };
        if (key == "dwell") s.nmr.acquisition.dwell = real();
        else if (key == "npoints") s.nmr.acquisition.npoints = integer();
        else if (key == "t2") s.nmr.acquisition.t2 = real();
        else if (key == "epsilon") s.nmr.pps.epsilon = real();
        else if (key == "j12") s.nmr.spins.j12 = real();
        else if (key == "j13") s.nmr.spins.j13 = real();
        else if (key == "j23") s.nmr.spins.j23 = real();
        else if (key == "fig2_points") s.fig2_points = integer();
        else if (key == "fig4_points") s.fig4_points = integer();
        else if (key == "grid_points") s.grid_points = integer();
        else if (key == "threads") s.threads = static_cast<unsigned>(integer());
        else if (key == "tol_formula") s.tol.formula = real();
        else if (key == "tol_condition") s.tol.condition = real();
        else if (key == "tol_transport") s.tol.transport = real();
        else if (key == "tol_circuit") s.tol.circuit = real();
        else if (key == "tol_epsilon") s.tol.epsilon = real();
        else if (key == "tol_nmr") s.tol.nmr = real();
        else if (key == "fault_theta_a") s.fault_theta_a = real();
        else if (key == "uhlmann_cross_term") {
            if (value == "sqrt") s.cross_term = CrossTerm::sqrt_p1p2;
            else if (value == "two_sqrt") s.cross_term = CrossTerm::two_sqrt_p1p2;
            else throw ConfigError("config: uhlmann_cross_term must be sqrt or two_sqrt");
        } else {
            throw ConfigError("config: unknown key " + key);
        }
    }
    s.nmr.acquisition.validate();
    s.nmr.pps.validate();
    if (s.fig2_points < 2 || s.fig4_points < 2 || s.grid_points < 2) {
        throw ConfigError("config: grid sizes must be >= 2");
    }
}

}  // namespace mixgp
