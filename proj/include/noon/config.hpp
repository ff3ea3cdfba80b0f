#pragma once

// Flat INI configuration with one section per module. Unknown sections or
// keys are rejected so a misspelt key never falls back to a default.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "noon/errors.hpp"
#include "noon/lattice.hpp"
#include "noon/model.hpp"
#include "noon/protocols.hpp"
#include "noon/robustness.hpp"

namespace noon::config {

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "run.preset", "run.M", "run.P", "run.grid", "run.format",
        "model.U0", "model.U", "model.J", "model.mu", "model.nu",
        "protocol.p_theta", "protocol.nu_sign", "protocol.t_m", "protocol.mode",
        "spectrum.sweep", "spectrum.N", "spectrum.u_min", "spectrum.u_max", "spectrum.points",
        "spectrum.u_over_j", "spectrum.mu_min", "spectrum.mu_max",
        "evolve.t_max", "evolve.steps",
        "lattice.a", "lattice.kappa2", "lattice.mu1", "lattice.anisotropy", "lattice.reading",
        "lattice.displacement_um", "lattice.omega_lo_khz", "lattice.omega_hi_khz", "lattice.J",
        "robustness.protocol", "robustness.xi_over_j", "robustness.cycles", "robustness.mode",
        "robustness.source", "robustness.start_sign",
    };
    return keys;
}

/// Parsed "section.key" -> value map.
class RawConfig {
public:
    RawConfig() = default;

    static RawConfig parse(std::istream& in) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(in, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ValidationError(std::string("config parse error: ") + e.message() + " at line " +
                                  std::to_string(e.line()));
        }
        RawConfig c;
        for (const auto& [section, body] : tree) {
            if (!body.data().empty()) throw ValidationError("config key '" + section + "' must live in a section");
            for (const auto& [key, value] : body) c.set(section + "." + key, value.get_value<std::string>());
        }
        return c;
    }

    static RawConfig parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    void set(const std::string& key, const std::string& value) {
        if (!known_keys().count(key)) throw ValidationError("unknown config key '" + key + "'");
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double real(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : to_real(key, it->second);
    }

    std::optional<double> real(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        return to_real(key, it->second);
    }

    int integer(const std::string& key, int fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        int v = 0;
        const auto& s = it->second;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw ValidationError("config key '" + key + "' expects an integer, got '" + s + "'");
        return v;
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_real(key, item));
        if (out.empty()) throw ValidationError("config key '" + key + "' expects a comma-separated list");
        return out;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    /// Accepts plain numbers and "pi", "pi/k", "a*pi/k" style phases.
    static double to_real(const std::string& key, std::string s) {
        s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
        auto bad = [&] { return ValidationError("config key '" + key + "' expects a number, got '" + s + "'"); };
        const auto pi_at = s.find("pi");
        if (pi_at == std::string::npos) {
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw bad();
                return v;
            } catch (const std::logic_error&) {
                throw bad();
            }
        }
        double factor = 1.0, divisor = 1.0;
        try {
            if (pi_at > 0) {
                if (s[pi_at - 1] != '*') throw bad();
                factor = std::stod(s.substr(0, pi_at - 1));
            }
            const auto rest = s.substr(pi_at + 2);
            if (!rest.empty()) {
                if (rest[0] != '/') throw bad();
                divisor = std::stod(rest.substr(1));
            }
        } catch (const std::logic_error&) {
            throw bad();
        }
        return factor * std::numbers::pi / divisor;
    }

    std::map<std::string, std::string> values_;
};

/// Model couplings: explicit [model] values override the preset ones.
struct ResolvedModel {
    std::string source;  // preset id or "explicit"
    ModelParameters params;
    double mu;
    double nu;
};

inline ResolvedModel resolve_model(const RawConfig& c) {
    const std::string id = c.str("run.preset", "set1");
    const bool explicit_model = c.has("model.U") || c.has("model.J") || c.has("model.U0");
    double U0, U, J, mu;
    if (explicit_model) {
        for (const char* k : {"model.U0", "model.U", "model.J"})
            if (!c.has(k)) throw ValidationError(std::string("explicit model requires ") + k);
        U0 = *c.real("model.U0");
        U = *c.real("model.U");
        J = *c.real("model.J");
        mu = c.real("model.mu", 0.0);
    } else {
        const auto& p = preset(id);
        U0 = p.U0;
        U = p.U;
        J = p.J;
        mu = c.real("model.mu", p.mu);
    }
    const double nu = c.real("model.nu", mu);
    if (!std::isfinite(U0) || !std::isfinite(U) || !std::isfinite(J)) throw ValidationError("couplings must be finite");
    return {explicit_model ? "explicit" : id, ModelParameters::integrable(U0, U, J), mu, nu};
}

inline ProtocolConfig protocol_config(const RawConfig& c) {
    const auto m = resolve_model(c);
    const int M = c.integer("run.M", 4);
    const int P = c.integer("run.P", 11);
    if (M < 0 || P < 0) throw ValidationError("M and P must be non-negative");
    if ((M + P) % 2 == 0) throw ValidationError("N = M + P must be odd (got " + std::to_string(M + P) + ")");
    if (std::abs(M - P) < 2) throw ValidationError("|M - P| >= 2 is required (M != P)");
    ProtocolConfig cfg;
    cfg.M = M;
    cfg.P = P;
    cfg.params = m.params;
    cfg.mu = m.mu;
    cfg.nu = m.nu;
    cfg.p_theta = c.real("protocol.p_theta", 0.0);
    cfg.nu_sign = c.integer("protocol.nu_sign", -1);
    cfg.t_m_override = c.real("protocol.t_m");
    cfg.derived = derive_scales(cfg.params, M, P);
    cfg.validate();
    return cfg;
}

inline Execution execution_mode(const RawConfig& c) {
    const auto s = c.str("protocol.mode", "full");
    if (s == "full") return Execution::full;
    if (s == "idealized") return Execution::idealized;
    throw ValidationError("protocol.mode must be full or idealized, got '" + s + "'");
}

inline lattice::TrapParameters trap_parameters(const RawConfig& c) {
    auto t = lattice::TrapParameters::dy164(c.real("lattice.a", -21.0));
    t.kappa2 = c.real("lattice.kappa2", t.kappa2);
    t.magnetic_moment = c.real("lattice.mu1", t.magnetic_moment);
    const auto f = c.str("lattice.anisotropy", "calibrated");
    if (f == "standard")
        t.anisotropy_override.reset();
    else if (f != "calibrated")
        t.anisotropy_override = c.real("lattice.anisotropy", 0.0);
    const auto reading = c.str("lattice.reading", "square_root");
    if (reading == "literal")
        t.reading = lattice::PrefactorReading::literal;
    else if (reading != "square_root")
        throw ValidationError("lattice.reading must be square_root or literal");
    t.validate();
    return t;
}

inline RobustnessConfig robustness_config(const RawConfig& c) {
    RobustnessConfig r;
    r.base = protocol_config(c);
    if (!c.has("protocol.p_theta")) r.base = r.base.with_p_theta(std::numbers::pi / 2.0);
    const auto proto = c.str("robustness.protocol", "I");
    if (proto == "I")
        r.protocol = ProtocolKind::I;
    else if (proto == "II")
        r.protocol = ProtocolKind::II;
    else
        throw ValidationError("robustness.protocol must be I or II");
    r.xi_over_j = c.list("robustness.xi_over_j", {0.0, 0.0025, 0.005, 0.0075, 0.01, 0.0125, 0.015, 0.0175, 0.02});
    r.cycles = c.integer("robustness.cycles", 100);
    const auto mode = c.str("robustness.mode", "pulsed");
    if (mode == "pulsed")
        r.mode = PulseMode::pulsed;
    else if (mode == "static")
        r.mode = PulseMode::static_error;
    else
        throw ValidationError("robustness.mode must be pulsed or static");
    const auto source = c.str("robustness.source", "direct");
    if (source == "direct")
        r.source = ErrorSource::direct;
    else if (source == "physical")
        r.source = ErrorSource::physical;
    else
        throw ValidationError("robustness.source must be direct or physical");
    r.start_sign = c.integer("robustness.start_sign", 1);
    if (r.source == ErrorSource::physical) {
        r.trap = trap_parameters(c);
        r.displacement = c.real("lattice.displacement_um", 0.2) * 1e-6;
        r.omega_lo = 2 * std::numbers::pi * 1e3 * c.real("lattice.omega_lo_khz", 20.0);
        r.omega_hi = 2 * std::numbers::pi * 1e3 * c.real("lattice.omega_hi_khz", 60.0);
    }
    r.validate();
    return r;
}

}  // namespace noon::config
