#pragma once

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fsns/grid.hpp"
#include "fsns/params.hpp"

namespace fsns {

/// 17 significant digits: round-trips any double exactly through decimal.
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace cfgdetail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

/// Sectioned key/value text: "[section]" headers, "key = value" lines,
/// '#' and ';' comments. Keeps every key so unknown ones can be reported.
struct IniDoc {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static IniDoc parse(const std::string& text, std::vector<std::string>& errors) {
        IniDoc doc;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto cpos = line.find_first_of("#;");
            if (cpos != std::string::npos) line.erase(cpos);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                doc.sections[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty()) {
                errors.push_back("line " + std::to_string(lineno) + ": empty key");
                continue;
            }
            auto& sec = doc.sections[section];
            if (sec.count(key))
                errors.push_back("[" + section + "] " + key + ": duplicate key");
            else
                sec[key] = val;
        }
        return doc;
    }
};

/// Pulls typed values out of an IniDoc, tracking consumption so that every
/// unrecognized key can be listed as an error afterwards.
class Binder {
  public:
    Binder(IniDoc doc, std::vector<std::string>& errors) : doc_(std::move(doc)), errors_(errors) {}

    void get(const std::string& sec, const std::string& key, double& ref) {
        std::string raw;
        if (!take(sec, key, raw)) return;
        try {
            size_t used = 0;
            const double v = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            ref = v;
        } catch (const std::exception&) {
            errors_.push_back("[" + sec + "] " + key + ": cannot parse '" + raw + "' as a number");
        }
    }
    void get(const std::string& sec, const std::string& key, int& ref) {
        std::string raw;
        if (!take(sec, key, raw)) return;
        int v = 0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || p != raw.data() + raw.size())
            errors_.push_back("[" + sec + "] " + key + ": cannot parse '" + raw + "' as an integer");
        else
            ref = v;
    }
    void get(const std::string& sec, const std::string& key, std::uint64_t& ref) {
        std::string raw;
        if (!take(sec, key, raw)) return;
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
        if (ec != std::errc() || p != raw.data() + raw.size())
            errors_.push_back("[" + sec + "] " + key +
                              ": cannot parse '" + raw + "' as an unsigned integer");
        else
            ref = v;
    }
    void get(const std::string& sec, const std::string& key, std::string& ref) {
        std::string raw;
        if (take(sec, key, raw)) ref = raw;
    }
    void get(const std::string& sec, const std::string& key, std::vector<double>& ref) {
        std::string raw;
        if (!take(sec, key, raw)) return;
        std::vector<double> vals;
        std::istringstream in(raw);
        std::string tok;
        bool ok = true;
        while (std::getline(in, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                size_t used = 0;
                vals.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                errors_.push_back("[" + sec + "] " + key + ": cannot parse '" + tok + "' as a number");
                ok = false;
            }
        }
        if (ok) ref = std::move(vals);
    }

    /// Every key not consumed by a get() is an error (no silent typos).
    void finish() {
        for (const auto& [sec, kv] : doc_.sections) {
            if (!known_sections_.count(sec)) {
                errors_.push_back("unknown section [" + sec + "]");
                continue;
            }
            for (const auto& [key, val] : kv)
                errors_.push_back("[" + sec + "] " + key + ": unknown key");
        }
    }

  private:
    bool take(const std::string& sec, const std::string& key, std::string& out) {
        known_sections_.insert(sec);
        auto s = doc_.sections.find(sec);
        if (s == doc_.sections.end()) return false;
        auto k = s->second.find(key);
        if (k == s->second.end()) return false;
        out = k->second;
        s->second.erase(k);
        if (s->second.empty()) doc_.sections.erase(s);
        return true;
    }

    IniDoc doc_;
    std::vector<std::string>& errors_;
    std::set<std::string> known_sections_;
};

}  // namespace cfgdetail

/// Initial-condition preset selection. All keys are always accepted; each
/// preset reads the parameters it needs.
struct InitialConfig {
    std::string preset = "equilibrium";
    double amplitude = 0.01;  // surface or velocity amplitude
    int mode = 1;             // surface wavenumber (integer multiple of 2 pi / L)
    double speed = 0.1;       // shear-layer peak speed
    double width = 0.1;       // shear-layer transition thickness
    double depth = 0.35;      // depth of the shear-layer transition
    int kmax = 4;             // band limit for the randomized preset
    std::uint64_t seed = 1;   // RNG seed for the randomized preset
};

struct DiagConfig {
    int m = 2;      // conormal order reported in the series
    int m_cap = 3;  // hard cap
    int cadence = 1;  // evaluate diagnostics every cadence-th output time
};

struct RunConfig {
    GridConfig grid;
    PhysParams physics;
    StepperConfig stepper;
    InitialConfig initial;
    DiagConfig diag;

    /// Collects every failing field into one ConfigError.
    void validate() const {
        std::vector<std::string> bad;
        if (!is_pow2(grid.ny)) bad.push_back("grid.ny must be a power of two");
        if (grid.nz < 8) bad.push_back("grid.nz must be >= 8");
        if (!(grid.z_max > 0)) bad.push_back("grid.z_max must be > 0");
        if (!(grid.stretch >= 1)) bad.push_back("grid.stretch must be >= 1");
        if (grid.dim_h != 1 && grid.dim_h != 2) bad.push_back("grid.dim_h must be 1 or 2");
        if (!(grid.length > 0)) bad.push_back("grid.length must be > 0");
        try {
            physics.validate();
        } catch (const ConfigError& e) {
            bad.push_back(e.what());
        }
        try {
            stepper.validate();
        } catch (const ConfigError& e) {
            bad.push_back(e.what());
        }
        static const std::set<std::string> presets = {"equilibrium", "capillary_wave",
                                                      "shear_layer", "random_band",
                                                      "steep_surface"};
        if (!presets.count(initial.preset))
            bad.push_back("initial.preset '" + initial.preset +
                          "' unknown (equilibrium, capillary_wave, shear_layer, random_band, "
                          "steep_surface)");
        if (initial.mode < 1) bad.push_back("initial.mode must be >= 1");
        if (!(initial.width > 0)) bad.push_back("initial.width must be > 0");
        if (!(initial.depth > 0)) bad.push_back("initial.depth must be > 0");
        if (initial.kmax < 1) bad.push_back("initial.kmax must be >= 1");
        if (diag.m_cap < 1) bad.push_back("diagnostics.m_cap must be >= 1");
        if (diag.m < 1 || diag.m > diag.m_cap)
            bad.push_back("diagnostics.m must lie in [1, m_cap]");
        if (diag.cadence < 1) bad.push_back("diagnostics.cadence must be >= 1");
        if (!bad.empty()) {
            std::string msg = "invalid configuration:";
            for (const auto& b : bad) msg += "\n  " + b;
            throw ConfigError(msg);
        }
    }
};

namespace cfgdetail {

inline void bind_run_config(Binder& b, RunConfig& c) {
    b.get("grid", "dim_h", c.grid.dim_h);
    b.get("grid", "length", c.grid.length);
    b.get("grid", "ny", c.grid.ny);
    b.get("grid", "nz", c.grid.nz);
    b.get("grid", "z_max", c.grid.z_max);
    b.get("grid", "stretch", c.grid.stretch);

    b.get("physics", "gamma", c.physics.gamma);
    b.get("physics", "mu", c.physics.mu);
    b.get("physics", "lambda", c.physics.lambda);
    b.get("physics", "eps", c.physics.eps);
    b.get("physics", "sigma", c.physics.sigma);
    b.get("physics", "p_e", c.physics.p_e);
    b.get("physics", "c0_health", c.physics.c0_health);
    b.get("physics", "C0_health", c.physics.C0_health);

    b.get("stepper", "cfl", c.stepper.cfl);
    b.get("stepper", "dt_max", c.stepper.dt_max);
    b.get("stepper", "t_end", c.stepper.t_end);
    b.get("stepper", "output_every", c.stepper.output_every);

    b.get("initial", "preset", c.initial.preset);
    b.get("initial", "amplitude", c.initial.amplitude);
    b.get("initial", "mode", c.initial.mode);
    b.get("initial", "speed", c.initial.speed);
    b.get("initial", "width", c.initial.width);
    b.get("initial", "depth", c.initial.depth);
    b.get("initial", "kmax", c.initial.kmax);
    b.get("initial", "seed", c.initial.seed);

    b.get("diagnostics", "m", c.diag.m);
    b.get("diagnostics", "m_cap", c.diag.m_cap);
    b.get("diagnostics", "cadence", c.diag.cadence);
}

}  // namespace cfgdetail

inline RunConfig parse_run_config(const std::string& text) {
    std::vector<std::string> errors;
    auto doc = cfgdetail::IniDoc::parse(text, errors);
    RunConfig c;
    cfgdetail::Binder b(std::move(doc), errors);
    cfgdetail::bind_run_config(b, c);
    b.finish();
    if (!errors.empty()) {
        std::string msg = "configuration errors:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    c.validate();
    return c;
}

/// Canonical text form: every key emitted, fixed order, 17-digit floats.
/// serialize(parse(text)) is idempotent.
inline std::string serialize_run_config(const RunConfig& c) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "dim_h = " << c.grid.dim_h << "\n";
    out << "length = " << fmt_g17(c.grid.length) << "\n";
    out << "ny = " << c.grid.ny << "\n";
    out << "nz = " << c.grid.nz << "\n";
    out << "z_max = " << fmt_g17(c.grid.z_max) << "\n";
    out << "stretch = " << fmt_g17(c.grid.stretch) << "\n\n";
    out << "[physics]\n";
    out << "gamma = " << fmt_g17(c.physics.gamma) << "\n";
    out << "mu = " << fmt_g17(c.physics.mu) << "\n";
    out << "lambda = " << fmt_g17(c.physics.lambda) << "\n";
    out << "eps = " << fmt_g17(c.physics.eps) << "\n";
    out << "sigma = " << fmt_g17(c.physics.sigma) << "\n";
    out << "p_e = " << fmt_g17(c.physics.p_e) << "\n";
    out << "c0_health = " << fmt_g17(c.physics.c0_health) << "\n";
    out << "C0_health = " << fmt_g17(c.physics.C0_health) << "\n\n";
    out << "[stepper]\n";
    out << "cfl = " << fmt_g17(c.stepper.cfl) << "\n";
    out << "dt_max = " << fmt_g17(c.stepper.dt_max) << "\n";
    out << "t_end = " << fmt_g17(c.stepper.t_end) << "\n";
    out << "output_every = " << fmt_g17(c.stepper.output_every) << "\n\n";
    out << "[initial]\n";
    out << "preset = " << c.initial.preset << "\n";
    out << "amplitude = " << fmt_g17(c.initial.amplitude) << "\n";
    out << "mode = " << c.initial.mode << "\n";
    out << "speed = " << fmt_g17(c.initial.speed) << "\n";
    out << "width = " << fmt_g17(c.initial.width) << "\n";
    out << "depth = " << fmt_g17(c.initial.depth) << "\n";
    out << "kmax = " << c.initial.kmax << "\n";
    out << "seed = " << c.initial.seed << "\n\n";
    out << "[diagnostics]\n";
    out << "m = " << c.diag.m << "\n";
    out << "m_cap = " << c.diag.m_cap << "\n";
    out << "cadence = " << c.diag.cadence << "\n";
    return out.str();
}

enum class SweepAxis { Eps, Sigma };
enum class SweepComparison { CauchySupNorm, ThetaBoundedness, LayerScaling };

/// A sweep plan is a run configuration plus a [sweep] section. The axis
/// values must be strictly decreasing and positive; the limit member (axis
/// value 0) is always run for distance-to-limit comparisons.
struct SweepPlan {
    RunConfig base;
    SweepAxis axis = SweepAxis::Eps;
    std::vector<double> values;
    SweepComparison comparison = SweepComparison::CauchySupNorm;

    void validate() const {
        std::vector<std::string> bad;
        if (values.empty()) bad.push_back("sweep.values must not be empty");
        for (size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] > 0)) {
                bad.push_back("sweep.values must be positive");
                break;
            }
            if (i > 0 && !(values[i] < values[i - 1])) {
                bad.push_back("sweep.values must be strictly decreasing");
                break;
            }
        }
        if (comparison == SweepComparison::LayerScaling && values.size() < 3)
            bad.push_back("sweep.values needs >= 3 entries for scaling fits");
        if (!bad.empty()) {
            std::string msg = "invalid sweep plan:";
            for (const auto& b : bad) msg += "\n  " + b;
            throw ConfigError(msg);
        }
    }
};

inline SweepPlan parse_sweep_plan(const std::string& text) {
    std::vector<std::string> errors;
    auto doc = cfgdetail::IniDoc::parse(text, errors);
    SweepPlan plan;
    std::string axis = "eps", comparison = "cauchy_sup_norm";
    cfgdetail::Binder b(std::move(doc), errors);
    b.get("sweep", "axis", axis);
    b.get("sweep", "values", plan.values);
    b.get("sweep", "comparison", comparison);
    cfgdetail::bind_run_config(b, plan.base);
    b.finish();
    if (axis == "eps")
        plan.axis = SweepAxis::Eps;
    else if (axis == "sigma")
        plan.axis = SweepAxis::Sigma;
    else
        errors.push_back("[sweep] axis: must be 'eps' or 'sigma'");
    if (comparison == "cauchy_sup_norm")
        plan.comparison = SweepComparison::CauchySupNorm;
    else if (comparison == "theta_boundedness")
        plan.comparison = SweepComparison::ThetaBoundedness;
    else if (comparison == "layer_scaling")
        plan.comparison = SweepComparison::LayerScaling;
    else
        errors.push_back(
            "[sweep] comparison: must be cauchy_sup_norm, theta_boundedness, or layer_scaling");
    if (!errors.empty()) {
        std::string msg = "configuration errors:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    plan.base.validate();
    plan.validate();
    return plan;
}

inline std::string serialize_sweep_plan(const SweepPlan& p) {
    std::ostringstream out;
    out << "[sweep]\n";
    out << "axis = " << (p.axis == SweepAxis::Eps ? "eps" : "sigma") << "\n";
    out << "values = ";
    for (size_t i = 0; i < p.values.size(); ++i)
        out << (i ? ", " : "") << fmt_g17(p.values[i]);
    out << "\n";
    out << "comparison = ";
    switch (p.comparison) {
        case SweepComparison::CauchySupNorm: out << "cauchy_sup_norm"; break;
        case SweepComparison::ThetaBoundedness: out << "theta_boundedness"; break;
        case SweepComparison::LayerScaling: out << "layer_scaling"; break;
    }
    out << "\n\n" << serialize_run_config(p.base);
    return out.str();
}

}  // namespace fsns
