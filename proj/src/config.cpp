#include "decotunnel/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace decotunnel::cli {

namespace {

using json = nlohmann::ordered_json;

class Validator {
public:
    void unknown_keys(const json& obj, const std::string& where,
                      const std::set<std::string>& known) {
        for (const auto& [key, _] : obj.items())
            if (!known.count(key)) errors_.push_back(where + ": unknown key '" + key + "'");
    }

    template <typename T>
    void get(const json& obj, const std::string& where, const std::string& key, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(where + "." + key + ": wrong type");
        }
    }

    void require(bool ok, const std::string& message) {
        if (!ok) errors_.push_back(message);
    }

    void finish() const {
        if (errors_.empty()) return;
        std::ostringstream msg;
        msg << "configuration invalid:";
        for (const auto& e : errors_) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }

private:
    std::vector<std::string> errors_;
};

}  // namespace

std::vector<double> expand_grid(const GridSpec& spec) {
    if (spec.points < 2 || !(spec.max > spec.min))
        throw ConfigError("grid: need points >= 2 and max > min");
    if (spec.log && !(spec.min > 0.0)) throw ConfigError("grid: log grid needs min > 0");
    std::vector<double> out(spec.points);
    for (int i = 0; i < spec.points; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(spec.points - 1);
        out[i] = spec.log ? spec.min * std::pow(spec.max / spec.min, f)
                          : spec.min + f * (spec.max - spec.min);
    }
    return out;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("configuration root must be an object");

    Validator v;
    ExperimentConfig c;

    v.unknown_keys(root, "root",
                   {"geometry", "modes", "thresholds", "decoherence", "evolve", "environment",
                    "oracle", "output"});

    if (root.contains("geometry")) {
        const auto& g = root["geometry"];
        v.unknown_keys(g, "geometry", {"x_A", "x_B", "s_tilde"});
        v.get(g, "geometry", "x_A", c.geometry.x_a);
        v.get(g, "geometry", "x_B", c.geometry.x_b);
        v.get(g, "geometry", "s_tilde", c.geometry.s_tilde);
        v.require(c.geometry.x_a > 0.0 && std::isfinite(c.geometry.x_a),
                  "geometry.x_A: must be positive and finite");
        v.require(c.geometry.x_b > 0.0 && std::isfinite(c.geometry.x_b),
                  "geometry.x_B: must be positive and finite");
        v.require(c.geometry.s_tilde > 0.0 && std::isfinite(c.geometry.s_tilde),
                  "geometry.s_tilde: must be positive and finite");
    }

    if (root.contains("modes")) {
        const auto& m = root["modes"];
        v.unknown_keys(m, "modes", {"k_max", "j_A", "j_B"});
        double k_max = 0.0;
        int ja = 0, jb = 0;
        if (m.contains("k_max")) {
            v.get(m, "modes", "k_max", k_max);
            c.modes.k_max = k_max;
            v.require(k_max > 0.0, "modes.k_max: must be positive");
        }
        if (m.contains("j_A")) {
            v.get(m, "modes", "j_A", ja);
            c.modes.j_a = ja;
        }
        if (m.contains("j_B")) {
            v.get(m, "modes", "j_B", jb);
            c.modes.j_b = jb;
        }
        v.require(c.modes.j_a.has_value() == c.modes.j_b.has_value(),
                  "modes: j_A and j_B must be given together");
        v.require(c.modes.k_max.has_value() || c.modes.j_a.has_value(),
                  "modes: need k_max or an explicit (j_A, j_B)");
    }

    if (root.contains("thresholds")) {
        const auto& t = root["thresholds"];
        v.unknown_keys(t, "thresholds", {"resonant", "near_resonant", "non_resonant_fraction"});
        v.get(t, "thresholds", "resonant", c.thresholds.resonant);
        v.get(t, "thresholds", "near_resonant", c.thresholds.near_resonant);
        v.get(t, "thresholds", "non_resonant_fraction", c.thresholds.non_resonant_fraction);
        v.require(c.thresholds.resonant > 0.0 &&
                      c.thresholds.near_resonant > c.thresholds.resonant &&
                      c.thresholds.non_resonant_fraction > 0.0,
                  "thresholds: need 0 < resonant < near_resonant and non_resonant_fraction > 0");
    }

    if (root.contains("decoherence")) {
        const auto& d = root["decoherence"];
        v.unknown_keys(d, "decoherence",
                       {"basis", "lambda", "tau_d", "omega_d_grid", "events", "seed",
                        "simulate"});
        v.get(d, "decoherence", "basis", c.decoherence.basis);
        v.get(d, "decoherence", "lambda", c.decoherence.lambda);
        if (d.contains("tau_d")) {
            double tau = 0.0;
            v.get(d, "decoherence", "tau_d", tau);
            c.decoherence.tau_d = tau;
            v.require(tau > 0.0, "decoherence.tau_d: must be positive");
        }
        if (d.contains("omega_d_grid")) {
            const auto& gr = d["omega_d_grid"];
            v.unknown_keys(gr, "decoherence.omega_d_grid", {"min", "max", "points", "log"});
            GridSpec spec;
            v.get(gr, "decoherence.omega_d_grid", "min", spec.min);
            v.get(gr, "decoherence.omega_d_grid", "max", spec.max);
            v.get(gr, "decoherence.omega_d_grid", "points", spec.points);
            v.get(gr, "decoherence.omega_d_grid", "log", spec.log);
            c.decoherence.omega_d_grid = spec;
            v.require(spec.points >= 2 && spec.max > spec.min && spec.min > 0.0,
                      "decoherence.omega_d_grid: need points >= 2 and 0 < min < max");
        }
        v.get(d, "decoherence", "events", c.decoherence.events);
        v.get(d, "decoherence", "seed", c.decoherence.seed);
        v.get(d, "decoherence", "simulate", c.decoherence.simulate);
        v.require(c.decoherence.basis == "partition" || c.decoherence.basis == "energy",
                  "decoherence.basis: must be 'partition' or 'energy'");
        v.require(c.decoherence.lambda >= 0.0 && c.decoherence.lambda <= 1.0,
                  "decoherence.lambda: must be in [0, 1]");
        v.require(c.decoherence.events == "deterministic" ||
                      c.decoherence.events == "stochastic",
                  "decoherence.events: must be 'deterministic' or 'stochastic'");
    }

    if (root.contains("evolve")) {
        const auto& e = root["evolve"];
        v.unknown_keys(e, "evolve", {"pair_index", "t_max", "samples"});
        v.get(e, "evolve", "pair_index", c.evolve.pair_index);
        v.get(e, "evolve", "t_max", c.evolve.t_max);
        v.get(e, "evolve", "samples", c.evolve.samples);
        v.require(c.evolve.pair_index >= 0, "evolve.pair_index: must be >= 0");
        v.require(c.evolve.samples >= 2, "evolve.samples: must be >= 2");
    }

    if (root.contains("environment")) {
        const auto& e = root["environment"];
        v.unknown_keys(e, "environment", {"model", "ensemble", "pair_index", "t_max", "samples"});
        v.get(e, "environment", "model", c.environment.model);
        v.get(e, "environment", "pair_index", c.environment.pair_index);
        v.get(e, "environment", "t_max", c.environment.t_max);
        v.get(e, "environment", "samples", c.environment.samples);
        v.require(c.environment.model == "energy_diagonal" || c.environment.model == "section_a",
                  "environment.model: must be 'energy_diagonal' or 'section_a'");
        if (e.contains("ensemble")) {
            if (!e["ensemble"].is_array()) {
                v.require(false, "environment.ensemble: must be an array");
            } else {
                double weight_sum = 0.0;
                for (const auto& entry : e["ensemble"]) {
                    v.unknown_keys(entry, "environment.ensemble[]",
                                   {"weight", "omega_l", "delta_omega_l", "omega_0l"});
                    environment::EnvState s;
                    v.get(entry, "environment.ensemble[]", "weight", s.weight);
                    v.get(entry, "environment.ensemble[]", "omega_l", s.omega_l);
                    v.get(entry, "environment.ensemble[]", "delta_omega_l", s.delta_omega_l);
                    v.get(entry, "environment.ensemble[]", "omega_0l", s.omega_0l);
                    v.require(s.weight >= 0.0, "environment.ensemble[].weight: must be >= 0");
                    weight_sum += s.weight;
                    c.environment.ensemble.push_back(s);
                }
                v.require(c.environment.ensemble.empty() ||
                              std::abs(weight_sum - 1.0) <= 1e-10,
                          "environment.ensemble: weights must sum to 1");
            }
        }
    }

    if (root.contains("oracle")) {
        const auto& o = root["oracle"];
        v.unknown_keys(o, "oracle", {"n_points", "dt", "barrier_width"});
        v.get(o, "oracle", "n_points", c.oracle.n_points);
        v.get(o, "oracle", "dt", c.oracle.dt);
        if (o.contains("barrier_width")) {
            double w = 0.0;
            v.get(o, "oracle", "barrier_width", w);
            c.oracle.barrier_width = w;
            v.require(w > 0.0, "oracle.barrier_width: must be positive");
        }
        v.require(c.oracle.n_points >= 2000, "oracle.n_points: must be >= 2000");
        v.require(c.oracle.dt > 0.0, "oracle.dt: must be positive");
    }

    if (root.contains("output")) {
        const auto& o = root["output"];
        v.unknown_keys(o, "output", {"normalized"});
        v.get(o, "output", "normalized", c.output.normalized);
    }

    v.finish();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
    json root;
    root["geometry"] = {{"x_A", c.geometry.x_a},
                        {"x_B", c.geometry.x_b},
                        {"s_tilde", c.geometry.s_tilde}};
    json modes = json::object();
    if (c.modes.k_max) modes["k_max"] = *c.modes.k_max;
    if (c.modes.j_a) modes["j_A"] = *c.modes.j_a;
    if (c.modes.j_b) modes["j_B"] = *c.modes.j_b;
    root["modes"] = modes;
    root["thresholds"] = {{"resonant", c.thresholds.resonant},
                          {"near_resonant", c.thresholds.near_resonant},
                          {"non_resonant_fraction", c.thresholds.non_resonant_fraction}};
    json deco = {{"basis", c.decoherence.basis},
                 {"lambda", c.decoherence.lambda},
                 {"events", c.decoherence.events},
                 {"seed", c.decoherence.seed},
                 {"simulate", c.decoherence.simulate}};
    if (c.decoherence.tau_d) deco["tau_d"] = *c.decoherence.tau_d;
    if (c.decoherence.omega_d_grid) {
        deco["omega_d_grid"] = {{"min", c.decoherence.omega_d_grid->min},
                                {"max", c.decoherence.omega_d_grid->max},
                                {"points", c.decoherence.omega_d_grid->points},
                                {"log", c.decoherence.omega_d_grid->log}};
    }
    root["decoherence"] = deco;
    root["evolve"] = {{"pair_index", c.evolve.pair_index},
                      {"t_max", c.evolve.t_max},
                      {"samples", c.evolve.samples}};
    json ensemble = json::array();
    for (const auto& s : c.environment.ensemble)
        ensemble.push_back({{"weight", s.weight},
                            {"omega_l", s.omega_l},
                            {"delta_omega_l", s.delta_omega_l},
                            {"omega_0l", s.omega_0l}});
    root["environment"] = {{"model", c.environment.model},
                           {"ensemble", ensemble},
                           {"pair_index", c.environment.pair_index},
                           {"t_max", c.environment.t_max},
                           {"samples", c.environment.samples}};
    json oracle = {{"n_points", c.oracle.n_points}, {"dt", c.oracle.dt}};
    if (c.oracle.barrier_width) oracle["barrier_width"] = *c.oracle.barrier_width;
    root["oracle"] = oracle;
    root["output"] = {{"normalized", c.output.normalized}};
    return root.dump(2) + "\n";
}

}  // namespace decotunnel::cli
