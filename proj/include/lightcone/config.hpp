#pragma once

// Experiment configuration: sectioned JSON with strict key validation,
// canonical serialization, and a SHA-256 config hash embedded in outputs.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lightcone/model.hpp"
#include "lightcone/probe.hpp"
#include "lightcone/sha256.hpp"

namespace lightcone {

using json = nlohmann::json;

struct ExperimentConfig {
    ModelSpec model;  // grid + fock + model sections
    ProbeSpec probe;
    std::vector<double> c_list{1.5};
    // evolve section
    double t0 = 1.0;
    double T = 16.0;
    int samples = 16;
    double tol = 1e-10;
    // io section
    std::string out_dir = "out";
    int thin = 1;  // keep every thin-th state
    std::uint64_t seed = 1;

    void validate() const {
        model.validate();
        probe.validate();
        if (c_list.empty()) throw std::invalid_argument("config: probe.c list empty");
        for (double c : c_list)
            if (c <= 0.0) throw std::invalid_argument("config: probe.c entries must be > 0");
        if (t0 < 1.0) throw std::invalid_argument("config: evolve.t0 must be >= 1");
        if (T <= t0) throw std::invalid_argument("config: evolve.T must exceed t0");
        if (samples < 8) throw std::invalid_argument("config: evolve.samples must be >= 8");
        if (tol <= 0.0) throw std::invalid_argument("config: evolve.tol must be > 0");
        if (thin < 1) throw std::invalid_argument("config: io.thin must be >= 1");
    }

    json to_json() const {
        json j;
        j["grid"] = {{"dim", model.dim},
                     {"M", model.M},
                     {"dk", model.dk},
                     {"mode", model.mode == GridMode::scalar1d ? "scalar1d" : "vector3d"}};
        j["fock"] = {{"n_max", model.n_max}};
        j["model"] = {{"Nx", model.Nx},          {"dx", model.dx},
                      {"V0", model.V0},          {"sigma", model.sigma},
                      {"K", model.kappa_radius}, {"mu", model.mu},
                      {"coupling_scale", model.coupling_scale}};
        j["probe"] = {{"c", c_list},         {"beta", probe.beta}, {"gamma", probe.gamma},
                      {"delta", probe.delta}, {"epsilon", probe.epsilon}, {"nu", probe.nu}};
        j["evolve"] = {{"t0", t0}, {"T", T}, {"samples", samples}, {"tol", tol}};
        j["io"] = {{"output_dir", out_dir}, {"thin", thin}};
        j["seed"] = seed;
        return j;
    }

    // canonical serialization: sorted keys, no whitespace, shortest-roundtrip
    // doubles (nlohmann defaults); the hash is over these bytes
    std::string canonical() const { return to_json().dump(); }
    std::string hash() const { return sha256_hex(canonical()); }
};

namespace config_detail {

inline void check_keys(const json& j, const std::string& section,
                       const std::set<std::string>& allowed) {
    if (!j.is_object())
        throw std::invalid_argument("config: section '" + section + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in section '" +
                                        section + "'");
}

template <class T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace config_detail

inline ExperimentConfig config_from_json(const json& j) {
    using config_detail::check_keys;
    using config_detail::get_if;
    check_keys(j, "(root)", {"grid", "fock", "model", "probe", "evolve", "io", "seed"});
    ExperimentConfig cfg;
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"dim", "M", "dk", "mode"});
        get_if(g, "dim", cfg.model.dim);
        get_if(g, "M", cfg.model.M);
        get_if(g, "dk", cfg.model.dk);
        if (g.contains("mode")) {
            const std::string m = g.at("mode").get<std::string>();
            if (m == "scalar1d")
                cfg.model.mode = GridMode::scalar1d;
            else if (m == "vector3d")
                cfg.model.mode = GridMode::vector3d;
            else
                throw std::invalid_argument("config: unknown grid.mode '" + m + "'");
        }
    }
    if (j.contains("fock")) {
        check_keys(j.at("fock"), "fock", {"n_max"});
        get_if(j.at("fock"), "n_max", cfg.model.n_max);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        check_keys(m, "model", {"Nx", "dx", "V0", "sigma", "K", "mu", "coupling_scale"});
        get_if(m, "Nx", cfg.model.Nx);
        bool have_dx = m.contains("dx");
        get_if(m, "dx", cfg.model.dx);
        if (!have_dx) cfg.model.dx = ModelSpec::commensurate_dx(cfg.model.Nx, cfg.model.dk);
        get_if(m, "V0", cfg.model.V0);
        get_if(m, "sigma", cfg.model.sigma);
        get_if(m, "K", cfg.model.kappa_radius);
        get_if(m, "mu", cfg.model.mu);
        get_if(m, "coupling_scale", cfg.model.coupling_scale);
    } else {
        cfg.model.dx = ModelSpec::commensurate_dx(cfg.model.Nx, cfg.model.dk);
    }
    if (j.contains("probe")) {
        const json& p = j.at("probe");
        check_keys(p, "probe", {"c", "beta", "gamma", "delta", "epsilon", "nu"});
        if (p.contains("c")) {
            if (p.at("c").is_array())
                cfg.c_list = p.at("c").get<std::vector<double>>();
            else
                cfg.c_list = {p.at("c").get<double>()};
        }
        get_if(p, "beta", cfg.probe.beta);
        get_if(p, "gamma", cfg.probe.gamma);
        get_if(p, "delta", cfg.probe.delta);
        get_if(p, "epsilon", cfg.probe.epsilon);
        get_if(p, "nu", cfg.probe.nu);
        cfg.probe.c = cfg.c_list.front();
    }
    if (j.contains("evolve")) {
        const json& e = j.at("evolve");
        check_keys(e, "evolve", {"t0", "T", "samples", "tol"});
        get_if(e, "t0", cfg.t0);
        get_if(e, "T", cfg.T);
        get_if(e, "samples", cfg.samples);
        get_if(e, "tol", cfg.tol);
    }
    if (j.contains("io")) {
        const json& io = j.at("io");
        check_keys(io, "io", {"output_dir", "thin"});
        get_if(io, "output_dir", cfg.out_dir);
        get_if(io, "thin", cfg.thin);
    }
    get_if(j, "seed", cfg.seed);
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

}  // namespace lightcone
