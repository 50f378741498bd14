#include "fieldroad/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace fieldroad {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line;
};

}  // namespace

ModelParams RunConfig::params() const {
    if (reaction != "logistic")
        throw ConfigError("config: unsupported reaction '" + reaction + "'");
    auto p = make_params(d, D, mu, nu, logistic_reaction());
    if (delta) {
        p.delta = *delta;
        p.validate();
    }
    return p;
}

Geometry RunConfig::make_geometry() const {
    if (geometry == "cone") return exact_cone(a);
    if (geometry == "hyperbola") return hyperbola(a);
    if (geometry == "bump") return bump_road();
    throw ConfigError("config: unknown geometry '" + geometry + "'");
}

InitialDatum RunConfig::datum() const {
    const double y0 = datum_y0 < 0.0 ? make_geometry().rho(datum_x0) + 2.0 : datum_y0;
    auto dd = bump_datum(datum_x0, y0, datum_radius, datum_amp);
    return dd;
}

std::vector<std::string> RunConfig::record() const {
    std::vector<std::string> out;
    auto num = [](double v) {
        char buf[40];
        snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out.push_back("d = " + num(d));
    out.push_back("D = " + num(D));
    out.push_back("mu = " + num(mu));
    out.push_back("nu = " + num(nu));
    out.push_back("reaction = " + reaction);
    if (delta) out.push_back("delta = " + num(*delta));
    out.push_back("geometry = " + geometry);
    out.push_back("a = " + num(a));
    out.push_back("x_min = " + num(grid.x_min));
    out.push_back("x_max = " + num(grid.x_max));
    out.push_back("y_max = " + num(grid.y_max));
    out.push_back("hx = " + num(grid.hx));
    out.push_back("hy = " + num(grid.hy));
    out.push_back("nt_report = " + std::to_string(grid.nt_report));
    out.push_back(std::string("outer_bc = ") +
                  (grid.outer_bc == OuterBC::dirichlet_zero ? "dirichlet_zero" : "reflecting"));
    out.push_back("t_final = " + num(t_final));
    out.push_back("safety = " + num(safety));
    out.push_back("threshold_frac = " + num(threshold_frac));
    out.push_back("transient = " + num(transient));
    out.push_back("fit_fraction = " + num(fit_fraction));
    out.push_back("front_field_h = " + num(front_field_h));
    out.push_back("snapshot_every = " + std::to_string(snapshot_every));
    out.push_back("datum_x0 = " + num(datum_x0));
    out.push_back("datum_y0 = " + num(datum_y0));
    out.push_back("datum_radius = " + num(datum_radius));
    out.push_back("datum_amp = " + num(datum_amp));
    out.push_back("c_factor = " + num(c_factor));
    out.push_back("L = " + num(L));
    out.push_back("tol = " + num(tol));
    out.push_back("seed = " + std::to_string(seed));
    return out;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, Entry> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        auto it = kv.find(key);
        if (it != kv.end())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' (first set at line " + std::to_string(it->second.line) + ")");
        kv[key] = {value, lineno};
    }

    RunConfig cfg;
    auto take = [&kv, &origin](const std::string& key) -> std::optional<Entry> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        Entry e = it->second;
        kv.erase(it);
        return e;
    };
    auto want_double = [&](const std::string& key, double* dst) {
        if (auto e = take(key)) {
            try {
                size_t pos = 0;
                *dst = std::stod(e->value, &pos);
                if (pos != e->value.size()) throw std::invalid_argument("");
            } catch (...) {
                throw ConfigError(origin + ":" + std::to_string(e->line) + ": key '" + key +
                                  "' needs a number, got '" + e->value + "'");
            }
        }
    };
    auto want_int = [&](const std::string& key, int* dst) {
        if (auto e = take(key)) {
            try {
                size_t pos = 0;
                *dst = std::stoi(e->value, &pos);
                if (pos != e->value.size()) throw std::invalid_argument("");
            } catch (...) {
                throw ConfigError(origin + ":" + std::to_string(e->line) + ": key '" + key +
                                  "' needs an integer, got '" + e->value + "'");
            }
        }
    };
    auto want_string = [&](const std::string& key, std::string* dst) {
        if (auto e = take(key)) *dst = e->value;
    };

    want_double("d", &cfg.d);
    want_double("D", &cfg.D);
    want_double("mu", &cfg.mu);
    want_double("nu", &cfg.nu);
    want_string("reaction", &cfg.reaction);
    if (auto e = take("delta")) {
        try {
            cfg.delta = std::stod(e->value);
        } catch (...) {
            throw ConfigError(origin + ":" + std::to_string(e->line) + ": key 'delta' needs a number");
        }
    }
    want_string("geometry", &cfg.geometry);
    want_double("a", &cfg.a);
    want_double("x_min", &cfg.grid.x_min);
    want_double("x_max", &cfg.grid.x_max);
    want_double("y_max", &cfg.grid.y_max);
    want_double("hx", &cfg.grid.hx);
    want_double("hy", &cfg.grid.hy);
    want_int("nt_report", &cfg.grid.nt_report);
    if (auto e = take("outer_bc")) {
        if (e->value == "dirichlet_zero")
            cfg.grid.outer_bc = OuterBC::dirichlet_zero;
        else if (e->value == "reflecting")
            cfg.grid.outer_bc = OuterBC::reflecting;
        else
            throw ConfigError(origin + ":" + std::to_string(e->line) +
                              ": outer_bc must be dirichlet_zero or reflecting");
    }
    want_double("t_final", &cfg.t_final);
    want_double("safety", &cfg.safety);
    want_double("threshold_frac", &cfg.threshold_frac);
    want_double("transient", &cfg.transient);
    want_double("fit_fraction", &cfg.fit_fraction);
    want_double("front_field_h", &cfg.front_field_h);
    want_int("snapshot_every", &cfg.snapshot_every);
    want_double("datum_x0", &cfg.datum_x0);
    want_double("datum_y0", &cfg.datum_y0);
    want_double("datum_radius", &cfg.datum_radius);
    want_double("datum_amp", &cfg.datum_amp);
    want_double("c_factor", &cfg.c_factor);
    want_double("L", &cfg.L);
    want_double("tol", &cfg.tol);
    if (auto e = take("seed")) {
        try {
            cfg.seed = std::stoull(e->value);
        } catch (...) {
            throw ConfigError(origin + ":" + std::to_string(e->line) +
                              ": key 'seed' needs a nonnegative integer");
        }
    }

    if (!kv.empty()) {
        const auto& [key, e] = *kv.begin();
        throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown key '" + key + "'");
    }

    // surface physical-validation errors with the key name
    try {
        cfg.params();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(origin + ": invalid model parameters: " + ex.what());
    }
    cfg.make_geometry();
    cfg.grid.validate();
    if (!(cfg.threshold_frac > 0.0 && cfg.threshold_frac < 1.0))
        throw ConfigError(origin + ": threshold_frac must lie in (0, 1)");
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace fieldroad
