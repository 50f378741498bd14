#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fieldroad/geometry.hpp"
#include "fieldroad/model.hpp"
#include "fieldroad/solver.hpp"

namespace fieldroad {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat `key = value` experiment record. '#' starts a comment; unknown and
// duplicate keys are errors (duplicates cite both lines).
struct RunConfig {
    // model
    double d = 1.0, D = 1.0, mu = 1.0, nu = 1.0;
    std::string reaction = "logistic";
    std::optional<double> delta;  // default 0.05 f'(0)

    // geometry
    std::string geometry = "hyperbola";  // cone | hyperbola | bump
    double a = 1.0;

    // grid
    GridSpec grid;

    // run
    double t_final = 80.0;
    double safety = 0.4;
    double threshold_frac = 0.5;
    double transient = 20.0;
    double fit_fraction = 0.4;
    double front_field_h = 2.0;  // v-tracker distance to the boundary
    int snapshot_every = 0;      // report periods between field snapshots (0 = none)

    // datum
    double datum_x0 = 0.0, datum_y0 = -1.0;  // y0 < 0 -> rho(x0) + 2
    double datum_radius = 4.0, datum_amp = 1.0;

    // certificates / dispersion
    double c_factor = 1.05;  // speed as a multiple of c_brr (super) or c_L (sub)
    double L = 20.0;
    double tol = 1e-8;

    std::uint64_t seed = 0;

    ModelParams params() const;
    Geometry make_geometry() const;
    InitialDatum datum() const;
    // the config as "key = value" lines for output headers
    std::vector<std::string> record() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace fieldroad
