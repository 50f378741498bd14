#pragma once

#include <string>
#include <vector>

#include "fieldroad/model.hpp"
#include "fieldroad/solver.hpp"

namespace fieldroad {

enum class FrontSide { right, left };

struct FrontSeries {
    std::vector<double> times;
    std::vector<double> positions;  // r~(x*) of the tracked level crossing
    double threshold = 0.0;
};

// r~ of the outermost road node with u >= threshold, with linear sub-cell
// interpolation between the bracketing nodes; 0 when nothing exceeds the
// threshold; r~ at the domain edge when the state is saturated there.
double front_position(const FieldState& s, double threshold, FrontSide side);

// v-based tracker at a fixed distance-to-boundary h;
// the road tracker above is the primary metric.
double front_position_field(const FieldState& s, double threshold, double h, FrontSide side);

struct SpeedFit {
    double speed = 0.0;
    double stderr_ = 0.0;
    int n_used = 0;
};

// Least-squares slope of position vs time over the final window_fraction of
// samples. Throws when fewer than 10 samples land in the window.
SpeedFit fit_speed(const FrontSeries& series, double window_fraction);

struct SpeedRow {
    std::string geometry;
    double a = 0, theta0 = 0;
    std::string side;
    double speed = 0, stderr_ = 0, c_kpp = 0, c_brr = 0, ratio = 0;
};

struct SpeedReportOptions {
    double t_final = 80.0;
    double transient = 20.0;      // discard t < transient before fitting
    double fit_fraction = 0.4;    // final fraction of the remaining samples
    double threshold_frac = 0.5;  // threshold = frac * nu/mu
    double safety = 0.4;
};

// Runs the solver from a fixed compact datum for each geometry and tabulates
// fitted road speeds against c_kpp and c_brr.
std::vector<SpeedRow> speed_report(const ModelParams& p, const std::vector<Geometry>& gs,
                                   const GridSpec& grid, const SpeedReportOptions& opt);

// Front series restricted to t >= transient (shared by speed_report and the CLI).
FrontSeries make_series(const std::vector<double>& t, const std::vector<double>& pos,
                        double threshold, double transient);

}  // namespace fieldroad
