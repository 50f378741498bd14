#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fieldroad/geometry.hpp"
#include "fieldroad/model.hpp"

namespace fieldroad {

enum class OuterBC { dirichlet_zero, reflecting };

struct GridSpec {
    double x_min = -30.0, x_max = 30.0;
    double y_max = 15.0;       // strip height after flattening (w = y - rho(x))
    double hx = 0.5, hy = 0.5;
    int nt_report = 100;       // snapshot/diagnostic cadence in steps
    OuterBC outer_bc = OuterBC::dirichlet_zero;

    int nx() const;
    int ny() const;
    void validate() const;  // integer cell counts >= 8
};

struct InitialDatum {
    std::function<double(double)> u0;          // road density, by boundary x
    std::function<double(double, double)> v0;  // field density, physical (x, y)
    bool compact = true;   // compact data are held to the 10-cell support margin
    double x0 = 0.0;       // datum center (for the steady-state residual probe)
};

// Compact C^1 bump (1 - r^2/r0^2)^2 at (x0, y0), zero road datum.
InitialDatum bump_datum(double x0, double y0, double radius, double amplitude);

struct FieldState {
    double t = 0.0;
    std::vector<double> u;  // road values on cell-centered x nodes
    std::vector<double> v;  // field values, v[j*nx + i]
    GridSpec grid;
    Geometry geom;

    // per-column geometry tables
    std::vector<double> xc;    // cell centers (nx)
    std::vector<double> tauc;  // tau at centers
    std::vector<double> tauf;  // tau at x-faces (nx+1)
    std::vector<double> rpc;   // rho' at centers
    std::vector<double> rpf;   // rho' at x-faces
    int center_i = 0, center_j = 0;  // datum-center probe cell

    // monitored extrema of the most recent update
    double min_u = 0.0, min_v = 0.0, max_v = 0.0;

    std::vector<double> flux_scratch;  // y-face flux workspace reused across steps

    double& at(int i, int j) { return v[size_t(j) * grid.nx() + i]; }
    double at(int i, int j) const { return v[size_t(j) * grid.nx() + i]; }
};

// Samples the datum in sheared strip coordinates. Compact data must keep a
// 10-cell margin from every boundary.
FieldState discretize(const Geometry& g, const ModelParams& p, const GridSpec& grid,
                      const InitialDatum& datum);

// Largest stable explicit step scaled by `safety`.
double cfl_dt(const FieldState& s, const ModelParams& p, double safety);

// One explicit Euler update of dst from src (pure function of src).
// Throws on CFL violation or non-finite values in the result.
void step_into(const FieldState& src, FieldState& dst, double dt, const ModelParams& p);
FieldState step(const FieldState& s, double dt, const ModelParams& p);

// Road arclength mass + field mass (unit shear Jacobian), fixed summation order.
double total_mass(const FieldState& s);

// Evolves both states with the identical dt and reports whether the
// componentwise order survives every step (tolerance -1e-10).
bool ordering_preserved(FieldState lo, FieldState hi, const ModelParams& p, int n_steps);

struct DiagRow {
    double t = 0, mass = 0, min_u = 0, min_v = 0, max_v = 0, steady_residual = 0;
};

struct RunResult {
    FieldState state;
    std::vector<DiagRow> diagnostics;
    // road-front series sampled at the report cadence (positions are r~)
    std::vector<double> front_t, front_right, front_left;
};

// Integrates to t_final, reporting diagnostics and front positions every
// nt_report steps. threshold < 0 selects the default 0.5 nu/mu.
RunResult run(const Geometry& g, const ModelParams& p, const GridSpec& grid,
              const InitialDatum& datum, double t_final, double safety = 0.4,
              double threshold = -1.0,
              const std::function<void(const FieldState&)>& on_report = {});

}  // namespace fieldroad
