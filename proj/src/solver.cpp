#include "fieldroad/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fieldroad/analysis.hpp"

namespace fieldroad {

int GridSpec::nx() const { return int(std::lround((x_max - x_min) / hx)); }
int GridSpec::ny() const { return int(std::lround(y_max / hy)); }

void GridSpec::validate() const {
    if (!(hx > 0.0) || !(hy > 0.0)) throw std::invalid_argument("grid: mesh widths must be positive");
    const double cx = (x_max - x_min) / hx, cy = y_max / hy;
    if (std::fabs(cx - std::lround(cx)) > 1e-9 || std::fabs(cy - std::lround(cy)) > 1e-9)
        throw std::invalid_argument("grid: extents must be integer multiples of the mesh widths");
    if (nx() < 8 || ny() < 8) throw std::invalid_argument("grid: need at least 8 cells per direction");
    if (nt_report < 1) throw std::invalid_argument("grid: nt_report must be >= 1");
}

InitialDatum bump_datum(double x0, double y0, double radius, double amplitude) {
    InitialDatum d;
    d.compact = true;
    d.x0 = x0;
    d.u0 = [](double) { return 0.0; };
    d.v0 = [x0, y0, radius, amplitude](double x, double y) {
        const double q = ((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (radius * radius);
        return q >= 1.0 ? 0.0 : amplitude * (1.0 - q) * (1.0 - q);
    };
    return d;
}

FieldState discretize(const Geometry& g, const ModelParams& p, const GridSpec& grid,
                      const InitialDatum& datum) {
    (void)p;
    grid.validate();
    FieldState s;
    s.grid = grid;
    s.geom = g;
    const int nx = grid.nx(), ny = grid.ny();
    s.u.resize(nx);
    s.v.resize(size_t(nx) * ny);
    s.xc.resize(nx);
    s.tauc.resize(nx);
    s.rpc.resize(nx);
    s.tauf.resize(nx + 1);
    s.rpf.resize(nx + 1);
    for (int i = 0; i < nx; ++i) {
        s.xc[i] = grid.x_min + (i + 0.5) * grid.hx;
        s.rpc[i] = g.drho(s.xc[i]);
        s.tauc[i] = std::sqrt(1.0 + s.rpc[i] * s.rpc[i]);
    }
    for (int i = 0; i <= nx; ++i) {
        const double xf = grid.x_min + i * grid.hx;
        s.rpf[i] = g.drho(xf);
        s.tauf[i] = std::sqrt(1.0 + s.rpf[i] * s.rpf[i]);
    }

    double vmax = -1.0;
    for (int j = 0; j < ny; ++j) {
        const double w = (j + 0.5) * grid.hy;
        for (int i = 0; i < nx; ++i) {
            const double x = s.xc[i];
            const double val = datum.v0(x, w + g.rho(x));  // sheared sampling
            if (!(val >= 0.0) || !std::isfinite(val))
                throw std::invalid_argument("discretize: datum must be nonnegative and finite");
            s.at(i, j) = val;
            if (val > vmax) {
                vmax = val;
                s.center_i = i;
                s.center_j = j;
            }
        }
    }
    for (int i = 0; i < nx; ++i) {
        const double val = datum.u0(s.xc[i]);
        if (!(val >= 0.0) || !std::isfinite(val))
            throw std::invalid_argument("discretize: datum must be nonnegative and finite");
        s.u[i] = val;
    }
    if (vmax <= 0.0) {
        // zero field datum: probe the configured center column instead
        s.center_i = std::clamp(int((datum.x0 - grid.x_min) / grid.hx), 0, nx - 1);
        s.center_j = 0;
    }

    if (datum.compact) {
        const int m = 10;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (s.at(i, j) != 0.0 && (i < m || i >= nx - m || j >= ny - m))
                    throw std::invalid_argument(
                        "discretize: compact datum violates the 10-cell support margin");
        for (int i = 0; i < nx; ++i)
            if (s.u[i] != 0.0 && (i < m || i >= nx - m))
                throw std::invalid_argument(
                    "discretize: compact datum violates the 10-cell support margin");
    }

    s.min_u = *std::min_element(s.u.begin(), s.u.end());
    const auto [mnv, mxv] = std::minmax_element(s.v.begin(), s.v.end());
    s.min_v = *mnv;
    s.max_v = *mxv;
    return s;
}

double cfl_dt(const FieldState& s, const ModelParams& p, double safety) {
    if (!(safety > 0.0) || safety > 1.0)
        throw std::invalid_argument("cfl_dt: safety must lie in (0, 1]");
    const double hx = s.grid.hx, hy = s.grid.hy;
    double dt = 1.0 / (p.mu + p.nu + p.fprime0);
    for (int i = 0; i < s.grid.nx(); ++i) {
        const double a11 = 1.0, a22 = 1.0 + s.rpc[i] * s.rpc[i], a12 = std::fabs(s.rpc[i]);
        dt = std::min(dt, hx * hx * hy * hy /
                              (2.0 * p.d * (a11 * hy * hy + a22 * hx * hx + a12 * hx * hy)));
        dt = std::min(dt, s.tauc[i] * s.tauc[i] * hx * hx / (2.0 * p.D));
    }
    return safety * dt;
}

void step_into(const FieldState& src, FieldState& dst, double dt, const ModelParams& p) {
    const int nx = src.grid.nx(), ny = src.grid.ny();
    if (&dst != &src) {
        dst.grid = src.grid;
        dst.geom = src.geom;
        dst.xc = src.xc;
        dst.tauc = src.tauc;
        dst.tauf = src.tauf;
        dst.rpc = src.rpc;
        dst.rpf = src.rpf;
        dst.center_i = src.center_i;
        dst.center_j = src.center_j;
        dst.u.resize(nx);
        dst.v.resize(size_t(nx) * ny);
    }
    if (dt > cfl_dt(src, p, 1.0) * (1.0 + 1e-12))
        throw std::invalid_argument("step: dt violates the CFL bound");

    const double hx = src.grid.hx, hy = src.grid.hy;
    const bool dir0 = src.grid.outer_bc == OuterBC::dirichlet_zero;
    const double* v = src.v.data();
    const double* u = src.u.data();
    const bool logistic = p.f.kind == ReactionRule::Kind::logistic;

    auto vat = [&](int i, int j) -> double {  // side ghosts only
        if (i < 0) return dir0 ? 0.0 : v[size_t(j) * nx + 0];
        if (i >= nx) return dir0 ? 0.0 : v[size_t(j) * nx + (nx - 1)];
        return v[size_t(j) * nx + i];
    };

    // y-face fluxes G[j*nx+i] = (A grad v) . e_y at the face below row j
    dst.flux_scratch.assign(size_t(nx) * (ny + 1), 0.0);
    double* const Gp = dst.flux_scratch.data();
#pragma omp parallel for schedule(static)
    for (int j = 0; j <= ny; ++j) {
        double* Gj = Gp + size_t(j) * nx;
        if (j == 0) {
            for (int i = 0; i < nx; ++i)
                Gj[i] = -src.tauc[i] * (p.mu * u[i] - p.nu * v[i]) / p.d;  // weighted Robin
        } else if (j == ny) {
            if (dir0) {
                const double* vr = v + size_t(ny - 1) * nx;
                for (int i = 0; i < nx; ++i) {
                    const double dxv = 0.5 * (vat(i + 1, ny - 1) - vat(i - 1, ny - 1)) / (2.0 * hx);
                    Gj[i] = -src.rpc[i] * dxv + (1.0 + src.rpc[i] * src.rpc[i]) * (0.0 - vr[i]) / hy;
                }
            }  // reflecting: zero flux
        } else {
            const double* vlo = v + size_t(j - 1) * nx;
            const double* vhi = v + size_t(j) * nx;
            for (int i = 0; i < nx; ++i) {
                const double dxlo = (vat(i + 1, j - 1) - vat(i - 1, j - 1)) / (2.0 * hx);
                const double dxhi = (vat(i + 1, j) - vat(i - 1, j)) / (2.0 * hx);
                Gj[i] = -src.rpc[i] * 0.5 * (dxlo + dxhi) +
                        (1.0 + src.rpc[i] * src.rpc[i]) * (vhi[i] - vlo[i]) / hy;
            }
        }
    }

    double mnv = std::numeric_limits<double>::infinity();
    double mxv = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : mnv) reduction(max : mxv)
    for (int j = 0; j < ny; ++j) {
        const double* vr = v + size_t(j) * nx;
        double* out = dst.v.data() + size_t(j) * nx;
        const double* Glo = Gp + size_t(j) * nx;
        const double* Ghi = Gp + size_t(j + 1) * nx;
        // column y-derivative with one-sided bottom and bc-dependent top ghost
        auto dyv = [&](int i) -> double {
            if (j == 0) return (src.at(i, 1) - vr[i]) / hy;
            if (j == ny - 1) {
                const double vn = dir0 ? 0.0 : vr[i];
                return (vn - src.at(i, ny - 2)) / (2.0 * hy);
            }
            return (src.at(i, j + 1) - src.at(i, j - 1)) / (2.0 * hy);
        };
        double Fleft;
        {  // face at i = 0
            if (dir0) {
                const double dy_avg = 0.5 * (dyv(0) + 0.0);
                Fleft = (vr[0] - 0.0) / hx + (-src.rpf[0]) * dy_avg;
            } else {
                Fleft = 0.0;
            }
        }
        for (int i = 0; i < nx; ++i) {
            double Fright;
            if (i == nx - 1) {
                if (dir0) {
                    const double dy_avg = 0.5 * (dyv(nx - 1) + 0.0);
                    Fright = (0.0 - vr[nx - 1]) / hx + (-src.rpf[nx]) * dy_avg;
                } else {
                    Fright = 0.0;
                }
            } else {
                const double dy_avg = 0.5 * (dyv(i) + dyv(i + 1));
                Fright = (vr[i + 1] - vr[i]) / hx + (-src.rpf[i + 1]) * dy_avg;
            }
            const double vij = vr[i];
            const double react =
                logistic ? (vij > 0.0 && vij < 1.0 ? vij * (1.0 - vij) : 0.0) : p.f(vij);
            const double nv =
                vij + dt * (p.d * ((Fright - Fleft) / hx + (Ghi[i] - Glo[i]) / hy) + react);
            out[i] = nv;
            mnv = std::min(mnv, nv);
            mxv = std::max(mxv, nv);
            Fleft = Fright;
        }
    }

    double mnu = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
        double flux = 0.0;
        if (i + 1 < nx)
            flux += (u[i + 1] - u[i]) / (src.tauf[i + 1] * hx * hx);
        else if (dir0)
            flux += (0.0 - u[i]) / (src.tauf[nx] * hx * hx);
        if (i > 0)
            flux -= (u[i] - u[i - 1]) / (src.tauf[i] * hx * hx);
        else if (dir0)
            flux -= (u[0] - 0.0) / (src.tauf[0] * hx * hx);
        const double nu_i =
            u[i] + dt * (p.D / src.tauc[i] * flux + p.nu * v[i] - p.mu * u[i]);
        dst.u[i] = nu_i;
        mnu = std::min(mnu, nu_i);
    }

    if (!std::isfinite(mnv) || !std::isfinite(mxv) || !std::isfinite(mnu))
        throw std::runtime_error("step: non-finite value detected");
    dst.min_u = mnu;
    dst.min_v = mnv;
    dst.max_v = mxv;
    dst.t = src.t + dt;
}

FieldState step(const FieldState& s, double dt, const ModelParams& p) {
    FieldState out;
    step_into(s, out, dt, p);
    return out;
}

double total_mass(const FieldState& s) {
    const int nx = s.grid.nx(), ny = s.grid.ny();
    double road = 0.0;
    for (int i = 0; i < nx; ++i) road += s.u[i] * s.tauc[i];
    double field = 0.0;
    for (int j = 0; j < ny; ++j) {
        const double* vr = s.v.data() + size_t(j) * nx;
        for (int i = 0; i < nx; ++i) field += vr[i];
    }
    return road * s.grid.hx + field * s.grid.hx * s.grid.hy;
}

bool ordering_preserved(FieldState lo, FieldState hi, const ModelParams& p, int n_steps) {
    if (lo.grid.nx() != hi.grid.nx() || lo.grid.ny() != hi.grid.ny() ||
        lo.grid.x_min != hi.grid.x_min || lo.grid.hx != hi.grid.hx || lo.grid.hy != hi.grid.hy)
        throw std::invalid_argument("ordering_preserved: grid mismatch");
    const double tol = 1e-10;
    auto ordered = [&]() {
        for (size_t i = 0; i < lo.u.size(); ++i)
            if (lo.u[i] > hi.u[i] + tol) return false;
        for (size_t i = 0; i < lo.v.size(); ++i)
            if (lo.v[i] > hi.v[i] + tol) return false;
        return true;
    };
    if (!ordered()) throw std::invalid_argument("ordering_preserved: states not ordered at t = 0");
    const double dt = cfl_dt(lo, p, 0.4);
    FieldState lo2 = lo, hi2 = hi;
    for (int n = 0; n < n_steps; ++n) {
        step_into(lo, lo2, dt, p);
        step_into(hi, hi2, dt, p);
        std::swap(lo, lo2);
        std::swap(hi, hi2);
        if (!ordered()) return false;
    }
    return true;
}

RunResult run(const Geometry& g, const ModelParams& p, const GridSpec& grid,
              const InitialDatum& datum, double t_final, double safety, double threshold,
              const std::function<void(const FieldState&)>& on_report) {
    RunResult res;
    res.state = discretize(g, p, grid, datum);
    if (threshold < 0.0) threshold = 0.5 * p.nu / p.mu;
    const double dt0 = cfl_dt(res.state, p, safety);
    const long nsteps = std::max(1L, long(std::ceil(t_final / dt0)));
    const double dt = t_final / double(nsteps);

    FieldState scratch = res.state;
    auto report = [&](const FieldState& s) {
        DiagRow d;
        d.t = s.t;
        d.mass = total_mass(s);
        d.min_u = s.min_u;
        d.min_v = s.min_v;
        d.max_v = s.max_v;
        d.steady_residual = std::max(std::fabs(p.mu / p.nu * s.u[s.center_i] - 1.0),
                                     std::fabs(s.at(s.center_i, s.center_j) - 1.0));
        res.diagnostics.push_back(d);
        res.front_t.push_back(s.t);
        res.front_right.push_back(front_position(s, threshold, FrontSide::right));
        res.front_left.push_back(front_position(s, threshold, FrontSide::left));
        if (on_report) on_report(s);
    };
    report(res.state);
    for (long n = 0; n < nsteps; ++n) {
        step_into(res.state, scratch, dt, p);
        std::swap(res.state, scratch);
        if ((n + 1) % grid.nt_report == 0 || n + 1 == nsteps) report(res.state);
    }
    return res;
}

}  // namespace fieldroad
