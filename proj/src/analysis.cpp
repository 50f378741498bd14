#include "fieldroad/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "fieldroad/dispersion.hpp"

namespace fieldroad {

namespace {
double rtilde_of(const FieldState& s, double x) { return std::hypot(x, s.geom.rho(x)); }
}  // namespace

double front_position(const FieldState& s, double threshold, FrontSide side) {
    const int nx = s.grid.nx();
    if (!(threshold > 0.0)) throw std::invalid_argument("front_position: threshold must be > 0");
    const double hx = s.grid.hx;
    if (side == FrontSide::right) {
        int i = nx - 1;
        while (i >= 0 && s.u[i] < threshold) --i;
        if (i < 0) return 0.0;
        if (i == nx - 1) return rtilde_of(s, s.grid.x_max);  // saturated to the edge
        const double xs = s.xc[i] + hx * (s.u[i] - threshold) / (s.u[i] - s.u[i + 1]);
        return rtilde_of(s, xs);
    }
    int i = 0;
    while (i < nx && s.u[i] < threshold) ++i;
    if (i >= nx) return 0.0;
    if (i == 0) return rtilde_of(s, s.grid.x_min);
    const double xs = s.xc[i] - hx * (s.u[i] - threshold) / (s.u[i] - s.u[i - 1]);
    return rtilde_of(s, xs);
}

double front_position_field(const FieldState& s, double threshold, double h, FrontSide side) {
    // track v on the strip row nearest w = h (distance to the boundary in the
    // sheared frame approximates dist to the road for mild slopes)
    const int nx = s.grid.nx();
    int j = std::min(s.grid.ny() - 1, std::max(0, int(h / s.grid.hy)));
    const double hx = s.grid.hx;
    if (side == FrontSide::right) {
        int i = nx - 1;
        while (i >= 0 && s.at(i, j) < threshold) --i;
        if (i < 0) return 0.0;
        if (i == nx - 1) return rtilde_of(s, s.grid.x_max);
        const double xs =
            s.xc[i] + hx * (s.at(i, j) - threshold) / (s.at(i, j) - s.at(i + 1, j));
        return rtilde_of(s, xs);
    }
    int i = 0;
    while (i < nx && s.at(i, j) < threshold) ++i;
    if (i >= nx) return 0.0;
    if (i == 0) return rtilde_of(s, s.grid.x_min);
    const double xs = s.xc[i] - hx * (s.at(i, j) - threshold) / (s.at(i, j) - s.at(i - 1, j));
    return rtilde_of(s, xs);
}

SpeedFit fit_speed(const FrontSeries& series, double window_fraction) {
    const size_t n = series.times.size();
    if (n != series.positions.size()) throw std::invalid_argument("fit_speed: length mismatch");
    const size_t nwin = size_t(std::ceil(window_fraction * double(n)));
    if (nwin < 10) throw std::invalid_argument("fit_speed: fewer than 10 samples in the window");
    const size_t start = n - nwin;

    double st = 0.0, sp = 0.0;
    for (size_t k = start; k < n; ++k) {
        st += series.times[k];
        sp += series.positions[k];
    }
    const double tbar = st / double(nwin), pbar = sp / double(nwin);
    double sxx = 0.0, sxy = 0.0;
    for (size_t k = start; k < n; ++k) {
        const double dt = series.times[k] - tbar;
        sxx += dt * dt;
        sxy += dt * (series.positions[k] - pbar);
    }
    SpeedFit fit;
    fit.n_used = int(nwin);
    if (sxx == 0.0) return fit;
    fit.speed = sxy / sxx;
    double rss = 0.0;
    for (size_t k = start; k < n; ++k) {
        const double r = series.positions[k] - pbar - fit.speed * (series.times[k] - tbar);
        rss += r * r;
    }
    if (nwin > 2) fit.stderr_ = std::sqrt(rss / double(nwin - 2) / sxx);
    return fit;
}

FrontSeries make_series(const std::vector<double>& t, const std::vector<double>& pos,
                        double threshold, double transient) {
    FrontSeries s;
    s.threshold = threshold;
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] < transient) continue;
        s.times.push_back(t[k]);
        s.positions.push_back(pos[k]);
    }
    return s;
}

std::vector<SpeedRow> speed_report(const ModelParams& p, const std::vector<Geometry>& gs,
                                   const GridSpec& grid, const SpeedReportOptions& opt) {
    std::vector<SpeedRow> rows;
    const double ck = c_kpp(p);
    const double cb = c_brr(p);
    const double threshold = opt.threshold_frac * p.nu / p.mu;
    for (const auto& g : gs) {
        auto datum = bump_datum(0.0, g.rho(0.0) + 2.0, 4.0, 1.0);
        auto res = run(g, p, grid, datum, opt.t_final, opt.safety, threshold);
        for (auto side : {FrontSide::right, FrontSide::left}) {
            const auto& pos = side == FrontSide::right ? res.front_right : res.front_left;
            auto series = make_series(res.front_t, pos, threshold, opt.transient);
            auto fit = fit_speed(series, opt.fit_fraction);
            SpeedRow row;
            row.geometry = g.name;
            row.a = g.a;
            row.theta0 = g.theta0;
            row.side = side == FrontSide::right ? "right" : "left";
            row.speed = fit.speed;
            row.stderr_ = fit.stderr_;
            row.c_kpp = ck;
            row.c_brr = cb;
            row.ratio = cb > 0.0 ? fit.speed / cb : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace fieldroad
