#include "fieldroad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fieldroad {

double half_angle(double a) {
    if (a == 0.0) return M_PI / 2.0;
    double t = std::atan(1.0 / a);
    if (a < 0.0) t += M_PI;
    return t;
}

std::pair<double, double> polar(double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) throw std::invalid_argument("polar: origin has no angle");
    return {r, std::atan2(x, y)};
}

namespace {
// Even C^2 blend p(s) = c2 s^2 + c4 s^4 + c6 s^6 with p(1)=1, p'(1)=1, p''(1)=0.
constexpr double kC2 = 15.0 / 8.0;
constexpr double kC4 = -5.0 / 4.0;
constexpr double kC6 = 3.0 / 8.0;

double blend(double s) { return ((kC6 * s * s + kC4) * s * s + kC2) * s * s; }
double blend_d(double s) { return ((6 * kC6 * s * s + 4 * kC4) * s * s + 2 * kC2) * s; }
double blend_dd(double s) { return (30 * kC6 * s * s + 12 * kC4) * s * s + 2 * kC2; }
}  // namespace

Geometry exact_cone(double a) {
    Geometry g;
    g.kind = Geometry::Kind::exact_cone;
    g.a = a;
    g.theta0 = half_angle(a);
    g.name = "cone";
    g.rho = [a](double x) {
        const double s = std::fabs(x);
        return s >= 1.0 ? a * s : a * blend(s);
    };
    g.drho = [a](double x) {
        const double s = std::fabs(x);
        const double sg = x >= 0.0 ? 1.0 : -1.0;
        return s >= 1.0 ? a * sg : a * sg * blend_d(s);
    };
    g.ddrho = [a](double x) {
        const double s = std::fabs(x);
        return s >= 1.0 ? 0.0 : a * blend_dd(s);
    };
    return g;
}

Geometry hyperbola(double a) {
    Geometry g;
    g.kind = Geometry::Kind::hyperbola;
    g.a = a;
    g.theta0 = half_angle(a);
    g.name = "hyperbola";
    if (a == 0.0) {
        g.rho = [](double) { return 0.0; };
        g.drho = [](double) { return 0.0; };
        g.ddrho = [](double) { return 0.0; };
        return g;
    }
    const double sg = a > 0.0 ? 1.0 : -1.0;
    const double a2 = a * a;
    g.rho = [sg, a2](double x) { return sg * std::sqrt(1.0 + a2 * x * x); };
    g.drho = [sg, a2](double x) { return sg * a2 * x / std::sqrt(1.0 + a2 * x * x); };
    g.ddrho = [sg, a2](double x) {
        const double q = 1.0 + a2 * x * x;
        return sg * a2 / (q * std::sqrt(q));
    };
    return g;
}

Geometry bump_road() {
    Geometry g;
    g.kind = Geometry::Kind::custom;
    g.a = 0.0;
    g.theta0 = M_PI / 2.0;
    g.name = "bump";
    g.rho = [](double x) { return 1.0 / (1.0 + x * x); };
    g.drho = [](double x) {
        const double q = 1.0 + x * x;
        return -2.0 * x / (q * q);
    };
    g.ddrho = [](double x) {
        const double q = 1.0 + x * x;
        return (6.0 * x * x - 2.0) / (q * q * q);
    };
    return g;
}

Geometry custom_geometry(double a, std::function<double(double)> rho,
                         std::function<double(double)> drho,
                         std::function<double(double)> ddrho, std::string name) {
    Geometry g;
    g.kind = Geometry::Kind::custom;
    g.a = a;
    g.theta0 = half_angle(a);
    g.rho = std::move(rho);
    g.drho = std::move(drho);
    g.ddrho = std::move(ddrho);
    g.name = std::move(name);
    return g;
}

Geometry custom_from_table(double a, std::vector<double> xs, std::vector<double> rhos) {
    if (xs.size() != rhos.size() || xs.size() < 3)
        throw std::invalid_argument("custom_from_table: need >= 3 samples");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw std::invalid_argument("custom_from_table: x samples must be strictly increasing");

    // Local quadratic through the three samples nearest x; outside the table
    // the boundary quadratic extends.
    auto quad_at = [xs = std::move(xs), rhos = std::move(rhos)](double x) {
        auto it = std::lower_bound(xs.begin(), xs.end(), x);
        size_t i = static_cast<size_t>(it - xs.begin());
        i = std::min(std::max<size_t>(i, 1), xs.size() - 2);
        const double x0 = xs[i - 1], x1 = xs[i], x2 = xs[i + 1];
        const double y0 = rhos[i - 1], y1 = rhos[i], y2 = rhos[i + 1];
        // Newton form coefficients
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double c2 = (d12 - d01) / (x2 - x0);
        const double val = y0 + d01 * (x - x0) + c2 * (x - x0) * (x - x1);
        const double der = d01 + c2 * (2.0 * x - x0 - x1);
        const double der2 = 2.0 * c2;
        return std::array<double, 3>{val, der, der2};
    };

    Geometry g;
    g.kind = Geometry::Kind::custom;
    g.a = a;
    g.theta0 = half_angle(a);
    g.name = "table";
    g.rho = [quad_at](double x) { return quad_at(x)[0]; };
    g.drho = [quad_at](double x) { return quad_at(x)[1]; };
    g.ddrho = [quad_at](double x) { return quad_at(x)[2]; };
    return g;
}

void Geometry::validate() const {
    const double xs[] = {1e2, 1e3, 1e4};
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double X : xs) {
        for (double x : {X, -X}) {
            const double sg = x >= 0.0 ? 1.0 : -1.0;
            if (!std::isfinite(rho(x)) || !std::isfinite(drho(x)) || !std::isfinite(ddrho(x)))
                throw std::invalid_argument("geometry: non-finite rho at x=" + std::to_string(x));
            if (std::fabs(drho(x) - sg * a) > 0.5)
                throw std::invalid_argument("geometry: rho' does not approach +-a");
        }
        const double gap = std::fabs(rho(X) - a * X) + std::fabs(rho(-X) - a * X) +
                           std::fabs(drho(X) - a) + std::fabs(drho(-X) + a) +
                           std::fabs(ddrho(X)) + std::fabs(ddrho(-X));
        if (gap > prev_gap + 1e-12)
            throw std::invalid_argument("geometry: Hypothesis-1 deviations not decreasing");
        prev_gap = gap;
    }
}

bool Geometry::even() const {
    for (double x : {0.3, 1.7, 12.0, 143.0, 2048.0})
        if (std::fabs(rho(x) - rho(-x)) > 1e-12 * (1.0 + std::fabs(rho(x)))) return false;
    return true;
}

MetricData metric(const Geometry& g) {
    MetricData m;
    auto dr = g.drho;
    m.tau = [dr](double x) { return std::sqrt(1.0 + dr(x) * dr(x)); };
    m.A = [dr](double x) {
        const double rp = dr(x);
        return Mat2{1.0, -rp, -rp, 1.0 + rp * rp};
    };
    auto r = g.rho;
    m.rtilde = [r](double x) { return std::hypot(x, r(x)); };
    m.thetatilde = [r](double x) { return std::atan2(x, r(x)); };
    return m;
}

}  // namespace fieldroad
