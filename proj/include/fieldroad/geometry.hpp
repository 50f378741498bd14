#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fieldroad {

// theta0 = arctan(1/a) + pi*1_{a<0} for a != 0, pi/2 for a = 0.
double half_angle(double a);

// Polar coordinates with the cone-axis orientation: x = r sin(theta),
// y = r cos(theta), theta in (-pi, pi]. Rejects the origin.
std::pair<double, double> polar(double x, double y);

// Boundary curve y = rho(x) of an asymptotically conical field, with closed
// form first and second derivatives.
struct Geometry {
    enum class Kind { exact_cone, hyperbola, custom };
    Kind kind = Kind::exact_cone;
    double a = 0.0;       // asymptotic slope
    double theta0 = 0.0;  // half-angle of the limiting cone
    std::function<double(double)> rho, drho, ddrho;
    std::string name = "cone";

    // Numeric check of the Hypothesis-1 limits at |x| = 1e2, 1e3, 1e4.
    // Throws std::invalid_argument on violation.
    void validate() const;
    bool even() const;  // rho(x) == rho(-x) on samples
};

// rho(x) = a|x| for |x| >= 1, blended by an even C^2 polynomial inside.
Geometry exact_cone(double a);
// rho(x) = sign(a) sqrt(1 + a^2 x^2) for a != 0; rho == 0 for a = 0.
Geometry hyperbola(double a);
// rho(x) = 1/(1+x^2): a = 0 with a decaying bump, used by the subsolution
// certificates.
Geometry bump_road();
// Custom geometry from closed-form rules.
Geometry custom_geometry(double a, std::function<double(double)> rho,
                         std::function<double(double)> drho,
                         std::function<double(double)> ddrho,
                         std::string name = "custom");
// Custom geometry from a sampled (x, rho) table; derivatives by local
// piecewise-quadratic differentiation through the three nearest samples.
Geometry custom_from_table(double a, std::vector<double> xs, std::vector<double> rhos);

struct Mat2 {
    double a11, a12, a21, a22;
    double det() const { return a11 * a22 - a12 * a21; }
};

// Metric quantities for the flattening map with reference graph rho~ == 0.
struct MetricData {
    std::function<double(double)> tau;         // sqrt(1 + rho'^2)
    std::function<Mat2(double)> A;             // unit-determinant shear tensor
    std::function<double(double)> rtilde;      // |(x, rho(x))|
    std::function<double(double)> thetatilde;  // polar angle of (x, rho(x))
};

MetricData metric(const Geometry& g);

}  // namespace fieldroad
