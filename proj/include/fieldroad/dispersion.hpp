#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "fieldroad/model.hpp"

namespace fieldroad {

// Solution of the real algebraic speed system (base or perturbed).
struct RealDispersion {
    double c = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double eps = 0.0;
    double residual = 0.0;  // max |residual| of the three defining equations
};

// Root of the complex strip system (z1..z4 = 0).
struct ComplexDispersion {
    double c = 0.0;
    double L = 0.0;
    std::complex<double> alpha, beta, gamma1, gamma2;
};

// Classical KPP speed 2 sqrt(d f'(0)).
double c_kpp(const ModelParams& p);

// gamma at third-equation equality for the (eta, eps) system.
double dispersion_gamma(double beta, double eta, double eps, const ModelParams& p);

// Roots alpha-/alpha+ of the road equation at equality; nullopt when the
// discriminant is negative or the gamma denominator is <= 0.
std::optional<std::pair<double, double>> curve_alpha(double c, double beta, double eta,
                                                     double eps, const ModelParams& p);

// Roots of -d alpha^2 + c alpha = f'(0) + d beta^2; nullopt when c < c_KPP or
// |beta| exceeds the circle radius.
std::optional<std::pair<double, double>> circle_alpha(double c, double beta,
                                                      const ModelParams& p);

// Residuals of the three (eta, eps)-system equalities at (c, alpha, beta, gamma).
std::array<double, 3> real_residuals(const RealDispersion& s, const ModelParams& p);

// Scans beta over the circle range on all four branch pairs, brackets sign
// changes of alpha_circle - alpha_curve, refines by bisection, and returns the
// witness with alpha, gamma > 0 (preferring beta > 0, then smallest beta).
// Throws if c < c_kpp.
std::optional<RealDispersion> intersection_witness(double c, double eta, double eps,
                                                   const ModelParams& p);
// All deduplicated intersections (used by the oracle-style tests).
std::vector<RealDispersion> intersection_all(double c, double eta, double eps,
                                             const ModelParams& p);

// Smallest c with a witness; returns c_kpp when D <= 2d.
double c_brr(const ModelParams& p, double tol = 1e-8);

// Witness of the eta-system (eps = 0) plus its gap to the unperturbed witness.
struct PerturbedWitness {
    RealDispersion w;
    double alpha_gap = 0.0;
    double beta_gap = 0.0;
};
std::optional<PerturbedWitness> perturbed_witness(double c, double eta, const ModelParams& p);

// z1..z4 of the strip system; z2 uses the penalized slope f'(0) - delta.
std::array<std::complex<double>, 4> z_residuals(const ComplexDispersion& s,
                                                const ModelParams& p);

// Default log-polar seed grid around the real critical pair.
std::vector<std::pair<std::complex<double>, std::complex<double>>> default_seeds(
    double alpha_star, double beta_star);

// Newton multi-start on the reduced (z1, z2) system with gamma2, gamma1
// eliminated; keeps roots with Re beta > 0, |Im beta| >= 1e-8,
// |Im alpha| >= 1e-8 and |z_i| <= 1e-10; deduplicates within 1e-8.
std::vector<ComplexDispersion> solve_complex(
    double c, double L, const ModelParams& p,
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>& seeds);
std::vector<ComplexDispersion> solve_complex(double c, double L, const ModelParams& p);

// Supremum of the c-existence interval of constrained strip roots.
// Throws std::runtime_error("L too small") when no c in (c_KPP, c_BRR) admits roots.
double c_L(double L, const ModelParams& p, double tol = 1e-8);

}  // namespace fieldroad
