#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fieldroad/dispersion.hpp"
#include "fieldroad/geometry.hpp"
#include "fieldroad/model.hpp"

namespace fieldroad {

// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 clamped to [0,1]: C^2 with closed
// form derivatives and derivative bounds that enter the R-selection
// inequalities.
struct Cutoff {
    double operator()(double s) const;
    double d1(double s) const;
    double d2(double s) const;
    static constexpr double sup_d1 = 15.0 / 8.0;
    double sup_d2() const;                 // 10/sqrt(3)
    double sup_phi_one_minus_s() const;    // max_s phi(s)(1-s)
};

// The angular profile Psi(r, theta) of the conical supersolutions, with
// analytic partial derivatives.
struct Psi {
    double alpha = 0, beta = 0, eta = 0, R = 0, theta0 = 0;
    Cutoff cutoff;

    double value(double r, double th) const;
    double dr(double r, double th) const;
    double drr(double r, double th) const;
    double dtheta(double r, double th) const;
    double dthetatheta(double r, double th) const;
    // e^{alpha(r-ct)} Delta (e^{-alpha(r-ct)} Psi)
    double tilde_delta(double r, double th) const;
};

Psi build_psi(double alpha, double beta, double eta, double R, double theta0,
              Cutoff cutoff = {});

struct Margin {
    std::string name;
    double value = 0.0;
};

struct SupersolutionCertificate {
    enum class Kind { radial, conical, asymptotic };
    Kind kind = Kind::radial;
    bool valid = false;
    std::string reason;  // set when invalid
    double c = 0, alpha = 0, beta = 0, gamma = 0, eta = 0, eps = 0;
    double R = 0;
    double amplitude = 1.0;  // the cap on the datum the certificate dominates
    std::vector<Margin> margins;

    double worst_margin() const;
    const Margin* find(const std::string& name) const;
};

// D <= 2d: radial profile min(nu/mu, e^{-alpha(r-ct)}), gamma = mu/nu.
SupersolutionCertificate radial_supersolution(double c, const ModelParams& p,
                                              int n_r = 256);

// D > 2d, exactly conical field: Psi-shaped profile verified on
// r in [R, 10R] x theta in [-theta0, theta0].
SupersolutionCertificate conical_supersolution(double c, double theta0,
                                               const ModelParams& p, int nr = 512,
                                               int ntheta = 256);

// D > 2d, asymptotically conical field: conical machinery plus the measured
// boundary deviations against the (eta, eps)-perturbed system.
SupersolutionCertificate asymptotic_supersolution(double c, const Geometry& g,
                                                  const ModelParams& p, int nr = 512,
                                                  int ntheta = 256, int nx = 2048);

// Hump phi on [0, M]: d phi'' + f'(0) phi = 1 + kappa, phi(0) = 0,
// phi'(0) = (2 mu + 1)/d, extended by zero past its first positive zero M.
struct Hump {
    double M = 0, kappa = 0;
    double omega = 0, slope0 = 0, base = 0;  // phi = base(1-cos wy) + (slope0/w) sin wy
    double max_value = 0;

    double value(double y) const;
    double d1(double y) const;
    double d2(double y) const;
};
Hump build_hump(const ModelParams& p, double kappa = 0.5);

struct SubsolutionCertificate {
    bool valid = false;
    std::string reason;
    double c = 0, L = 0;
    double W = 0;        // moving-window half-width
    double lambda = 0;   // truncation shift
    double Lambda = 0;   // localisation offset found by verify_subsolution
    Hump hump;
    ComplexDispersion disp;

    // positivity components on the build grid over [-W, W] x [0, L]
    struct Region {
        int nxi = 0, ny = 0;
        double xi_min = 0, xi_max = 0, y_max = 0;
        std::vector<std::uint8_t> field_mask;  // nxi*ny, row-major by j
        std::vector<std::uint8_t> road_mask;   // nxi
        std::string description;
        double xi(int i) const { return xi_min + (xi_max - xi_min) * i / (nxi - 1); }
        double y(int j) const { return y_max * j / (ny - 1); }
    } region;

    std::vector<Margin> residuals;

    // traveling profiles at xi = x - ct
    double U(double xi) const;
    double V(double xi, double y) const;
};

// Takes the strip root at (c, L), forms the oscillating pair, and picks
// lambda by halving until (U - lambda, V + lambda phi) has bounded positivity
// components inside the window. Throws std::runtime_error after 60 halvings.
SubsolutionCertificate build_subsolution(double c, double L, const ModelParams& p,
                                         const Geometry& g);

// Doubles Lambda from lambda_init until the three perturbation sups fit under
// their lambda-scaled thresholds; invalid after Lambda reaches 2^20.
SubsolutionCertificate verify_subsolution(SubsolutionCertificate cert, const Geometry& g,
                                          const ModelParams& p, double lambda_init = 16.0);

// The three perturbation sups at a given window offset (left window edge at
// x = Lambda); exposed for tests and diagnostics.
std::array<double, 3> perturbation_sups(const SubsolutionCertificate& cert,
                                        const Geometry& g, const ModelParams& p,
                                        double Lambda);

}  // namespace fieldroad
