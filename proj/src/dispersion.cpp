#include "fieldroad/dispersion.hpp"

#include <algorithm>
#include <cmath>

namespace fieldroad {

double c_kpp(const ModelParams& p) { return 2.0 * std::sqrt(p.d * p.fprime0); }

double dispersion_gamma(double beta, double eta, double eps, const ModelParams& p) {
    const double N = p.nu * (1.0 - eps) * (1.0 + eta) + p.d * (beta - eps * (1.0 + eta));
    return p.mu * (1.0 + eta) / N;
}

std::optional<std::pair<double, double>> curve_alpha(double c, double beta, double eta,
                                                     double eps, const ModelParams& p) {
    if (c < 0.0 || 1.0 + eta <= 0.0) throw std::invalid_argument("curve_alpha: bad c or eta");
    const double N = p.d * beta - p.d * eps * (1.0 + eta) + p.nu * (1.0 - eps) * (1.0 + eta);
    if (N <= 0.0) return std::nullopt;  // gamma would be <= 0
    // Exact elimination of gamma from the first equation; reduces to the
    // familiar 4 mu d D beta / (nu + d beta) fraction at eta = eps = 0.
    const double num = p.d * beta - p.d * (1.0 + eta) * eps - 2.0 * eps * p.nu * (1.0 + eta);
    const double disc = c * c + 4.0 * p.D * p.mu * num / N - 4.0 * p.D * p.D * eps;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    return std::make_pair((c - s) / (2.0 * p.D), (c + s) / (2.0 * p.D));
}

std::optional<std::pair<double, double>> circle_alpha(double c, double beta,
                                                      const ModelParams& p) {
    if (c < 0.0) throw std::invalid_argument("circle_alpha: c must be >= 0");
    const double disc = c * c - 4.0 * p.d * (p.fprime0 + p.d * beta * beta);
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    return std::make_pair((c - s) / (2.0 * p.d), (c + s) / (2.0 * p.d));
}

std::array<double, 3> real_residuals(const RealDispersion& s, const ModelParams& p) {
    const double r1 = s.alpha * s.c - p.D * s.alpha * s.alpha - p.D * s.eps -
                      p.nu * s.gamma * (1.0 + s.eps) + p.mu;
    const double r2 =
        s.alpha * s.c - p.d * s.alpha * s.alpha - p.fprime0 - p.d * s.beta * s.beta;
    const double r3 = p.d * s.gamma * (s.beta / (1.0 + s.eta) - s.eps) - p.mu +
                      p.nu * s.gamma * (1.0 - s.eps);
    return {r1, r2, r3};
}

namespace {

struct BranchFn {
    double c, eta, eps;
    const ModelParams* p;
    int circle_branch;  // 0 lower, 1 upper
    int curve_branch;   // 0 minus, 1 plus

    std::optional<double> operator()(double beta) const {
        auto ca = circle_alpha(c, beta, *p);
        auto ka = curve_alpha(c, beta, eta, eps, *p);
        if (!ca || !ka) return std::nullopt;
        const double av = circle_branch == 0 ? ca->first : ca->second;
        const double kv = curve_branch == 0 ? ka->first : ka->second;
        return av - kv;
    }
};

RealDispersion make_witness(double c, double beta, double eta, double eps,
                            const ModelParams& p, int curve_branch) {
    RealDispersion w;
    w.c = c;
    w.beta = beta;
    w.eta = eta;
    w.eps = eps;
    auto ka = curve_alpha(c, beta, eta, eps, p);
    w.alpha = curve_branch == 0 ? ka->first : ka->second;
    w.gamma = dispersion_gamma(beta, eta, eps, p);
    auto r = real_residuals(w, p);
    w.residual = std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])});
    return w;
}

}  // namespace

std::vector<RealDispersion> intersection_all(double c, double eta, double eps,
                                             const ModelParams& p) {
    const double ck = c_kpp(p);
    if (c < ck) throw std::invalid_argument("intersection: c < c_kpp");
    const double r2 = (c * c - 4.0 * p.d * p.fprime0) / (4.0 * p.d * p.d);
    const double r = std::sqrt(std::max(r2, 0.0));
    std::vector<RealDispersion> found;

    // 2048-point scan with two 4x refinement rounds removes grid-miss risk.
    for (int round = 0, n = 2048; round < 3; ++round, n *= 4) {
        for (int cb = 0; cb < 2; ++cb) {
            for (int kb = 0; kb < 2; ++kb) {
                BranchFn fn{c, eta, eps, &p, cb, kb};
                std::optional<double> prev;
                double prevb = 0.0;
                for (int i = 0; i <= n; ++i) {
                    const double b = -r + 2.0 * r * i / n;
                    auto cur = fn(b);
                    if (prev && cur && ((*prev <= 0.0 && *cur >= 0.0) ||
                                        (*prev >= 0.0 && *cur <= 0.0))) {
                        double lo = prevb, hi = b, flo = *prev;
                        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            auto fm = fn(mid);
                            if (!fm) break;
                            if ((flo <= 0.0) == (*fm <= 0.0)) {
                                lo = mid;
                                flo = *fm;
                            } else {
                                hi = mid;
                            }
                        }
                        const double b0 = 0.5 * (lo + hi);
                        auto g = fn(b0);
                        if (g && std::fabs(*g) <= 1e-12) {
                            RealDispersion w = make_witness(c, b0, eta, eps, p, kb);
                            if (w.alpha > 0.0 && w.gamma > 0.0) found.push_back(w);
                        }
                    }
                    prev = cur;
                    prevb = b;
                }
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const RealDispersion& x, const RealDispersion& y) {
        return x.beta != y.beta ? x.beta < y.beta : x.alpha < y.alpha;
    });
    std::vector<RealDispersion> out;
    for (const auto& w : found)
        if (out.empty() || std::fabs(w.beta - out.back().beta) > 1e-8 ||
            std::fabs(w.alpha - out.back().alpha) > 1e-8)
            out.push_back(w);
    return out;
}

std::optional<RealDispersion> intersection_witness(double c, double eta, double eps,
                                                   const ModelParams& p) {
    auto all = intersection_all(c, eta, eps, p);
    if (all.empty()) return std::nullopt;
    // Prefer the decaying branch (beta > 0) used by the supersolutions.
    for (const auto& w : all)
        if (w.beta > 0.0) return w;
    return all.front();
}

double c_brr(const ModelParams& p, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("c_brr: tol must be positive");
    const double ck = c_kpp(p);
    if (p.D <= 2.0 * p.d) return ck;

    auto exists = [&](double c) { return intersection_witness(c, 0.0, 0.0, p).has_value(); };
    double hi = ck;
    bool found = false;
    for (int k = 0; k < 10; ++k) {
        hi *= 2.0;
        if (exists(hi)) {
            found = true;
            break;
        }
    }
    if (!found) throw std::runtime_error("c_brr: no witness up to 2^10 c_kpp");
    double lo = ck;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (exists(mid))
            hi = mid;
        else
            lo = mid;
    }
    // Monotone-existence sanity at the returned boundary.
    if (!exists(hi + 2.0 * tol))
        throw std::runtime_error("c_brr: existence predicate not monotone above result");
    if (lo - 2.0 * tol > ck && exists(lo - 2.0 * tol))
        throw std::runtime_error("c_brr: existence predicate not monotone below result");
    return hi;
}

std::optional<PerturbedWitness> perturbed_witness(double c, double eta, const ModelParams& p) {
    auto w = intersection_witness(c, eta, 0.0, p);
    if (!w || w->beta <= 0.0) return std::nullopt;
    auto w0 = intersection_witness(c, 0.0, 0.0, p);
    if (!w0) return std::nullopt;
    PerturbedWitness out;
    out.w = *w;
    out.alpha_gap = std::fabs(w->alpha - w0->alpha);
    out.beta_gap = std::fabs(w->beta - w0->beta);
    return out;
}

std::array<std::complex<double>, 4> z_residuals(const ComplexDispersion& s,
                                                const ModelParams& p) {
    using C = std::complex<double>;
    const C g0 = s.gamma1 + s.gamma2;
    const C z1 = s.alpha * s.c - p.D * s.alpha * s.alpha - p.nu * g0 + p.mu;
    const C z2 = s.alpha * s.c - p.d * (s.alpha * s.alpha + s.beta * s.beta) -
                 (p.fprime0 - p.delta);
    const C z3 = p.d * s.beta * (s.gamma1 - s.gamma2) - p.mu + p.nu * g0;
    const C z4 = s.gamma1 * std::exp(-s.beta * s.L) + s.gamma2 * std::exp(s.beta * s.L);
    return {z1, z2, z3, z4};
}

std::vector<std::pair<std::complex<double>, std::complex<double>>> default_seeds(
    double alpha_star, double beta_star) {
    using C = std::complex<double>;
    const double scales[] = {0.1, 0.5, 1.0, 2.0};
    std::vector<C> as, bs;
    for (double s : scales) {
        as.emplace_back(alpha_star, s * alpha_star);
        as.emplace_back(alpha_star, -s * alpha_star);
        bs.emplace_back(beta_star, s * beta_star);
        bs.emplace_back(beta_star, -s * beta_star);
    }
    std::vector<std::pair<C, C>> seeds;
    for (const auto& a : as)
        for (const auto& b : bs) seeds.emplace_back(a, b);
    return seeds;
}

namespace {

// gamma1 from z3 = 0 after z4 = 0 eliminates gamma2 = -gamma1 e^{-2 beta L}.
std::complex<double> strip_gamma1(std::complex<double> beta, double L, const ModelParams& p) {
    const std::complex<double> E = std::exp(-2.0 * beta * L);
    return p.mu / (p.nu * (1.0 - E) + p.d * beta * (1.0 + E));
}

}  // namespace

std::vector<ComplexDispersion> solve_complex(
    double c, double L, const ModelParams& p,
    const std::vector<std::pair<std::complex<double>, std::complex<double>>>& seeds) {
    using C = std::complex<double>;
    if (!(L > 0.0)) throw std::invalid_argument("solve_complex: L must be positive");
    std::vector<ComplexDispersion> roots;
    for (const auto& [a0, b0] : seeds) {
        C a = a0, b = b0;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            const C E = std::exp(-2.0 * b * L);
            const C Q = p.nu * (1.0 - E) + p.d * b * (1.0 + E);
            const C g1 = p.mu / Q;
            const C g0 = g1 * (1.0 - E);
            const C z1 = a * c - p.D * a * a - p.nu * g0 + p.mu;
            const C z2 = a * c - p.d * (a * a + b * b) - (p.fprime0 - p.delta);
            if (!std::isfinite(std::abs(z1)) || !std::isfinite(std::abs(z2))) break;
            if (std::abs(z1) < 1e-14 && std::abs(z2) < 1e-14) {
                converged = true;
                break;
            }
            const C dE = -2.0 * L * E;
            const C dQ = -p.nu * dE + p.d * (1.0 + E) + p.d * b * dE;
            const C dg1 = -p.mu * dQ / (Q * Q);
            const C dg0 = dg1 * (1.0 - E) - g1 * dE;
            const C j11 = c - 2.0 * p.D * a;
            const C j12 = -p.nu * dg0;
            const C j21 = c - 2.0 * p.d * a;
            const C j22 = -2.0 * p.d * b;
            const C det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-30) break;
            const C da = (z1 * j22 - z2 * j12) / det;
            const C db = (j11 * z2 - j21 * z1) / det;
            a -= da;
            b -= db;
        }
        if (!converged) continue;
        if (!(b.real() > 0.0) || std::fabs(b.imag()) < 1e-8 || std::fabs(a.imag()) < 1e-8)
            continue;
        ComplexDispersion s;
        s.c = c;
        s.L = L;
        s.alpha = a;
        s.beta = b;
        s.gamma1 = strip_gamma1(b, L, p);
        s.gamma2 = -s.gamma1 * std::exp(-2.0 * b * L);
        auto z = z_residuals(s, p);
        double worst = 0.0;
        for (const auto& zi : z) worst = std::max(worst, std::abs(zi));
        if (worst > 1e-10) continue;
        bool dup = false;
        for (const auto& r : roots)
            if (std::abs(r.alpha - a) < 1e-8 && std::abs(r.beta - b) < 1e-8) dup = true;
        if (!dup) roots.push_back(s);
    }
    std::sort(roots.begin(), roots.end(), [](const ComplexDispersion& x, const ComplexDispersion& y) {
        if (x.beta.real() != y.beta.real()) return x.beta.real() < y.beta.real();
        return x.beta.imag() < y.beta.imag();
    });
    return roots;
}

std::vector<ComplexDispersion> solve_complex(double c, double L, const ModelParams& p) {
    // Seed near the real critical pair at c_brr.
    const double ck = c_kpp(p);
    const double cb = c_brr(p);
    if (!(c > ck && c <= cb + 1e-12))
        throw std::invalid_argument("solve_complex: c must lie in (c_kpp, c_brr]");
    auto w = intersection_witness(cb * (1.0 + 1e-6), 0.0, 0.0, p);
    double as = w ? w->alpha : c / (2.0 * p.D);
    double bs = w ? w->beta : 0.5;
    return solve_complex(c, L, p, default_seeds(as, bs));
}

double c_L(double L, const ModelParams& p, double tol) {
    const double ck = c_kpp(p);
    const double cb = c_brr(p);
    auto wstar = intersection_witness(cb * (1.0 + 1e-6), 0.0, 0.0, p);
    const auto seeds = default_seeds(wstar ? wstar->alpha : cb / (2.0 * p.D),
                                     wstar ? wstar->beta : 0.5);
    auto nonempty = [&](double c) { return !solve_complex(c, L, p, seeds).empty(); };

    // The existence interval hugs c_brr; scan geometrically shrinking gaps.
    double lo = -1.0;
    for (int j = 1; j <= 24; ++j) {
        const double c = cb - (cb - ck) * std::pow(2.0, -j);
        if (nonempty(c)) {
            lo = c;
            break;
        }
    }
    if (lo < 0.0) throw std::runtime_error("L too small");
    double hi = cb;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (nonempty(mid))
            lo = mid;
        else
            hi = mid;
    }
    const double cl = lo;
    if (!(cl > ck && cl < cb)) throw std::runtime_error("c_L outside (c_kpp, c_brr)");
    return cl;
}

}  // namespace fieldroad
