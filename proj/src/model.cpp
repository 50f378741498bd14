#include "fieldroad/model.hpp"

#include <cmath>

namespace fieldroad {

ReactionRule logistic_reaction() {
    ReactionRule r;
    r.kind = ReactionRule::Kind::logistic;
    r.fn = [](double v) { return v > 0.0 && v < 1.0 ? v * (1.0 - v) : 0.0; };
    r.fprime0 = 1.0;
    return r;
}

void ModelParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument(std::string(name) + " must be positive and finite");
    };
    positive(d, "d");
    positive(D, "D");
    positive(mu, "mu");
    positive(nu, "nu");
    positive(fprime0, "fprime0");
    if (!(delta >= 0.0) || !(delta < fprime0))
        throw std::invalid_argument("delta must satisfy 0 <= delta < fprime0");
    // fprime0 is stored explicitly; guard against a mismatched rule.
    const double h = 1e-8;
    const double slope = f(h) / h;
    if (std::fabs(slope - fprime0) > 1e-6)
        throw std::invalid_argument("fprime0 inconsistent with f near 0: f(h)/h = " +
                                    std::to_string(slope));
}

ModelParams make_params(double d, double D, double mu, double nu, ReactionRule f) {
    ModelParams p;
    p.d = d;
    p.D = D;
    p.mu = mu;
    p.nu = nu;
    p.f = f;
    p.fprime0 = f.fprime0;
    p.delta = 0.05 * f.fprime0;
    p.validate();
    return p;
}

ModelParams without_reaction(ModelParams p) {
    p.f.kind = ReactionRule::Kind::custom;
    p.f.fn = [](double) { return 0.0; };
    return p;
}

KppReport kpp_check(const std::function<double(double)>& f, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("kpp_check: n_samples must be >= 2");
    const double tol = 1e-12;
    KppReport rep;
    auto fail = [&rep](KppReport::Failure kind, double v, std::string detail) {
        rep.ok = false;
        rep.failure = kind;
        rep.v = v;
        rep.detail = std::move(detail);
        return rep;
    };

    const double f0 = f(0.0);
    if (!std::isfinite(f0)) return fail(KppReport::Failure::not_finite, 0.0, "f(0) not finite");
    if (std::fabs(f0) > tol) return fail(KppReport::Failure::endpoint_zero, 0.0, "f(0) != 0");
    const double f1 = f(1.0);
    if (!std::isfinite(f1)) return fail(KppReport::Failure::not_finite, 1.0, "f(1) not finite");
    if (std::fabs(f1) > tol) return fail(KppReport::Failure::endpoint_one, 1.0, "f(1) != 0");

    double prev_ratio = 0.0;
    bool have_prev = false;
    for (int k = 1; k <= n_samples; ++k) {
        const double v = static_cast<double>(k) / n_samples;
        const double fv = f(v);
        if (!std::isfinite(fv)) return fail(KppReport::Failure::not_finite, v, "f(v) not finite");
        if (k < n_samples && fv <= 0.0)
            return fail(KppReport::Failure::not_positive, v, "f(v) <= 0 in (0,1)");
        const double ratio = fv / v;
        if (have_prev && ratio > prev_ratio + tol)
            return fail(KppReport::Failure::ratio_increase, v, "f(v)/v increased");
        prev_ratio = ratio;
        have_prev = true;
    }
    return rep;
}

}  // namespace fieldroad
