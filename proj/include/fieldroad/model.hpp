#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace fieldroad {

// Reaction rule on the field. `kind` lets the solver inline the logistic
// nonlinearity in its hot loop; arbitrary rules go through `fn`.
struct ReactionRule {
    enum class Kind { logistic, custom };
    Kind kind = Kind::logistic;
    std::function<double(double)> fn;
    double fprime0 = 1.0;

    double operator()(double v) const {
        // extended by zero outside (0, 1): solver states may carry
        // truncation-scale undershoots, and f(-s) = -s(1+s) would amplify them
        if (kind == Kind::logistic) return v > 0.0 && v < 1.0 ? v * (1.0 - v) : 0.0;
        return fn(v);
    }
};

// Logistic v(1-v), extended by zero for v >= 1.
ReactionRule logistic_reaction();

struct ModelParams {
    double d = 1.0;    // field diffusivity
    double D = 1.0;    // road diffusivity
    double mu = 1.0;   // road -> field exchange
    double nu = 1.0;   // field -> road exchange
    ReactionRule f = logistic_reaction();
    double fprime0 = 1.0;
    double delta = 0.05;  // KPP penalization used when linearizing

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

ModelParams make_params(double d, double D, double mu, double nu,
                        ReactionRule f = logistic_reaction());

// Copy with f == 0 (conservation runs); fprime0 is kept for the CFL bound.
ModelParams without_reaction(ModelParams p);

struct KppReport {
    enum class Failure { none, endpoint_zero, endpoint_one, not_positive, ratio_increase, not_finite };
    bool ok = true;
    Failure failure = Failure::none;
    double v = 0.0;       // first violating sample (when !ok)
    std::string detail;
};

// Checks f(0)=0, f(1)=0, f>0 on the sampled interior and f(v)/v nonincreasing
// across consecutive samples (tolerance 1e-12). Non-finite evaluations are a
// distinct failure kind.
KppReport kpp_check(const std::function<double(double)>& f, int n_samples);

}  // namespace fieldroad
