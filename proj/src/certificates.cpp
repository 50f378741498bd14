#include "fieldroad/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace fieldroad {

double Cutoff::operator()(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return ((6.0 * s - 15.0) * s + 10.0) * s * s * s;
}

double Cutoff::d1(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double t = s * (1.0 - s);
    return 30.0 * t * t;
}

double Cutoff::d2(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 60.0 * s * (2.0 * s * s - 3.0 * s + 1.0);
}

double Cutoff::sup_d2() const { return 10.0 / std::sqrt(3.0); }

double Cutoff::sup_phi_one_minus_s() const {
    // max of phi(s)(1-s); one interior maximum, golden-section on [0, 1]
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto f = [this](double s) { return (*this)(s) * (1.0 - s); };
    double a = 0.0, b = 1.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    for (int i = 0; i < 200; ++i) {
        if (f(x1) < f(x2))
            a = x1, x1 = x2, x2 = a + gr * (b - a);
        else
            b = x2, x2 = x1, x1 = b - gr * (b - a);
    }
    return f(0.5 * (a + b));
}

namespace {
struct PsiParts {
    double phi, dphi, ddphi, zeta, expf, sgn;
};

PsiParts psi_parts(const Psi& p, double r, double th) {
    PsiParts q;
    q.sgn = th >= 0.0 ? 1.0 : -1.0;
    q.zeta = std::fabs(th) - p.theta0;
    const double s = std::sqrt(p.R) / p.theta0 * q.zeta + 1.0;
    q.phi = p.cutoff(s);
    q.dphi = p.cutoff.d1(s);
    q.ddphi = p.cutoff.d2(s);
    q.expf = std::exp(p.beta * r * q.zeta);
    return q;
}
}  // namespace

double Psi::value(double r, double th) const {
    auto q = psi_parts(*this, r, th);
    return (q.phi * q.expf + eta) / (1.0 + eta);
}

double Psi::dr(double r, double th) const {
    auto q = psi_parts(*this, r, th);
    return q.phi * beta * q.zeta * q.expf / (1.0 + eta);
}

double Psi::drr(double r, double th) const {
    auto q = psi_parts(*this, r, th);
    return q.phi * beta * beta * q.zeta * q.zeta * q.expf / (1.0 + eta);
}

double Psi::dtheta(double r, double th) const {
    auto q = psi_parts(*this, r, th);
    const double sR = std::sqrt(R) / theta0;
    return q.sgn * (q.dphi * sR + q.phi * beta * r) * q.expf / (1.0 + eta);
}

double Psi::dthetatheta(double r, double th) const {
    auto q = psi_parts(*this, r, th);
    const double sR = std::sqrt(R) / theta0;
    return (q.ddphi * sR * sR + 2.0 * q.dphi * sR * beta * r + q.phi * beta * beta * r * r) *
           q.expf / (1.0 + eta);
}

double Psi::tilde_delta(double r, double th) const {
    const double v = value(r, th);
    return drr(r, th) - 2.0 * alpha * dr(r, th) + alpha * alpha * v + dr(r, th) / r -
           alpha / r * v + dthetatheta(r, th) / (r * r);
}

Psi build_psi(double alpha, double beta, double eta, double R, double theta0, Cutoff cutoff) {
    if (!(beta > 0.0) || !(eta > 0.0) || !(eta < 1.0) || !(R > 0.0))
        throw std::invalid_argument("build_psi: need beta > 0, eta in (0,1), R > 0");
    Psi p;
    p.alpha = alpha;
    p.beta = beta;
    p.eta = eta;
    p.R = R;
    p.theta0 = theta0;
    p.cutoff = cutoff;
    return p;
}

double SupersolutionCertificate::worst_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& x : margins) m = std::min(m, x.value);
    return m;
}

const Margin* SupersolutionCertificate::find(const std::string& name) const {
    for (const auto& m : margins)
        if (m.name == name) return &m;
    return nullptr;
}

namespace {
constexpr double kMarginTol = 1e-10;  // equality-built witnesses carry roundoff

bool all_nonnegative(const std::vector<Margin>& ms) {
    for (const auto& m : ms)
        if (!(m.value >= -kMarginTol)) return false;
    return true;
}
}  // namespace

SupersolutionCertificate radial_supersolution(double c, const ModelParams& p, int n_r) {
    SupersolutionCertificate cert;
    cert.kind = SupersolutionCertificate::Kind::radial;
    cert.c = c;
    if (p.D > 2.0 * p.d) {
        cert.reason = "radial supersolutions require D <= 2d";
        return cert;
    }
    const double ck = c_kpp(p);
    if (c < ck) {
        cert.reason = "c below c_kpp";
        return cert;
    }
    cert.gamma = p.mu / p.nu;
    const double disc = c * c - 4.0 * p.d * p.fprime0;
    cert.alpha = (c + std::sqrt(disc)) / (2.0 * p.d);  // largest field root
    cert.beta = 0.0;

    // field inequality alpha c - d(alpha^2 - alpha/r) >= f'(0) on a log grid
    double worst = std::numeric_limits<double>::infinity();
    double argmin = 1.0;
    for (int i = 0; i <= n_r; ++i) {
        const double r = std::pow(10.0, 3.0 * i / n_r);  // [1, 1e3]
        const double m = cert.alpha * c - p.d * (cert.alpha * cert.alpha - cert.alpha / r) -
                         p.fprime0;
        if (m < worst) {
            worst = m;
            argmin = r;
        }
    }
    cert.margins.push_back({"field", worst});
    cert.margins.push_back({"field_argmin_r", argmin});  // diagnostic, not a margin
    cert.margins.push_back({"road", cert.alpha * (c - p.D * cert.alpha)});
    cert.margins.push_back({"exchange", p.nu * cert.gamma - p.mu});
    cert.margins.push_back({"compatibility", c / p.D - cert.alpha});

    std::vector<Margin> gate(cert.margins);
    gate.erase(gate.begin() + 1);  // the argmin entry is informational
    cert.valid = all_nonnegative(gate);
    if (!cert.valid) cert.reason = "negative margin";
    return cert;
}

namespace {

// eta-halving until the perturbed witness exists; nullopt when c <= c_brr.
std::optional<std::pair<double, RealDispersion>> pick_eta(double c, const ModelParams& p) {
    double eta = 0.1;
    for (int k = 0; k < 60; ++k) {
        auto w = perturbed_witness(c, eta, p);
        if (w) return std::make_pair(eta, w->w);
        eta *= 0.5;
    }
    return std::nullopt;
}

// R-doubling conditions for the Psi construction.
bool psi_R_ok(double R, double alpha, double beta, double eta, double theta0,
              const Cutoff& cut) {
    const double half = beta * beta * eta / 2.0;
    const double c1 =
        cut.sup_phi_one_minus_s() * theta0 / std::sqrt(R) * (beta * beta * theta0 + 2.0 * alpha * beta);
    const double c2 = 2.0 * beta * Cutoff::sup_d1 / (std::sqrt(R) * theta0) +
                      cut.sup_d2() / (R * theta0 * theta0);
    return c1 <= half && c2 <= half;
}

struct PsiGridMargins {
    double field = 0, road = 0, exchange = 0, psi_lower = 0, psi_upper = 0, psi_boundary = 0;
};

PsiGridMargins psi_grid_margins(const Psi& psi, double c, double gamma,
                                const ModelParams& p, int nr, int ntheta) {
    PsiGridMargins m;
    m.field = m.road = m.exchange = m.psi_lower = m.psi_upper = std::numeric_limits<double>::infinity();
    double bdev = 0.0;
    const double R = psi.R, th0 = psi.theta0;
    for (int i = 0; i < nr; ++i) {
        const double r = R + 9.0 * R * i / (nr - 1);
        for (int j = 0; j < ntheta; ++j) {
            const double th = -th0 + 2.0 * th0 * j / (ntheta - 1);
            const double v = psi.value(r, th);
            m.field = std::min(m.field, psi.alpha * c - p.d * psi.tilde_delta(r, th) / v - p.fprime0);
            m.psi_lower = std::min(m.psi_lower, v - psi.eta / (1.0 + psi.eta));
            m.psi_upper = std::min(m.psi_upper, 1.0 - v);
        }
        for (double th : {th0, -th0}) {
            const double v = psi.value(r, th);
            bdev = std::max(bdev, std::fabs(v - 1.0));
            m.road = std::min(m.road, psi.alpha * c - p.D * psi.alpha * psi.alpha -
                                          p.nu * gamma * v + p.mu);
            const double outward = th > 0 ? psi.dtheta(r, th) : -psi.dtheta(r, th);
            m.exchange = std::min(m.exchange, p.d * gamma * outward / r - p.mu + p.nu * gamma * v);
        }
    }
    m.psi_boundary = 1e-12 - bdev;
    return m;
}

}  // namespace

SupersolutionCertificate conical_supersolution(double c, double theta0, const ModelParams& p,
                                               int nr, int ntheta) {
    if (!(theta0 > 0.0) || !(theta0 <= M_PI))
        throw std::invalid_argument("conical_supersolution: theta0 must lie in (0, pi]");
    SupersolutionCertificate cert;
    cert.kind = SupersolutionCertificate::Kind::conical;
    cert.c = c;
    if (p.D <= 2.0 * p.d) {
        cert.reason = "conical supersolutions target D > 2d";
        return cert;
    }
    auto ew = pick_eta(c, p);
    if (!ew) {
        cert.reason = "no perturbed witness";
        return cert;
    }
    cert.eta = ew->first;
    cert.alpha = ew->second.alpha;
    cert.beta = ew->second.beta;
    cert.gamma = ew->second.gamma;

    Cutoff cut;
    double R = 16.0;
    while (!psi_R_ok(R, cert.alpha, cert.beta, cert.eta, theta0, cut)) {
        R *= 2.0;
        if (R > double(1 << 20)) {
            cert.reason = "R-selection conditions unmet at 2^20";
            return cert;
        }
    }
    cert.R = R;
    Psi psi = build_psi(cert.alpha, cert.beta, cert.eta, R, theta0, cut);
    auto g = psi_grid_margins(psi, c, cert.gamma, p, nr, ntheta);
    cert.margins = {{"field", g.field},         {"road", g.road},
                    {"exchange", g.exchange},   {"psi_lower", g.psi_lower},
                    {"psi_upper", g.psi_upper}, {"psi_boundary", g.psi_boundary}};
    cert.valid = all_nonnegative(cert.margins);
    if (!cert.valid) cert.reason = "negative margin";
    return cert;
}

namespace {

struct BoundaryDeviations {
    double psi = 0, dr = 0, dtheta = 0, road = 0, flux = 0;
    double max() const { return std::max({psi, dr, dtheta, road, flux}); }
};

struct BoundaryMargins {
    double road = std::numeric_limits<double>::infinity();
    double flux = std::numeric_limits<double>::infinity();
};

// Evaluates the boundary-trace quantities on |x| in [R, 100R].
void boundary_scan(const Psi& psi, const Geometry& g, const ModelParams& p, double c,
                   double gamma, double R, int nx, BoundaryDeviations* dev,
                   BoundaryMargins* mar) {
    const double b_over = psi.beta / (1.0 + psi.eta);
    for (int i = 0; i < nx; ++i) {
        const double ax = R * std::pow(100.0, double(i) / (nx - 1));
        for (double x : {ax, -ax}) {
            const double rho = g.rho(x), rp = g.drho(x), rpp = g.ddrho(x);
            const double rt = std::hypot(x, rho);
            const double tt = std::atan2(x, rho);
            const double tau = std::sqrt(1.0 + rp * rp);
            const double v = psi.value(rt, tt);
            const double pr = psi.dr(rt, tt);
            const double pth = psi.dtheta(rt, tt);
            // road operator correction G = alpha^2 (r~'/tau)^2 - (alpha/tau)(r~'/tau)'
            const double rp_t = (x + rho * rp) / rt;
            const double rp_t_d = (1.0 + rp * rp + rho * rpp - rp_t * rp_t) / rt;
            const double tau_d = rp * rpp / tau;
            const double q_d = (rp_t_d * tau - rp_t * tau_d) / (tau * tau);
            const double G = psi.alpha * psi.alpha * (rp_t / tau) * (rp_t / tau) -
                             psi.alpha / tau * q_d;
            // conormal flux expression of the third condition
            const double flux = 1.0 / (tau * rt) *
                                ((pr - psi.alpha * v) * (x * rp - rho) + pth / rt * (rho * rp + x));
            if (dev) {
                dev->psi = std::max(dev->psi, std::fabs(v - 1.0));
                dev->dr = std::max(dev->dr, std::fabs(pr));
                const double sg = tt >= 0.0 ? 1.0 : -1.0;
                dev->dtheta = std::max(dev->dtheta, std::fabs(pth / rt - sg * b_over));
                dev->road = std::max(dev->road, std::fabs(G - psi.alpha * psi.alpha));
                dev->flux = std::max(dev->flux, std::fabs(flux - b_over));
            }
            if (mar) {
                mar->road = std::min(mar->road,
                                     psi.alpha * c - p.D * G - p.nu * gamma * v + p.mu);
                mar->flux = std::min(mar->flux, p.d * gamma * flux - p.mu + p.nu * gamma * v);
            }
        }
    }
}

}  // namespace

SupersolutionCertificate asymptotic_supersolution(double c, const Geometry& g,
                                                  const ModelParams& p, int nr, int ntheta,
                                                  int nx) {
    SupersolutionCertificate cert;
    cert.kind = SupersolutionCertificate::Kind::asymptotic;
    cert.c = c;
    if (p.D <= 2.0 * p.d) {
        cert.reason = "asymptotic supersolutions target D > 2d";
        return cert;
    }
    g.validate();
    auto ew = pick_eta(c, p);
    if (!ew) {
        cert.reason = "no perturbed witness";
        return cert;
    }
    cert.eta = ew->first;

    // Largest eps admitting an (eta, eps)-witness, then take half for margin.
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        auto w = intersection_witness(c, cert.eta, mid, p);
        if (w && w->beta > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (lo <= 0.0) {
        cert.reason = "no eps-perturbed witness";
        return cert;
    }
    cert.eps = 0.5 * lo;
    auto w = intersection_witness(c, cert.eta, cert.eps, p);
    if (!w || !(w->beta > 0.0)) {
        cert.reason = "no eps-perturbed witness";
        return cert;
    }
    cert.alpha = w->alpha;
    cert.beta = w->beta;
    cert.gamma = w->gamma;

    Cutoff cut;
    const double theta0 = g.theta0;
    double R = 16.0;
    BoundaryDeviations dev;
    while (true) {
        if (R > double(1 << 20)) {
            cert.reason = "deviations exceed eps at R = 2^20";
            return cert;
        }
        if (!psi_R_ok(R, cert.alpha, cert.beta, cert.eta, theta0, cut)) {
            R *= 2.0;
            continue;
        }
        Psi psi = build_psi(cert.alpha, cert.beta, cert.eta, R, theta0, cut);
        dev = {};
        boundary_scan(psi, g, p, c, cert.gamma, R, nx, &dev, nullptr);
        if (dev.max() <= cert.eps) break;
        R *= 2.0;
    }
    cert.R = R;

    Psi psi = build_psi(cert.alpha, cert.beta, cert.eta, R, theta0, cut);
    BoundaryMargins bm;
    boundary_scan(psi, g, p, c, cert.gamma, R, nx, nullptr, &bm);
    auto gm = psi_grid_margins(psi, c, cert.gamma, p, nr, ntheta);
    cert.margins = {{"field", gm.field},
                    {"road", bm.road},
                    {"flux", bm.flux},
                    {"psi_lower", gm.psi_lower},
                    {"psi_upper", gm.psi_upper},
                    {"psi_boundary", gm.psi_boundary},
                    {"dev_psi", cert.eps - dev.psi},
                    {"dev_dr", cert.eps - dev.dr},
                    {"dev_dtheta", cert.eps - dev.dtheta},
                    {"dev_road", cert.eps - dev.road},
                    {"dev_flux", cert.eps - dev.flux}};
    cert.valid = all_nonnegative(cert.margins);
    if (!cert.valid) cert.reason = "negative margin";
    return cert;
}

double Hump::value(double y) const {
    if (y <= 0.0 || y >= M) return 0.0;
    return base * (1.0 - std::cos(omega * y)) + slope0 / omega * std::sin(omega * y);
}

double Hump::d1(double y) const {
    if (y <= 0.0 || y >= M) return 0.0;
    return base * omega * std::sin(omega * y) + slope0 * std::cos(omega * y);
}

double Hump::d2(double y) const {
    if (y <= 0.0 || y >= M) return 0.0;
    return base * omega * omega * std::cos(omega * y) - slope0 * omega * std::sin(omega * y);
}

Hump build_hump(const ModelParams& p, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("build_hump: kappa must be positive");
    Hump h;
    h.kappa = kappa;
    h.omega = std::sqrt(p.fprime0 / p.d);
    h.slope0 = (2.0 * p.mu + 1.0) / p.d;
    h.base = (1.0 + kappa) / p.fprime0;

    // first positive zero past pi/omega
    auto raw = [&h](double y) {
        return h.base * (1.0 - std::cos(h.omega * y)) + h.slope0 / h.omega * std::sin(h.omega * y);
    };
    double lo = M_PI / h.omega, hi = 2.0 * M_PI / h.omega;
    // raw(lo) = 2 base > 0; bracket the sign change by stepping toward hi
    double step_hi = hi;
    const int n = 4096;
    for (int i = 1; i <= n; ++i) {
        const double y = lo + (hi - lo) * i / n;
        if (raw(y) <= 0.0) {
            step_hi = y;
            break;
        }
        lo = y;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + step_hi);
        if (raw(mid) > 0.0)
            lo = mid;
        else
            step_hi = mid;
    }
    h.M = 0.5 * (lo + step_hi);

    double mx = 0.0;
    for (int i = 0; i <= 4096; ++i) mx = std::max(mx, raw(h.M * i / 4096.0));
    h.max_value = mx;
    return h;
}

namespace {

// Complex traveling profiles and their analytic partials. gamma2 is always
// -gamma1 e^{-2 beta L}; the factored form keeps V(., L) = 0 exact.
struct StripProfile {
    std::complex<double> alpha, beta, g1;
    double L;

    std::complex<double> e(double xi) const { return std::exp(-alpha * xi); }
    std::complex<double> gam(double y) const {
        return g1 * (std::exp(-beta * y) - std::exp(-beta * (2.0 * L - y)));
    }
    std::complex<double> gamp(double y) const {
        return -g1 * beta * (std::exp(-beta * y) + std::exp(-beta * (2.0 * L - y)));
    }

    double U(double xi) const { return std::real(e(xi)); }
    double Ux(double xi) const { return std::real(-alpha * e(xi)); }
    double Uxx(double xi) const { return std::real(alpha * alpha * e(xi)); }
    double V(double xi, double y) const { return std::real(gam(y) * e(xi)); }
    double Vx(double xi, double y) const { return std::real(-alpha * gam(y) * e(xi)); }
    double Vy(double xi, double y) const { return std::real(gamp(y) * e(xi)); }
    double Vxy(double xi, double y) const { return std::real(-alpha * gamp(y) * e(xi)); }
    double Vyy(double xi, double y) const {
        return std::real(beta * beta * gam(y) * e(xi));
    }
};

StripProfile profile_of(const ComplexDispersion& d) {
    return StripProfile{d.alpha, d.beta, d.gamma1, d.L};
}

struct Components {
    std::vector<std::uint8_t> field;  // selected field component
    std::vector<std::uint8_t> road;   // selected road interval
    bool ok = false;
    std::string description;
};

// Flood-fill the positivity set of v_lambda on the window grid; a component is
// complete when it touches neither xi-edge. Picks the rightmost complete one
// (largest max-xi, tie-break largest min-xi), then the rightmost complete
// road interval of u_lambda overlapping its foot.
Components select_components(const StripProfile& pr, const Hump& hump, double lambda,
                             int nxi, int ny, double W, double L) {
    Components out;
    std::vector<std::int32_t> label(size_t(nxi) * ny, -1);
    std::vector<double> vload(size_t(nxi) * ny);
    auto xi_of = [&](int i) { return -W + 2.0 * W * i / (nxi - 1); };
    auto y_of = [&](int j) { return L * j / (ny - 1); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nxi; ++i)
            vload[size_t(j) * nxi + i] = pr.V(xi_of(i), y_of(j)) + lambda * hump.value(y_of(j));

    struct Comp {
        int imin = 1 << 30, imax = -1;
        bool complete = true;
        std::vector<int> cells;
    };
    std::vector<Comp> comps;
    for (int j0 = 0; j0 < ny; ++j0) {
        for (int i0 = 0; i0 < nxi; ++i0) {
            const size_t idx0 = size_t(j0) * nxi + i0;
            if (label[idx0] >= 0 || !(vload[idx0] > 0.0)) continue;
            const int id = int(comps.size());
            comps.emplace_back();
            Comp& c = comps.back();
            std::deque<std::pair<int, int>> q{{i0, j0}};
            label[idx0] = id;
            while (!q.empty()) {
                auto [i, j] = q.front();
                q.pop_front();
                c.cells.push_back(j * nxi + i);
                c.imin = std::min(c.imin, i);
                c.imax = std::max(c.imax, i);
                if (i == 0 || i == nxi - 1) c.complete = false;
                const int di[] = {1, -1, 0, 0}, dj[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int ii = i + di[k], jj = j + dj[k];
                    if (ii < 0 || ii >= nxi || jj < 0 || jj >= ny) continue;
                    const size_t idx = size_t(jj) * nxi + ii;
                    if (label[idx] < 0 && vload[idx] > 0.0) {
                        label[idx] = id;
                        q.push_back({ii, jj});
                    }
                }
            }
        }
    }
    int best = -1;
    for (int k = 0; k < int(comps.size()); ++k) {
        if (!comps[k].complete) continue;
        if (best < 0 || comps[k].imax > comps[best].imax ||
            (comps[k].imax == comps[best].imax && comps[k].imin > comps[best].imin))
            best = k;
    }
    if (best < 0) return out;

    out.field.assign(size_t(nxi) * ny, 0);
    for (int idx : comps[best].cells) out.field[idx] = 1;

    // road intervals of u_lambda > 0
    std::vector<std::uint8_t> upos(nxi);
    for (int i = 0; i < nxi; ++i) upos[i] = pr.U(xi_of(i)) - lambda > 0.0 ? 1 : 0;
    struct Iv {
        int lo, hi;
        bool complete;
    };
    std::vector<Iv> ivs;
    for (int i = 0; i < nxi;) {
        if (!upos[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j < nxi && upos[j]) ++j;
        ivs.push_back({i, j - 1, i > 0 && j < nxi});
        i = j;
    }
    auto overlaps_foot = [&](const Iv& iv) {
        for (int i = iv.lo; i <= iv.hi; ++i)
            if (out.field[i]) return true;  // j = 0 row
        return false;
    };
    int bi = -1;
    for (int k = 0; k < int(ivs.size()); ++k) {
        if (!ivs[k].complete) continue;
        if (!overlaps_foot(ivs[k])) continue;
        if (bi < 0 || ivs[k].hi > ivs[bi].hi) bi = k;
    }
    if (bi < 0) {  // fall back to the rightmost complete interval
        for (int k = 0; k < int(ivs.size()); ++k)
            if (ivs[k].complete && (bi < 0 || ivs[k].hi > ivs[bi].hi)) bi = k;
    }
    if (bi < 0) return out;
    out.road.assign(nxi, 0);
    for (int i = ivs[bi].lo; i <= ivs[bi].hi; ++i) out.road[i] = 1;

    out.ok = true;
    out.description = "field xi-span [" + std::to_string(xi_of(comps[best].imin)) + ", " +
                      std::to_string(xi_of(comps[best].imax)) + "], road xi-span [" +
                      std::to_string(xi_of(ivs[bi].lo)) + ", " + std::to_string(xi_of(ivs[bi].hi)) +
                      "]";
    return out;
}

}  // namespace

double SubsolutionCertificate::U(double xi) const {
    return profile_of(disp).U(xi) - lambda;
}

double SubsolutionCertificate::V(double xi, double y) const {
    return profile_of(disp).V(xi, y) + lambda * hump.value(y);
}

SubsolutionCertificate build_subsolution(double c, double L, const ModelParams& p,
                                         const Geometry& g) {
    (void)g;  // the moving pair lives in strip coordinates; geometry enters at verify time
    SubsolutionCertificate cert;
    cert.c = c;
    cert.L = L;
    cert.hump = build_hump(p);
    if (!(L > cert.hump.M))
        throw std::invalid_argument("build_subsolution: L must exceed the hump support");

    auto roots = solve_complex(c, L, p);
    if (roots.empty())
        throw std::runtime_error("build_subsolution: no strip root at this speed");
    cert.disp = roots.front();
    cert.W = 2.0 * M_PI / std::fabs(cert.disp.alpha.imag()) * 1.1;  // one period plus margin

    const StripProfile pr = profile_of(cert.disp);
    const int nxi = 2048, ny = 257;
    double lambda = 0.1 * cert.hump.max_value;
    Components comps;
    for (int k = 0; k < 60; ++k) {
        comps = select_components(pr, cert.hump, lambda, nxi, ny, cert.W, L);
        if (comps.ok) break;
        lambda *= 0.5;
    }
    if (!comps.ok)
        throw std::runtime_error("build_subsolution: no bounded positivity component in 60 halvings");
    cert.lambda = lambda;
    cert.region.nxi = nxi;
    cert.region.ny = ny;
    cert.region.xi_min = -cert.W;
    cert.region.xi_max = cert.W;
    cert.region.y_max = L;
    cert.region.field_mask = std::move(comps.field);
    cert.region.road_mask = std::move(comps.road);
    cert.region.description = comps.description;
    return cert;
}

std::array<double, 3> perturbation_sups(const SubsolutionCertificate& cert, const Geometry& g,
                                        const ModelParams& p, double Lambda) {
    // Exactly conical fields reduce to the flat-road case by the rotation of
    // the right branch; the perturbation operators coincide identically.
    if (g.kind == Geometry::Kind::exact_cone && g.a != 0.0) return {0.0, 0.0, 0.0};

    const StripProfile pr = profile_of(cert.disp);
    const auto& rg = cert.region;
    const double shift = Lambda + cert.W;  // window left edge at x = Lambda
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    for (int i = 0; i < rg.nxi; ++i) {
        if (!rg.road_mask.empty() && rg.road_mask[i]) {
            const double xi = rg.xi(i);
            const double x = xi + shift;
            const double rp = g.drho(x), rpp = g.ddrho(x);
            const double rp2 = rp * rp;
            const double tau = std::sqrt(1.0 + rp2);
            // cancellation-free: 1/tau^2 - 1 = -rp^2/(1+rp^2), tau - 1 = rp^2/(1+tau)
            const double inv_tau2_m1 = -rp2 / (1.0 + rp2);
            const double tau_m1 = rp2 / (1.0 + tau);
            const double taud = rp * rpp / tau;
            const double d1 = -p.D * (inv_tau2_m1 * pr.Uxx(xi) -
                                      taud / (tau * tau * tau) * pr.Ux(xi));
            e1 = std::max(e1, std::fabs(d1));
            const double d3 = p.d * (rp / tau) * pr.Vx(xi, 0.0) - p.d * tau_m1 * pr.Vy(xi, 0.0);
            e3 = std::max(e3, std::fabs(d3));
        }
    }
    for (int j = 0; j < rg.ny; ++j) {
        const double y = rg.y(j);
        for (int i = 0; i < rg.nxi; ++i) {
            if (!rg.field_mask[size_t(j) * rg.nxi + i]) continue;
            const double xi = rg.xi(i);
            const double x = xi + shift;
            const double rp = g.drho(x), rpp = g.ddrho(x);
            const double d2 = p.d * (rpp * pr.Vy(xi, y) + 2.0 * rp * pr.Vxy(xi, y) -
                                     rp * rp * pr.Vyy(xi, y));
            e2 = std::max(e2, std::fabs(d2));
        }
    }
    return {e1, e2, e3};
}

SubsolutionCertificate verify_subsolution(SubsolutionCertificate cert, const Geometry& g,
                                          const ModelParams& p, double lambda_init) {
    if (g.a != 0.0 && g.kind != Geometry::Kind::exact_cone)
        throw std::invalid_argument(
            "verify_subsolution: needs a = 0 (or an exact cone via the rotation reduction)");
    const double lam = cert.lambda;
    const double phi_p0 = cert.hump.slope0;

    // Penalized hump inequality d phi'' + (f'(0)-delta) phi >= 1 on the support.
    double hump_margin = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 4096; ++i) {
        const double y = cert.hump.M * i / 4096.0;
        hump_margin = std::min(hump_margin, p.d * cert.hump.d2(y) +
                                                (p.fprime0 - p.delta) * cert.hump.value(y) - 1.0);
    }

    double Lambda = lambda_init;
    std::array<double, 3> eps{};
    bool ok = false;
    while (Lambda <= double(1 << 20)) {
        eps = perturbation_sups(cert, g, p, Lambda);
        // tau >= 1 and tau -> 1 as x grows; its infimum over the window is at
        // hand for the boundary threshold.
        double tau_min = std::numeric_limits<double>::infinity();
        for (int i = 0; i < cert.region.nxi; ++i)
            if (cert.region.road_mask[i]) {
                const double x = cert.region.xi(i) + Lambda + cert.W;
                const double rp = g.kind == Geometry::Kind::exact_cone && g.a != 0.0
                                      ? 0.0
                                      : g.drho(x);
                tau_min = std::min(tau_min, std::sqrt(1.0 + rp * rp));
            }
        const double rhs3 = -p.mu * lam + p.d * lam * tau_min * phi_p0;
        if (eps[0] <= p.mu * lam && eps[1] <= lam && eps[2] <= rhs3) {
            cert.Lambda = Lambda;
            cert.residuals = {{"eps1", eps[0]},
                              {"eps2", eps[1]},
                              {"eps3", eps[2]},
                              {"road_margin", p.mu * lam - eps[0]},
                              {"field_margin", lam - eps[1]},
                              {"boundary_margin", rhs3 - eps[2]},
                              {"hump_penalized", hump_margin}};
            ok = hump_margin >= 0.0;
            break;
        }
        Lambda *= 2.0;
    }
    if (!ok && cert.residuals.empty()) {
        cert.Lambda = double(1 << 20);
        cert.residuals = {{"eps1", eps[0]}, {"eps2", eps[1]}, {"eps3", eps[2]},
                          {"road_margin", p.mu * lam - eps[0]},
                          {"field_margin", lam - eps[1]},
                          {"hump_penalized", hump_margin}};
        cert.reason = "perturbation sups exceed lambda thresholds at Lambda = 2^20";
    }
    cert.valid = ok;
    if (!ok && cert.reason.empty()) cert.reason = "hump penalized inequality violated";
    return cert;
}

}  // namespace fieldroad
