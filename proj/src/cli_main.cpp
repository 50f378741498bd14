#include "fieldroad/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "fieldroad/analysis.hpp"
#include "fieldroad/certificates.hpp"
#include "fieldroad/config.hpp"
#include "fieldroad/dispersion.hpp"
#include "fieldroad/solver.hpp"

namespace fieldroad {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class OutFile {
public:
    OutFile(const std::filesystem::path& path, const RunConfig& cfg) {
        f_.open(path);
        if (!f_) throw ConfigError("cannot write '" + path.string() + "'");
        f_ << "# fieldroad " << kVersion << "\n";
        for (const auto& line : cfg.record()) f_ << "# " << line << "\n";
    }
    std::ofstream& stream() { return f_; }

private:
    std::ofstream f_;
};

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config key when given

    RunConfig load() const {
        auto cfg = parse_config(config_path);
        if (seed) cfg.seed = *seed;
        return cfg;
    }
};

void add_common(CLI::App* cmd, Common* c) {
    cmd->add_option("--config", c->config_path, "flat key = value config file")->required();
    cmd->add_option("--out", c->out_dir, "output directory");
    cmd->add_option("--seed", c->seed, "random seed recorded in outputs");
}

int run_dispersion(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    const double ck = c_kpp(p);
    OutFile out(std::filesystem::path(c.out_dir) / "dispersion.csv", cfg);
    out.stream() << "c,alpha,beta,gamma,eta,eps,residual\n";
    auto emit = [&out](const RealDispersion& w) {
        out.stream() << fmt(w.c) << ',' << fmt(w.alpha) << ',' << fmt(w.beta) << ','
                     << fmt(w.gamma) << ',' << fmt(w.eta) << ',' << fmt(w.eps) << ','
                     << fmt(w.residual) << "\n";
    };
    RealDispersion kpp_row;
    kpp_row.c = ck;
    emit(kpp_row);
    std::cout << "c_kpp = " << fmt(ck) << "\n";
    if (p.D <= 2.0 * p.d) {
        std::cout << "c_brr = " << fmt(ck) << " (D <= 2d: KPP regime";
        if (p.D == 2.0 * p.d) std::cout << ", boundary case D = 2d";
        std::cout << ")\n";
        RealDispersion row = kpp_row;
        emit(row);
        return 0;
    }
    const double cb = c_brr(p, cfg.tol);
    std::cout << "c_brr = " << fmt(cb) << "\n";
    auto wc = intersection_witness(cb * (1.0 + 1e-6), 0.0, 0.0, p);
    if (wc) {
        RealDispersion row = *wc;
        row.c = cb;  // witness of the near-critical system, reported at c_brr
        emit(row);
    }
    auto w = intersection_witness(cfg.c_factor * cb, 0.0, 0.0, p);
    if (w) emit(*w);
    std::cout << "wrote dispersion.csv\n";
    return 0;
}

int run_simulate(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    auto g = cfg.make_geometry();
    OutFile diag(std::filesystem::path(c.out_dir) / "diagnostics.csv", cfg);
    diag.stream() << "t,mass,min_u,min_v,max_v,steady_residual\n";
    OutFile road(std::filesystem::path(c.out_dir) / "road_snapshots.csv", cfg);
    road.stream() << "t,x,u\n";
    OutFile field(std::filesystem::path(c.out_dir) / "field_snapshots.csv", cfg);
    field.stream() << "t,x,w,v\n";
    OutFile front(std::filesystem::path(c.out_dir) / "front.csv", cfg);
    front.stream() << "t,r_right,r_left,rv_right,rv_left\n";

    const double threshold = cfg.threshold_frac * p.nu / p.mu;
    int reports = 0;
    auto on_report = [&](const FieldState& s) {
        front.stream() << fmt(s.t) << ',' << fmt(front_position(s, threshold, FrontSide::right))
                       << ',' << fmt(front_position(s, threshold, FrontSide::left)) << ','
                       << fmt(front_position_field(s, threshold, cfg.front_field_h,
                                                   FrontSide::right))
                       << ','
                       << fmt(front_position_field(s, threshold, cfg.front_field_h,
                                                   FrontSide::left))
                       << "\n";
        if (cfg.snapshot_every > 0 && reports % cfg.snapshot_every == 0) {
            for (int i = 0; i < s.grid.nx(); ++i)
                road.stream() << fmt(s.t) << ',' << fmt(s.xc[i]) << ',' << fmt(s.u[i]) << "\n";
            for (int j = 0; j < s.grid.ny(); ++j)
                for (int i = 0; i < s.grid.nx(); ++i)
                    field.stream() << fmt(s.t) << ',' << fmt(s.xc[i]) << ','
                                   << fmt((j + 0.5) * s.grid.hy) << ',' << fmt(s.at(i, j))
                                   << "\n";
        }
        ++reports;
    };
    auto res = run(g, p, cfg.grid, cfg.datum(), cfg.t_final, cfg.safety, threshold, on_report);
    for (const auto& d : res.diagnostics)
        diag.stream() << fmt(d.t) << ',' << fmt(d.mass) << ',' << fmt(d.min_u) << ','
                      << fmt(d.min_v) << ',' << fmt(d.max_v) << ',' << fmt(d.steady_residual)
                      << "\n";
    std::cout << "t = " << fmt(res.state.t) << ", mass = " << fmt(total_mass(res.state))
              << ", steady_residual = " << fmt(res.diagnostics.back().steady_residual) << "\n";
    return 0;
}

int run_speed(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    SpeedReportOptions opt;
    opt.t_final = cfg.t_final;
    opt.transient = cfg.transient;
    opt.fit_fraction = cfg.fit_fraction;
    opt.threshold_frac = cfg.threshold_frac;
    opt.safety = cfg.safety;
    auto rows = speed_report(p, {cfg.make_geometry()}, cfg.grid, opt);
    OutFile out(std::filesystem::path(c.out_dir) / "speed_report.csv", cfg);
    out.stream() << "geometry,a,theta0,side,speed,stderr,c_kpp,c_brr,ratio\n";
    for (const auto& r : rows) {
        out.stream() << r.geometry << ',' << fmt(r.a) << ',' << fmt(r.theta0) << ',' << r.side
                     << ',' << fmt(r.speed) << ',' << fmt(r.stderr_) << ',' << fmt(r.c_kpp)
                     << ',' << fmt(r.c_brr) << ',' << fmt(r.ratio) << "\n";
        std::cout << r.geometry << " " << r.side << ": speed = " << fmt(r.speed)
                  << " (c_brr = " << fmt(r.c_brr) << ", ratio = " << fmt(r.ratio) << ")\n";
    }
    return 0;
}

void write_margins(const std::filesystem::path& path, const RunConfig& cfg,
                   const std::vector<Margin>& margins) {
    OutFile out(path, cfg);
    out.stream() << "name,value\n";
    for (const auto& m : margins) out.stream() << m.name << ',' << fmt(m.value) << "\n";
}

void write_report(const std::filesystem::path& path, const RunConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
    OutFile out(path, cfg);
    for (const auto& [k, v] : fields) out.stream() << k << ": " << v << "\n";
}

int run_certify_super(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    auto g = cfg.make_geometry();
    SupersolutionCertificate cert;
    if (p.D <= 2.0 * p.d) {
        cert = radial_supersolution(std::max(cfg.c_factor, 1.0) * c_kpp(p), p);
    } else {
        const double cb = c_brr(p, cfg.tol);
        const double cc = cfg.c_factor * cb;
        if (g.kind == Geometry::Kind::exact_cone)
            cert = conical_supersolution(cc, g.theta0, p);
        else
            cert = asymptotic_supersolution(cc, g, p);
    }
    const char* kind = cert.kind == SupersolutionCertificate::Kind::radial     ? "radial"
                       : cert.kind == SupersolutionCertificate::Kind::conical ? "conical"
                                                                               : "asymptotic";
    std::cout << "kind: " << kind << "\n";
    std::cout << "valid: " << (cert.valid ? "yes" : "no") << "\n";
    if (!cert.valid) std::cout << "reason: " << cert.reason << "\n";
    std::cout << "c: " << fmt(cert.c) << "\nalpha: " << fmt(cert.alpha)
              << "\nbeta: " << fmt(cert.beta) << "\ngamma: " << fmt(cert.gamma)
              << "\neta: " << fmt(cert.eta) << "\neps: " << fmt(cert.eps)
              << "\nR: " << fmt(cert.R) << "\n";
    for (const auto& m : cert.margins) std::cout << "margin " << m.name << ": " << fmt(m.value) << "\n";
    write_margins(std::filesystem::path(c.out_dir) / "supersolution_margins.csv", cfg,
                  cert.margins);
    std::vector<std::pair<std::string, std::string>> rep = {
        {"kind", kind},
        {"valid", cert.valid ? "yes" : "no"},
        {"c", fmt(cert.c)},
        {"alpha", fmt(cert.alpha)},
        {"beta", fmt(cert.beta)},
        {"gamma", fmt(cert.gamma)},
        {"eta", fmt(cert.eta)},
        {"eps", fmt(cert.eps)},
        {"R", fmt(cert.R)},
        {"worst_margin", fmt(cert.worst_margin())}};
    if (!cert.valid) rep.emplace_back("reason", cert.reason);
    write_report(std::filesystem::path(c.out_dir) / "supersolution_report.txt", cfg, rep);
    return cert.valid ? 0 : 1;
}

int run_certify_sub(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    auto g = cfg.make_geometry();
    const double cl = c_L(cfg.L, p, cfg.tol);
    const double cc = std::min(cfg.c_factor, 1.0) * cl;
    std::cout << "c_L(" << fmt(cfg.L) << ") = " << fmt(cl) << ", c = " << fmt(cc) << "\n";
    SubsolutionCertificate cert;
    try {
        cert = build_subsolution(cc, cfg.L, p, g);
    } catch (const std::runtime_error& e) {
        std::cout << "build failed: " << e.what() << "\n";
        return 1;
    }
    cert = verify_subsolution(cert, g, p);
    std::cout << "valid: " << (cert.valid ? "yes" : "no") << "\n";
    if (!cert.valid) std::cout << "reason: " << cert.reason << "\n";
    std::cout << "lambda: " << fmt(cert.lambda) << "\nW: " << fmt(cert.W)
              << "\nLambda: " << fmt(cert.Lambda) << "\nregion: " << cert.region.description
              << "\n";
    for (const auto& m : cert.residuals)
        std::cout << "residual " << m.name << ": " << fmt(m.value) << "\n";
    write_margins(std::filesystem::path(c.out_dir) / "subsolution_margins.csv", cfg,
                  cert.residuals);
    std::vector<std::pair<std::string, std::string>> rep = {
        {"valid", cert.valid ? "yes" : "no"},
        {"c", fmt(cert.c)},
        {"L", fmt(cert.L)},
        {"c_L", fmt(cl)},
        {"lambda", fmt(cert.lambda)},
        {"W", fmt(cert.W)},
        {"Lambda", fmt(cert.Lambda)},
        {"region", cert.region.description}};
    if (!cert.valid) rep.emplace_back("reason", cert.reason);
    write_report(std::filesystem::path(c.out_dir) / "subsolution_report.txt", cfg, rep);
    return cert.valid ? 0 : 1;
}

int run_mass_check(const Common& c) {
    auto cfg = c.load();
    cfg.grid.outer_bc = OuterBC::reflecting;
    auto p = without_reaction(cfg.params());
    auto g = cfg.make_geometry();
    auto res = run(g, p, cfg.grid, cfg.datum(), cfg.t_final, cfg.safety);
    const double m0 = res.diagnostics.front().mass;
    double worst = 0.0;
    for (const auto& d : res.diagnostics)
        worst = std::max(worst, std::fabs(d.mass - m0) / m0);
    OutFile out(std::filesystem::path(c.out_dir) / "mass_check.csv", cfg);
    out.stream() << "t,mass,relative_drift\n";
    for (const auto& d : res.diagnostics)
        out.stream() << fmt(d.t) << ',' << fmt(d.mass) << ',' << fmt((d.mass - m0) / m0) << "\n";
    std::cout << "relative mass drift over [0, " << fmt(cfg.t_final) << "]: " << fmt(worst)
              << "\n";
    const bool ok = worst <= 1e-6;
    std::cout << (ok ? "PASS" : "FAIL") << " mass conservation (<= 1e-6)\n";
    return ok ? 0 : 1;
}

int run_properties(const Common& c) {
    auto cfg = c.load();
    auto p = cfg.params();
    int passed = 0, failed = 0;
    auto record = [&](const char* name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        (ok ? passed : failed)++;
    };

    // steady state (nu/mu, 1) is an exact discrete equilibrium
    for (auto g : {exact_cone(0.0), exact_cone(1.0), hyperbola(1.0)}) {
        GridSpec grid = cfg.grid;
        grid.outer_bc = OuterBC::reflecting;
        InitialDatum datum;
        datum.compact = false;
        datum.u0 = [&p](double) { return p.nu / p.mu; };
        datum.v0 = [](double, double) { return 1.0; };
        auto s = discretize(g, p, grid, datum);
        auto s2 = step(s, cfl_dt(s, p, 0.4), p);
        double res = 0.0;
        for (int i = 0; i < grid.nx(); ++i) res = std::max(res, std::fabs(s2.u[i] - p.nu / p.mu));
        for (size_t i = 0; i < s2.v.size(); ++i) res = std::max(res, std::fabs(s2.v[i] - 1.0));
        record(("steady state residual <= 1e-13 (" + g.name + ", a=" + fmt(g.a) + ")").c_str(),
               res <= 1e-13);
    }

    // conservation with f = 0
    {
        auto p0 = without_reaction(p);
        GridSpec grid = cfg.grid;
        grid.outer_bc = OuterBC::reflecting;
        auto g = cfg.make_geometry();
        auto s = discretize(g, p0, grid, cfg.datum());
        const double dt = cfl_dt(s, p0, cfg.safety);
        const double m0 = total_mass(s);
        FieldState s2 = s;
        bool ok = true;
        for (int n = 0; n < 10000; ++n) {
            step_into(s, s2, dt, p0);
            std::swap(s, s2);
        }
        ok = std::fabs(total_mass(s) - m0) / m0 <= 1e-6;
        record("mass drift <= 1e-6 over 1e4 steps (f = 0, reflecting)", ok);
    }

    // comparison principle on random ordered smooth pairs
    {
        std::mt19937_64 rng(cfg.seed == 0 ? 12345 : cfg.seed);
        auto g = cfg.make_geometry();
        GridSpec grid = cfg.grid;
        bool all_ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::uniform_real_distribution<double> amp(0.05, 0.4), width(2.0, 8.0),
                pos(grid.x_min * 0.5, grid.x_max * 0.5);
            auto mk = [&](double extra) {
                const double a1 = amp(rng), w1 = width(rng), x1 = pos(rng);
                const double a2 = amp(rng), w2 = width(rng), x2 = pos(rng);
                InitialDatum d;
                d.compact = false;
                d.u0 = [=](double x) {
                    return extra + a1 * std::exp(-(x - x1) * (x - x1) / (w1 * w1));
                };
                d.v0 = [=, &g](double x, double y) {
                    const double w = y - g.rho(x);
                    return extra + a2 * std::exp(-((x - x2) * (x - x2) + w * w) / (w2 * w2));
                };
                return d;
            };
            auto lo = discretize(g, p, grid, mk(0.0));
            // hi adds an independent positive bump on top of lo
            auto hi = discretize(g, p, grid, mk(0.05));
            for (size_t i = 0; i < hi.u.size(); ++i) hi.u[i] += lo.u[i];
            for (size_t i = 0; i < hi.v.size(); ++i) hi.v[i] += lo.v[i];
            if (!ordering_preserved(lo, hi, p, 1000)) all_ok = false;
        }
        record("ordering preserved in 20 random comparison trials", all_ok);
    }

    std::cout << passed << " passed, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"field-road spreading-speed toolkit"};
    app.require_subcommand(1);
    Common common;

    auto* sp_dispersion = app.add_subcommand("dispersion", "critical speeds and witnesses");
    auto* sp_simulate = app.add_subcommand("simulate", "time integration with diagnostics");
    auto* sp_speed = app.add_subcommand("speed", "front tracking and fitted speeds");
    auto* sp_super = app.add_subcommand("certify-super", "supersolution certificate");
    auto* sp_sub = app.add_subcommand("certify-sub", "subsolution certificate");
    auto* sp_mass = app.add_subcommand("mass-check", "f = 0 conservation check");
    auto* sp_props = app.add_subcommand("properties", "solver property suites");
    for (auto* sp : {sp_dispersion, sp_simulate, sp_speed, sp_super, sp_sub, sp_mass, sp_props})
        add_common(sp, &common);

    std::vector<const char*> argv;
    argv.push_back("fieldroad");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sp_dispersion->parsed()) return run_dispersion(common);
        if (sp_simulate->parsed()) return run_simulate(common);
        if (sp_speed->parsed()) return run_speed(common);
        if (sp_super->parsed()) return run_certify_super(common);
        if (sp_sub->parsed()) return run_certify_sub(common);
        if (sp_mass->parsed()) return run_mass_check(common);
        if (sp_props->parsed()) return run_properties(common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args);
}

}  // namespace fieldroad
