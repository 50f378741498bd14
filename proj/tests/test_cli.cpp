#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fieldroad/cli.hpp"
#include "fieldroad/config.hpp"

using namespace fieldroad;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const fs::path dir = fs::temp_directory_path() / "fieldroad_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

}  // namespace

TEST_CASE("parse_config: minimal file gets defaults elsewhere") {
    auto cfg = parse_config_text(
        "d = 1\nD = 4\nmu = 1\nnu = 1\nreaction = logistic\ngeometry = hyperbola\na = 1\n");
    CHECK(cfg.d == 1.0);
    CHECK(cfg.D == 4.0);
    CHECK(cfg.geometry == "hyperbola");
    CHECK(cfg.grid.hx == 0.5);          // default
    CHECK(cfg.t_final == 80.0);         // default
    CHECK(cfg.threshold_frac == 0.5);   // default
    auto p = cfg.params();
    CHECK(p.delta == doctest::Approx(0.05));
}

TEST_CASE("parse_config: validation errors name the key") {
    CHECK_THROWS_WITH_AS(parse_config_text("d = 1\nD = -1\nmu = 1\nnu = 1\n"),
                         doctest::Contains("D"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("d = 1\nD = 1\nmu = 1\nnu = 1\nhx = abc\n"),
                         doctest::Contains("hx"), ConfigError);
}

TEST_CASE("parse_config: duplicate key cites both lines") {
    try {
        parse_config_text("d = 1\nD = 2\nd = 3\n", "cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("cfg:3") != std::string::npos);
        CHECK(msg.find("line 1") != std::string::npos);
        CHECK(msg.find("'d'") != std::string::npos);
    }
}

TEST_CASE("parse_config: unknown keys and malformed lines carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_config_text("d = 1\nwibble = 3\n", "cfg"),
                         doctest::Contains("unknown key 'wibble'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("d = 1\nnonsense line\n", "cfg"),
                         doctest::Contains("cfg:2"), ConfigError);
    // comments and blank lines are fine
    auto cfg = parse_config_text("# comment\n\nd = 2  # trailing\n");
    CHECK(cfg.d == 2.0);
}

TEST_CASE("cli: usage and config errors exit 2") {
    CHECK(cli_main({"no-such-command"}) == 2);
    CHECK(cli_main({"dispersion"}) == 2);  // --config required
    auto bad = write_temp("bad.cfg", "D = -3\n");
    CHECK(cli_main({"dispersion", "--config", bad.string()}) == 2);
}

TEST_CASE("cli dispersion: summary speeds land in the CSV") {
    auto cfg = write_temp("disp.cfg", "d = 1\nD = 4\nmu = 1\nnu = 1\n");
    const fs::path out = fs::temp_directory_path() / "fieldroad_test" / "disp_out";
    fs::create_directories(out);
    CHECK(cli_main({"dispersion", "--config", cfg.string(), "--out", out.string()}) == 0);
    const std::string csv = slurp(out / "dispersion.csv");
    CHECK(csv.find("c,alpha,beta,gamma,eta,eps,residual") != std::string::npos);
    CHECK(csv.find("\n2,") != std::string::npos);        // the c_kpp row
    CHECK(csv.find("2.2692892") != std::string::npos);   // the c_brr regression constant
}

TEST_CASE("cli certify-super below c_brr exits 1 with no perturbed witness") {
    auto cfg = write_temp("super.cfg", "d = 1\nD = 4\nmu = 1\nnu = 1\ngeometry = cone\na = 1\n"
                                       "c_factor = 0.9\n");
    const fs::path out = fs::temp_directory_path() / "fieldroad_test" / "super_out";
    fs::create_directories(out);
    CHECK(cli_main({"certify-super", "--config", cfg.string(), "--out", out.string()}) == 1);
}

TEST_CASE("cli determinism: identical config and seed give byte-identical CSVs") {
    auto cfg = write_temp("sim.cfg",
                          "d = 1\nD = 2\nmu = 1\nnu = 1\ngeometry = cone\na = 0\n"
                          "x_min = -24\nx_max = 24\ny_max = 16\nhx = 0.5\nhy = 0.5\n"
                          "t_final = 4\nnt_report = 40\nsnapshot_every = 2\n");
    const fs::path out1 = fs::temp_directory_path() / "fieldroad_test" / "sim1";
    const fs::path out2 = fs::temp_directory_path() / "fieldroad_test" / "sim2";
    fs::create_directories(out1);
    fs::create_directories(out2);
    CHECK(cli_main({"simulate", "--config", cfg.string(), "--out", out1.string(), "--seed", "7"}) == 0);
    CHECK(cli_main({"simulate", "--config", cfg.string(), "--out", out2.string(), "--seed", "7"}) == 0);
    for (const char* f : {"diagnostics.csv", "front.csv", "road_snapshots.csv",
                          "field_snapshots.csv"}) {
        const std::string a = slurp(out1 / f), b = slurp(out2 / f);
        CHECK(a == b);
        CHECK(!a.empty());
        CHECK(a.find("# seed = 7") != std::string::npos);
    }
}

TEST_CASE("cli properties and mass-check pass on a modest grid") {
    auto cfg = write_temp("props.cfg",
                          "d = 1\nD = 2\nmu = 1\nnu = 1\ngeometry = hyperbola\na = 1\n"
                          "x_min = -24\nx_max = 24\ny_max = 16\nhx = 0.5\nhy = 0.5\n"
                          "t_final = 5\n");
    CHECK(cli_main({"properties", "--config", cfg.string()}) == 0);
    const fs::path out = fs::temp_directory_path() / "fieldroad_test" / "mass_out";
    fs::create_directories(out);
    CHECK(cli_main({"mass-check", "--config", cfg.string(), "--out", out.string()}) == 0);
}
