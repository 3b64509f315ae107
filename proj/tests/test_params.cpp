#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lasernoise/params.hpp"

using namespace lasernoise;

TEST_CASE("derived rates at the reference configuration")
{
    const ModelParams p = reference_params(1.01);
    const DerivedRates d = derive_rates(p);

    CHECK(d.d == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(d.c_a == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(d.c_b == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(d.zeta_ab == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d.zeta_ba == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(d.kprime_a == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.kprime_b == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p.R_a == doctest::Approx(1.01 * 5e5).epsilon(1e-12));
    CHECK(d.R_b == doctest::Approx(p.R_a).epsilon(1e-14)); // xi_a == xi_b
    CHECK(d.R_3 == doctest::Approx(std::sqrt(0.8) * p.R_a).epsilon(1e-14));
    CHECK(d.R_1 == doctest::Approx(p.R_a - d.R_3).epsilon(1e-12));
    CHECK(d.R_2 == doctest::Approx(d.R_b - d.R_3).epsilon(1e-12));
    CHECK(d.R_total ==
          doctest::Approx(d.R_1 + d.R_2 + d.R_3).epsilon(1e-14));
    CHECK(d.r_a == doctest::Approx(2.0 * 0.01 * p.R_a / 1e3).epsilon(1e-14));
}

TEST_CASE("derived rates of an asymmetric configuration")
{
    ModelParams p = reference_params(1.01);
    p.xi_a = 0.5;
    p.xi_b = 0.9;
    p.g_b = 0.12;
    const DerivedRates d = derive_rates(p);
    CHECK(d.R_b == doctest::Approx(std::sqrt(0.5 / 0.9) * p.R_a).epsilon(1e-14));
    CHECK(d.R_3 == doctest::Approx(std::sqrt(0.5) * p.R_a).epsilon(1e-14));
    CHECK(d.zeta_ab ==
          doctest::Approx(0.5 * 0.0144 / 0.01).epsilon(1e-14));
    CHECK(d.zeta_ba ==
          doctest::Approx(0.9 * 0.01 / 0.0144).epsilon(1e-14));
}

TEST_CASE("detuning enters the effective decay rate")
{
    ModelParams p = reference_params(1.01);
    p.nu = 100.0;
    const DerivedRates d = derive_rates(p);
    CHECK(d.d == doctest::Approx(10.0 * (1.0 + 0.01)).epsilon(1e-14));
}

TEST_CASE("hard parameter invariants are rejected")
{
    auto expect_reject = [](auto&& mutate) {
        ModelParams p = reference_params(1.01);
        mutate(p);
        CHECK_THROWS_AS(derive_rates(p), ConfigError);
    };
    expect_reject([](ModelParams& p) { p.kappa_a = 0.0; });
    expect_reject([](ModelParams& p) { p.kappa_a = -1.0; });
    expect_reject([](ModelParams& p) { p.kappa_ap = 1.0; });   // == kappa_a
    expect_reject([](ModelParams& p) { p.kappa_ap = 1.5; });   // > kappa_a
    expect_reject([](ModelParams& p) { p.kappa_ap = -0.1; });
    expect_reject([](ModelParams& p) { p.kappa_bp = p.kappa_b; });
    expect_reject([](ModelParams& p) { p.g_a = 0.0; });
    expect_reject([](ModelParams& p) { p.gamma_2 = 0.0; });
    expect_reject([](ModelParams& p) { p.gamma_perp = -1.0; });
    expect_reject([](ModelParams& p) { p.gamma_c = -1.0; });
    expect_reject([](ModelParams& p) { p.xi_a = 0.0; });
    expect_reject([](ModelParams& p) { p.xi_a = 1.5; });
    expect_reject([](ModelParams& p) { p.xi_b = -0.2; });
    expect_reject([](ModelParams& p) { p.p = -0.1; });
    expect_reject([](ModelParams& p) { p.p = 1.1; });
    expect_reject([](ModelParams& p) { p.R_a = -1.0; });
}

TEST_CASE("rate-hierarchy warnings are advisory")
{
    ModelParams p = reference_params(1.01);
    ValidityReport rep = check_params(p);
    CHECK(rep.ok);
    CHECK(rep.errors.empty());
    CHECK(rep.warnings.empty());

    p.gamma_2 = 2.0; // less than 5x the cavity decay
    rep = check_params(p);
    CHECK(rep.ok); // still usable
    CHECK(!rep.warnings.empty());

    ModelParams q = reference_params(1.01);
    q.gamma_perp = 30.0; // dephasing not far above gamma_2
    rep = check_params(q);
    CHECK(rep.ok);
    CHECK(!rep.warnings.empty());
}

TEST_CASE("config parser accepts the documented key set")
{
    const std::string text = "# reference configuration\n"
                             "kappa_a = 1.0\n"
                             "kappa_b = 1.0\n"
                             "\n"
                             "kappa_ap = 0.5\n"
                             "kappa_bp = 0.5\n"
                             "g_a = 0.1\n"
                             "g_b = 0.1\n"
                             "gamma_2 = 10\n"
                             "gamma_perp = 1e3\n"
                             "gamma_c = 100   # spin flips\n"
                             "nu = 0\n"
                             "xi_a = 0.8\n"
                             "xi_b = 0.8\n"
                             "pump_ratio = 1.01\n"
                             "p = 0\n";
    const ParsedConfig cfg = parse_config_text(text);
    CHECK(cfg.pump_ratio.has_value());
    CHECK(*cfg.pump_ratio == doctest::Approx(1.01));

    const ModelParams p = resolve_pump(cfg);
    CHECK(p.R_a == doctest::Approx(1.01 * 5e5).epsilon(1e-12));
}

TEST_CASE("config parser rejects malformed input with diagnostics")
{
    CHECK_THROWS_AS(parse_config_text("unknown_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kappa_a = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kappa_a = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kappa_a 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("kappa_a = 1\nkappa_a = 2\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text("R_a = 1e5\npump_ratio = 1.01\n"),
                    ConfigError);
    // the dichroism signs are a CLI switch, not config keys
    CHECK_THROWS_AS(parse_config_text("s_a = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("s_b = -1\n"), ConfigError);

    // diagnostics carry the line number
    try {
        parse_config_text("kappa_a = 1\nbogus = 2\n", "test.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("test.cfg") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
}

TEST_CASE("pump can be given as an absolute rate")
{
    const ParsedConfig cfg = parse_config_text("R_a = 123456\n");
    CHECK(!cfg.pump_ratio.has_value());
    const ModelParams p = resolve_pump(cfg);
    CHECK(p.R_a == doctest::Approx(123456.0).epsilon(1e-15));
}

TEST_CASE("require_valid throws on degenerate dichroism")
{
    ModelParams p = reference_params(1.01);
    p.kappa_ap = p.kappa_a;
    CHECK_THROWS_AS(require_valid(p), ConfigError);
}
