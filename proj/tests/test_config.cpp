// test_config.cpp - strict INI parsing, presets and sweep parameter addressing

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcorr/experiments/config.hpp"
#include "qcorr/experiments/sweep.hpp"

using namespace qcorr;
using namespace qcorr::experiments;

namespace {

constexpr double pi = std::numbers::pi;

// Message of the config_error raised by parsing `text`, or "" if it parses.
std::string parse_error(const std::string& text) {
    try {
        parse_config(text).validate();
    } catch (const config_error& e) {
        return e.what();
    }
    return {};
}

} // namespace

// ---- defaults ----

TEST(Config, DefaultsMatchReferenceParameters) {
    const auto c = default_config();
    EXPECT_EQ(c.pair.T_A, 2.0);
    EXPECT_EQ(c.pair.T_B, 1.0);
    EXPECT_EQ(c.pair.omega, 0.1);
    EXPECT_NEAR(c.pair.delta(), -pi / 2, 1e-15);
    EXPECT_EQ(c.bath_a.kappa, 0.01);
    EXPECT_EQ(c.bath_b.kappa, 0.01);
    EXPECT_EQ(c.bath_a.coupling, CouplingAxis::x);
    EXPECT_EQ(c.bath_a.temperature, 2.0);
    EXPECT_EQ(c.bath_b.temperature, 1.0);
    EXPECT_EQ(c.depth, 3);
    EXPECT_EQ(c.bath_a.n_matsubara, 2);
    EXPECT_FALSE(c.dt.has_value());
}

TEST(Config, EmptyTextGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(render_config(c), render_config(default_config()));
}

TEST(Config, Fig5Preset) {
    const auto c = parse_config("preset = fig5\n");
    EXPECT_EQ(c.preset, "fig5");
    EXPECT_EQ(c.bath_a.kappa, 0.01);
    EXPECT_EQ(c.bath_b.kappa, 0.023);
    ASSERT_TRUE(c.schedule.tau_connect.has_value());
    EXPECT_EQ(*c.schedule.tau_connect, 6.1);
    EXPECT_EQ(c.schedule.tau_relax, 500.0);
    EXPECT_EQ(c.schedule.n_cycles, 2);
    EXPECT_EQ(preset_names().size(), 5u);
}

TEST(Config, SectionsOverridePreset) {
    const auto c = parse_config("preset = fig5\n[schedule]\ntau_connect = auto\n[bath_b]\nkappa = 0.03\n");
    EXPECT_FALSE(c.schedule.tau_connect.has_value());
    EXPECT_EQ(c.bath_b.kappa, 0.03);
    EXPECT_EQ(c.bath_a.kappa, 0.01);
}

// ---- parsing ----

TEST(Config, PiExpressionsAndDelta) {
    const auto c = parse_config("[pair]\nphi_v = pi/4\ndelta = -pi/2\n");
    EXPECT_NEAR(c.pair.phi_v, pi / 4, 1e-15);
    EXPECT_NEAR(c.pair.delta(), -pi / 2, 1e-15);
    EXPECT_NEAR(parse_config("[pair]\nphi_chi = 0.5*pi\n").pair.phi_chi, pi / 2, 1e-15);
}

TEST(Config, BathTemperaturesFollowPair) {
    auto c = parse_config("[pair]\nT_A = 3\nT_B = 0.5\n");
    c.sync();
    EXPECT_EQ(c.resolved_bath(0).temperature, 3.0);
    EXPECT_EQ(c.resolved_bath(1).temperature, 0.5);
}

TEST(Config, RenderRoundTrips) {
    const auto c = parse_config("[pair]\nT_A = 2.5\ndelta = -1\n[bath_b]\nkappa = 0.02\ncoupling = z\n[fuel]\nmode = none\n");
    const auto again = parse_config(render_config(c));
    EXPECT_EQ(render_config(again), render_config(c));
    EXPECT_EQ(again.bath_b.coupling, CouplingAxis::z);
    EXPECT_EQ(again.fuel.mode, FuelMode::none);
}

// ---- strict errors with qualified paths ----

TEST(Config, UnknownKeyIsRejected) {
    EXPECT_NE(parse_error("[pair]\nTB = 1\n").find("pair.TB: unknown key"), std::string::npos);
}

TEST(Config, UnknownSectionIsRejected) {
    EXPECT_NE(parse_error("[bath_c]\nkappa = 1\n").find("bath_c: unknown section"), std::string::npos);
}

TEST(Config, RangeErrorsNameTheKey) {
    EXPECT_NE(parse_error("[pair]\nT_B = 0\n").find("pair.T_B: must be > 0"), std::string::npos);
    EXPECT_NE(parse_error("[bath_a]\nkappa = -1\n").find("bath_a.kappa"), std::string::npos);
    EXPECT_NE(parse_error("[hierarchy]\ndepth = 0\n").find("hierarchy.depth"), std::string::npos);
    EXPECT_NE(parse_error("[bath_b]\nn_matsubara = 17\n").find("bath_b.n_matsubara"), std::string::npos);
    EXPECT_NE(parse_error("[run]\noutput_stride = 0\n").find("run.output_stride"), std::string::npos);
}

TEST(Config, MalformedValuesAreRejected) {
    EXPECT_NE(parse_error("[pair]\nOmega = fast\n").find("pair.Omega: expected a real number"), std::string::npos);
    EXPECT_NE(parse_error("[hierarchy]\ndepth = 3.5\n").find("hierarchy.depth: expected an integer"),
              std::string::npos);
    EXPECT_NE(parse_error("[bath_a]\ncoupling = y\n").find("bath_a.coupling"), std::string::npos);
    EXPECT_NE(parse_error("[sweep]\nvalues = 1,,2\n").find("sweep.values"), std::string::npos);
}

TEST(Config, DeltaAndPhiChiConflict) {
    EXPECT_NE(parse_error("[pair]\ndelta = 0\nphi_chi = 1\n").find("not both"), std::string::npos);
}

TEST(Config, InfeasibleCustomChi) {
    EXPECT_NE(parse_error("[fuel]\nmode = custom\nchi11 = 0\nchi23_abs = 0.9\n").find("fuel.chi23_abs"),
              std::string::npos);
}

TEST(Config, UnknownPresetIsRejected) {
    EXPECT_THROW(preset_config("fig9"), config_error);
    EXPECT_THROW(parse_config("preset = fig9\n"), config_error);
}

// ---- sweeps ----

TEST(Config, SweepNeedsParamAndValues) {
    auto c = parse_config("[sweep]\nparam = pair.delta\nvalues = -pi/2, 0, pi/2\n");
    c.mode = Mode::sweep;
    EXPECT_NO_THROW(c.validate());
    ASSERT_EQ(c.sweep.values.size(), 3u);
    EXPECT_NEAR(c.sweep.values[0], -pi / 2, 1e-15);

    c.sweep.param = "pair.colour";
    EXPECT_THROW(c.validate(), config_error);
    c.sweep.param = "pair.delta";
    c.sweep.values.clear();
    EXPECT_THROW(c.validate(), config_error);
}

TEST(Config, SetScalarAddressesKeys) {
    auto c = default_config();
    set_scalar(c, "pair.delta", 0.3);
    EXPECT_NEAR(c.pair.delta(), 0.3, 1e-15);
    set_scalar(c, "bath_b.kappa", 0.05);
    EXPECT_EQ(c.bath_b.kappa, 0.05);
    set_scalar(c, "hierarchy.depth", 4);
    EXPECT_EQ(c.depth, 4);
    EXPECT_THROW(set_scalar(c, "pair.nope", 1.0), config_error);
}

TEST(Presets, RunFamilies) {
    EXPECT_EQ(preset_runs(preset_config("fig1")).size(), 3u);
    const auto fig2 = preset_runs(preset_config("fig2"));
    ASSERT_EQ(fig2.size(), 6u);
    for (const auto& r : fig2) EXPECT_EQ(r.config.mode, Mode::closed);
    const auto fig4 = preset_runs(preset_config("fig4"));
    ASSERT_EQ(fig4.size(), 2u);
    EXPECT_EQ(fig4[0].config.fuel.mode, FuelMode::none);
    EXPECT_EQ(fig4[1].config.fuel.mode, FuelMode::optimal);
    const auto fig5 = preset_runs(preset_config("fig5"));
    ASSERT_EQ(fig5.size(), 2u);
    EXPECT_EQ(fig5[0].config.mode, Mode::pump);
    EXPECT_EQ(fig5[1].config.mode, Mode::open);
}

TEST(Presets, DissipativePresetsShareTheHierarchy) {
    for (const char* name : {"fig3", "fig4", "fig5"}) {
        const auto c = preset_config(name);
        EXPECT_EQ(c.bath_a.gamma_c, 0.2) << name;
        EXPECT_EQ(c.bath_b.gamma_c, 0.2) << name;
        EXPECT_EQ(c.bath_a.n_matsubara, 1) << name;
        EXPECT_EQ(c.depth, 5) << name;
    }
}
