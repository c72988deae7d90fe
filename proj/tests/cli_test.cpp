#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_runner.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) out.push_back(line);
  return out;
}

std::vector<std::string> with_prefix(const std::string& text, const std::string& prefix) {
  std::vector<std::string> out;
  for (const auto& line : lines(text)) {
    if (line.rfind(prefix, 0) == 0) out.push_back(line);
  }
  return out;
}

TEST(CliTransform, ZeroBoostLorentzIsIdentity) {
  const auto r = cli::run("transform --preset lorentz --beta 0 --event 1,0,0,0");
  ASSERT_EQ(r.exit_code, 0);
  const json out = json::parse(r.out);
  EXPECT_EQ(out["image"]["t"], 1.0);
  EXPECT_EQ(out["image"]["x"], 0.0);
  EXPECT_EQ(out["coefficients"]["a_tt"], 1.0);
}

TEST(CliTransform, PresetMatchesExplicitConventions) {
  const auto preset = cli::run("transform --preset superluminal --beta 0.6 --event 1,0,0,0");
  const auto explicit_k = cli::run("transform --k 0 --k-prime -0.6 --beta 0.6 --event 1,0,0,0");
  ASSERT_EQ(preset.exit_code, 0);
  EXPECT_EQ(preset.out, explicit_k.out);
  EXPECT_NEAR(json::parse(preset.out)["image"]["t"].get<double>(), 0.8, 1e-12);
}

TEST(CliTransform, DegenerateConventionExitsTwo) {
  const auto r = cli::run("transform --beta 0.8 --k -1 --k-prime 0 --event 1,0", true);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.out, "degenerate_convention beta=0.8 k=-1\n");
}

TEST(CliTransform, SwappedFramePairRoundTrips) {
  const auto there =
      cli::run("transform --from-frame 0.3,0.2 --to-frame -0.5,0.7 --event 2.5,-1.25,4,5");
  ASSERT_EQ(there.exit_code, 0);
  const json img = json::parse(there.out)["image"];
  std::ostringstream event;
  event.precision(17);
  event << img["t"].get<double>() << ',' << img["x"].get<double>() << ','
        << img["y"].get<double>() << ',' << img["z"].get<double>();
  const auto back = cli::run("transform --from-frame -0.5,0.7 --to-frame 0.3,0.2 --event " +
                             event.str());
  ASSERT_EQ(back.exit_code, 0);
  const json orig = json::parse(back.out)["image"];
  EXPECT_NEAR(orig["t"].get<double>(), 2.5, 1e-12);
  EXPECT_NEAR(orig["x"].get<double>(), -1.25, 1e-12);
  EXPECT_EQ(orig["y"].get<double>(), 4.0);
}

TEST(CliTransform, SiDisplayScalesLengths) {
  const std::string args = "transform --preset lorentz --beta 0 --event 1,2,0,0";
  const auto plain = cli::run(args);
  const auto si = cli::run(args, false, "SYNCHRONY_LAB_C=299792458 ");
  ASSERT_EQ(si.exit_code, 0);
  EXPECT_EQ(json::parse(plain.out).count("c"), 0u);
  const json out = json::parse(si.out);
  EXPECT_EQ(out["image"]["x_si"].get<double>(), 599584916.0);
  EXPECT_EQ(out["image"]["x"].get<double>(), 2.0);
  EXPECT_EQ(cli::run(args, false, "SYNCHRONY_LAB_C=fast ").exit_code, 1);
}

TEST(CliTransform, UsageErrorsAreSingleLine) {
  const auto r = cli::run("transform --event 1,2,3", true);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(lines(r.out).size(), 1u);
  EXPECT_EQ(r.out.rfind("usage_error ", 0), 0u);
}

TEST(CliSync, RestScenarioIsIsotropic) {
  const auto r = cli::run("sync --scenario " + cli::data("scenario_rest.json") + " --output csv");
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "beta,protocol,direction,distance,elapsed,speed");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].substr(rows[i].rfind(',') + 1), "1");
  }
}

TEST(CliSync, SuperluminalAndRegulationOffsetTablesMatch) {
  for (const char* scenario : {"scenario_moving.json", "scenario_skewed.json"}) {
    const std::string base = "sync --precision 12 --scenario " + cli::data(scenario);
    const auto a = cli::run(base + " --protocol superluminal");
    const auto b = cli::run(base + " --protocol external-regulation");
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    const auto offsets_a = with_prefix(a.out, "{\"record\":\"offset\"");
    EXPECT_FALSE(offsets_a.empty());
    EXPECT_EQ(offsets_a, with_prefix(b.out, "{\"record\":\"offset\"")) << scenario;
  }
}

TEST(CliSync, MovingScenarioMeasurements) {
  const auto r = cli::run("sync --scenario " + cli::data("scenario_moving.json"));
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = with_prefix(r.out, "{\"record\":\"measurement\"");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(json::parse(rows[0])["speed"].get<double>(), 0.625, 1e-9);
  EXPECT_NEAR(json::parse(rows[1])["speed"].get<double>(), 2.5, 1e-9);
  EXPECT_NEAR(json::parse(rows[2])["speed"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(json::parse(rows[3])["speed"], "inf");
}

TEST(CliSync, InvalidScenarioExitsThree) {
  const auto r = cli::run("sync --scenario " + cli::data("scenario_bad_order.json"), true);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.out.find("strictly increasing"), std::string::npos);
  EXPECT_EQ(lines(r.out).size(), 1u);
  EXPECT_EQ(cli::run("sync --scenario /nonexistent.json").exit_code, 3);
}

TEST(CliOneWay, EinsteinIsIsotropic) {
  const auto r = cli::run("oneway --beta 0.6 --protocol einstein --output csv");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out,
            "beta,protocol,direction,distance,elapsed,speed\n"
            "0.6,einstein,+x,1.25,1.25,1\n"
            "0.6,einstein,-x,1.25,1.25,1\n"
            "0.6,einstein,two-way,2.5,2.5,1\n");
}

TEST(CliOneWay, SlowSignalChaseFails) {
  const auto r = cli::run(
      "oneway --beta 0.6 --protocol einstein --kind superluminal-finite --speed 0.5", true);
  EXPECT_EQ(r.exit_code, 5);
  EXPECT_EQ(r.out.rfind("unresolvable_chase ", 0), 0u);
}

TEST(CliScan, ArgminAtRest) {
  const auto r = cli::run("scan --beta-min -0.5 --beta-max 0.5 --step 0.25");
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows.back(), "argmin,0,,0");
}

TEST(CliScan, RowAtPointSix) {
  const auto r = cli::run("scan --beta-min 0.6 --beta-max 0.6 --step 0.1");
  ASSERT_EQ(r.exit_code, 0);
  const auto row = lines(r.out).at(1);
  const double anisotropy = std::stod(row.substr(row.rfind(',') + 1));
  EXPECT_NEAR(std::abs(anisotropy), 1.875, 1e-9);
}

TEST(CliScan, WideStepGivesSingleRow) {
  const auto r = cli::run("scan --beta-min -0.2 --beta-max 0.3 --step 2");
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(0, rows[1].find(',')), "-0.2");
}

TEST(CliScan, RejectsBadRange) {
  EXPECT_EQ(cli::run("scan --beta-min -1 --beta-max 0.5 --step 0.1").exit_code, 1);
  EXPECT_EQ(cli::run("scan --beta-min 0 --beta-max 0.5 --step 0").exit_code, 1);
}

TEST(CliProbe, RecoversFramesFromFiles) {
  const auto rest = cli::run("probe --samples " + cli::data("samples_rest.csv"));
  ASSERT_EQ(rest.exit_code, 0);
  EXPECT_NEAR(json::parse(rest.out)["beta_hat"].get<double>(), 0.0, 1e-12);

  const auto moving = cli::run("probe --samples " + cli::data("samples_moving.csv"));
  ASSERT_EQ(moving.exit_code, 0);
  const json report = json::parse(moving.out);
  EXPECT_NEAR(report["beta_hat"].get<double>(), 0.3, 0.005);
  EXPECT_EQ(report["residuals"].size(), 181u);
  EXPECT_EQ(report["constants"]["planck_energy"].get<double>(), 1.22e28);
}

TEST(CliProbe, SingleVelocityExitsFour) {
  const auto r = cli::run("probe --samples " + cli::data("samples_single_velocity.csv"), true);
  EXPECT_EQ(r.exit_code, 4);
  EXPECT_EQ(r.out.rfind("ill_conditioned ", 0), 0u);
}

TEST(CliProbe, NoiseRequiresSeedAndIsReproducible) {
  EXPECT_EQ(cli::run("probe --synthesize 0.3 --noise 0.01").exit_code, 1);
  const std::string cmd = "probe --synthesize 0.3 --noise 0.01 --seed 42";
  const auto a = cli::run(cmd);
  const auto b = cli::run(cmd);
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, cli::run("probe --synthesize 0.3 --noise 0.01 --seed 43").out);
}

}  // namespace
