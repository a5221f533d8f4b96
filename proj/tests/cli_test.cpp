#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "atagwarp/commands.hpp"
#include "atagwarp/errors.hpp"
#include "atagwarp/io.hpp"
#include "oracles.hpp"
#include "samples.hpp"

namespace {

using namespace atagwarp;
using testing_support::MakeSample;
using testing_support::RunTool;
using testing_support::ScratchDir;
using testing_support::WriteSample;

std::string ReadText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json ReadReport(const fs::path& dir) {
  return nlohmann::json::parse(ReadText(dir / "report.json"));
}

std::string Quote(const fs::path& p) { return "\"" + p.string() + "\""; }

TEST(RunGuarded, ExitCodes) {
  std::ostringstream err;
  EXPECT_EQ(RunGuarded([] {}, err), kExitOk);
  EXPECT_EQ(RunGuarded([] { throw InputError("x"); }, err), kExitInput);
  EXPECT_EQ(RunGuarded([] { throw DimensionMismatchError("x"); }, err), kExitInput);
  EXPECT_EQ(RunGuarded([] { throw AbsentLandmarkError("left_wrist"); }, err), kExitInput);
  EXPECT_EQ(RunGuarded([] { throw FitError("x"); }, err), kExitNumeric);
  EXPECT_EQ(RunGuarded([] { throw DegenerateGeometryError("x"); }, err), kExitNumeric);
  EXPECT_EQ(RunGuarded([] { throw std::logic_error("x"); }, err), 1);
  EXPECT_NE(err.str().find("error [FitError]: x"), std::string::npos);
}

TEST(Cli, WarpSelfPairSucceeds) {
  const fs::path dir = ScratchDir("cli_warp");
  WriteSample(dir / "in", MakeSample(3));
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --out " + Quote(dir / "out")),
            kExitOk);
  for (const char* name : {"warped.png", "warp_mask.png", "occluded.png", "inpaint_mask.png",
                           "preview.png", "torso.png", "left_sleeve.png", "right_sleeve.png"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
  }
  const auto report = ReadReport(dir / "out");
  EXPECT_EQ(report["command"], "warp");
  EXPECT_EQ(report["masks"]["occluded_pixels"], 0);
  EXPECT_GE(report["self_check"]["ssim_vs_person"].get<double>(), 0.99);
  const auto& params = report["parameters"];
  EXPECT_EQ(params["atag"]["steepness"], 8.0);
  EXPECT_EQ(params["tps_lambda"], 1e-3);
  EXPECT_EQ(params["confidence_threshold"], 0.3);
  EXPECT_EQ(params["composite_order"], "sleeves-over-torso");
  EXPECT_EQ(params["inpaint_mode"], "literal");
  EXPECT_EQ(params["ssim"]["window"], 11);
  EXPECT_EQ(params["torso_landmarks"].size(), 7u);
  fs::remove_all(dir);
}

TEST(Cli, MissingWristWarnsAndSucceeds) {
  const fs::path dir = ScratchDir("cli_wrist");
  SyntheticSample s = MakeSample(4);
  auto kp = s.landmarks.keypoints();
  kp[int(Joint::kRightWrist)].confidence = 0.0;
  s.landmarks = LandmarkSet(kp);
  WriteSample(dir / "in", s);
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --out " + Quote(dir / "out"),
                    dir / "log.txt"),
            kExitOk);
  const auto report = ReadReport(dir / "out");
  ASSERT_EQ(report["warnings"].size(), 1u);
  EXPECT_NE(report["warnings"][0].get<std::string>().find("right_wrist"), std::string::npos);
  EXPECT_FALSE(report["parts"]["right_sleeve"]["warped"].get<bool>());
  EXPECT_GT(report["masks"]["occluded_pixels"].get<int>(), 0);
  EXPECT_NE(ReadText(dir / "log.txt").find("warning:"), std::string::npos);

  EXPECT_EQ(RunTool("warp-sleeve --side right --sample " + Quote(dir / "in") + " --out " +
                    Quote(dir / "sleeve")),
            kExitInput);
  EXPECT_EQ(RunTool("warp-sleeve --side left --sample " + Quote(dir / "in") + " --out " +
                    Quote(dir / "sleeve")),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "sleeve" / "left_sleeve_holes.png"));
  fs::remove_all(dir);
}

TEST(Cli, InputErrors) {
  const fs::path dir = ScratchDir("cli_errors");
  const SyntheticSample s = MakeSample(5);
  WriteSample(dir / "in", s);
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "nowhere") + " --out " + Quote(dir / "o")),
            kExitInput);
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --out " + Quote(dir / "o") +
                    " --conf-threshold 2"),
            kExitInput);
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --out " + Quote(dir / "o") +
                    " --torso-landmarks neck,knee"),
            kExitInput);

  WriteMask(dir / "small.png", BinaryMask(10, 10, true));
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --upper-mask " +
                    Quote(dir / "small.png") + " --out " + Quote(dir / "o"), dir / "log.txt"),
            kExitInput);
  EXPECT_NE(ReadText(dir / "log.txt").find("DimensionMismatchError"), std::string::npos);

  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --model-keypoints " +
                    Quote(dir / "bad.json") + " --out " + Quote(dir / "o")),
            kExitInput);
  fs::remove_all(dir);
}

TEST(Cli, CollinearTorsoIsNumericError) {
  const fs::path dir = ScratchDir("cli_fit");
  WriteSample(dir / "in", MakeSample(6));
  EXPECT_EQ(RunTool("warp-torso --sample " + Quote(dir / "in") + " --out " + Quote(dir / "o") +
                        " --torso-landmarks right_shoulder,mid_shoulder,left_shoulder",
                    dir / "log.txt"),
            kExitNumeric);
  EXPECT_NE(ReadText(dir / "log.txt").find("FitError"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, DeterministicOutputs) {
  const fs::path dir = ScratchDir("cli_det");
  const SyntheticSample model = MakeSample(11);
  const SyntheticSample person = MakeSample(12);
  WriteSample(dir / "in", model);
  WritePng(dir / "in" / "person.png", person.image);
  WriteLandmarks(dir / "in" / "person_keypoints.json", person.landmarks);
  WriteLabelMap(dir / "in" / "person_parse.png", person.parse);
  WriteMask(dir / "in" / "upper_mask.png", person.upper_body);
  WriteMask(dir / "in" / "target_mask.png", person.garment);
  for (const char* out : {"a", "b"}) {
    ASSERT_EQ(RunTool("warp --sample " + Quote(dir / "in") + " --out " + Quote(dir / out)),
              kExitOk);
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".png") continue;
    const fs::path other = dir / "b" / entry.path().filename();
    EXPECT_EQ(ReadText(entry.path()), ReadText(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 8);
  fs::remove_all(dir);
}

TEST(DemoRect, MagnificationMatchesBoneRatio) {
  DemoRectConfig cfg;
  cfg.source = ArmChain({96, 40}, {96, 100}, {96, 160}, ArmSide::kLeft);
  cfg.target = ArmChain({96, 20}, {96, 140}, {96, 200}, ArmSide::kLeft);
  const DemoRectResult r = DemoRectCommand(cfg);
  EXPECT_NEAR(r.upper_ratio, 2.0, 0.1);
  EXPECT_NEAR(r.lower_ratio, 1.0, 0.05);
  EXPECT_EQ(r.report["expected_upper_ratio"], 2.0);
}

TEST(DemoRect, EqualChainsReproduceBand) {
  DemoRectConfig cfg;
  const DemoRectResult r = DemoRectCommand(cfg);
  const Band band = RenderBand(cfg.source, cfg.thickness, cfg.width, cfg.height);
  EXPECT_EQ(r.warped_valid, band.mask);
  EXPECT_EQ(r.warped, band.image);
  EXPECT_EQ(r.interior_holes, 0u);
}

TEST(DemoRect, BentTargetHasNoInteriorHoles) {
  DemoRectConfig cfg;
  cfg.target = ArmChain({96, 40}, {96, 100}, {156, 100}, ArmSide::kLeft);
  const DemoRectResult r = DemoRectCommand(cfg);
  EXPECT_EQ(r.interior_holes, 0u);
  EXPECT_NEAR(r.report["target_flexion_deg"].get<double>(), 90.0, 1e-9);
}

TEST(DemoRect, CommandLine) {
  const fs::path dir = ScratchDir("cli_demo");
  EXPECT_EQ(RunTool("demo-rect --target 96,40,96,100,150,130 --out " + Quote(dir)), kExitOk);
  for (const char* name : {"source.png", "warped.png", "side_by_side.png", "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  EXPECT_EQ(ReadPng(dir / "side_by_side.png").width(), 2 * 192 + 4);
  EXPECT_EQ(RunTool("demo-rect --target 1,2,3 --out " + Quote(dir)), kExitInput);
  EXPECT_EQ(RunTool("demo-rect --target 96,40,96,40,96,160 --out " + Quote(dir)), kExitNumeric);
  fs::remove_all(dir);
}

TEST(Field, IdentityAndBentChains) {
  FieldConfig cfg;
  cfg.width = 40;
  cfg.height = 30;
  const ArmChain straight({20, 2}, {20, 14}, {20, 26}, ArmSide::kLeft);
  cfg.chains = AtagCorrespondence{straight, straight};
  const FieldResult same = FieldCommand(cfg);
  EXPECT_LE(same.report["max_displacement"].get<double>(), 1e-9);
  EXPECT_EQ(same.report["mapped_pixels"], 40 * 30);

  const ArmChain bent({20, 2}, {20, 14}, {32, 14}, ArmSide::kLeft);
  cfg.chains = AtagCorrespondence{bent, straight};
  const FieldResult r = FieldCommand(cfg);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const Point2 want = oracle::AtagPoint({double(x), double(y)}, bent, straight, 8.0);
      ASSERT_LE(Distance(*r.map.at(x, y), want), 1e-8);
    }
  }
  EXPECT_GT(r.report["max_displacement"].get<double>(), 1.0);
}

TEST(Field, TranslatedSelfPairIsConstant) {
  const fs::path dir = ScratchDir("cli_field");
  const SyntheticSample s = MakeSample(13);
  WriteSample(dir / "in", s);
  const int dx = 5, dy = -3;
  auto kp = s.landmarks.keypoints();
  for (auto& k : kp) k.position = k.position + Point2{double(dx), double(dy)};
  WriteLandmarks(dir / "in" / "person_keypoints.json", LandmarkSet(kp));

  FieldConfig cfg;
  JobConfig job;
  job.FillFromSample(dir / "in");
  cfg.job = job;
  const FieldResult r = FieldCommand(cfg);
  EXPECT_GT(r.report["mapped_pixels"].get<int>(), 0);
  const auto& mean = r.report["mean_displacement_vector"];
  EXPECT_NEAR(mean[0].get<double>(), -dx, 1e-6);
  EXPECT_NEAR(mean[1].get<double>(), -dy, 1e-6);
  EXPECT_LE(r.report["displacement_stddev"][0].get<double>(), 1e-6);
  EXPECT_LE(r.report["displacement_stddev"][1].get<double>(), 1e-6);

  EXPECT_EQ(RunTool("field --sample " + Quote(dir / "in") + " --out " + Quote(dir / "f")),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "f" / "field_magnitude.png"));
  EXPECT_TRUE(fs::exists(dir / "f" / "field_arrows.png"));
  EXPECT_EQ(RunTool("field --source 1,2 --out " + Quote(dir / "f")), kExitInput);
  fs::remove_all(dir);
}

TEST(EvalIdentity, FlagsCorruptedPair) {
  const fs::path dir = ScratchDir("cli_eval");
  WriteSample(dir / "samples" / "s0", MakeSample(20));
  WriteSample(dir / "samples" / "s1", MakeSample(21));
  // The person photo no longer matches the garment.
  const SyntheticSample other = MakeSample(22);
  WriteSample(dir / "samples" / "s2", MakeSample(23));
  WritePng(dir / "samples" / "s2" / "person.png", other.image);
  fs::create_directories(dir / "samples" / "broken");

  EvalConfig cfg;
  cfg.samples_dir = dir / "samples";
  cfg.csv_path = dir / "eval.csv";
  const auto rows = EvalIdentityCommand(cfg);
  ASSERT_EQ(rows.size(), 4u);
  std::map<std::string, EvalRow> by_name;
  for (const auto& r : rows) by_name[r.sample] = r;
  EXPECT_EQ(by_name["s0"].status, "ok");
  EXPECT_EQ(by_name["s1"].status, "ok");
  EXPECT_EQ(by_name["s2"].status, "below_threshold");
  EXPECT_EQ(by_name["broken"].status, "error");
  const std::string csv = ReadText(dir / "eval.csv");
  EXPECT_EQ(csv.rfind("sample,ssim,mae,occluded_pixels,status\n", 0), 0u);
  EXPECT_NE(csv.find("below_threshold"), std::string::npos);

  EXPECT_EQ(RunTool("eval-identity --samples " + Quote(dir / "samples") + " --csv " +
                    Quote(dir / "cli.csv")),
            kExitOk);
  EXPECT_EQ(ReadText(dir / "cli.csv"), csv);
  EXPECT_EQ(RunTool("eval-identity --samples " + Quote(dir / "none") + " --csv " +
                    Quote(dir / "cli.csv")),
            kExitInput);
  fs::remove_all(dir);
}

TEST(JobConfig, PersonFilesFallBackToModel) {
  const fs::path dir = ScratchDir("cli_job");
  WriteSample(dir, MakeSample(30), false);
  JobConfig job;
  job.FillFromSample(dir);
  EXPECT_EQ(job.person_image, dir / "model.png");
  EXPECT_EQ(job.person_keypoints, dir / "model_keypoints.json");
  EXPECT_FALSE(job.target_mask.has_value());
  EXPECT_NO_THROW(job.Validate());
  job.upper_mask = dir / "missing.png";
  EXPECT_THROW(job.Validate(), InputError);
  fs::remove_all(dir);
}

}  // namespace
