// Command-line front end: garment warping, single-part warps, the band demo,
// field visualisation and identity evaluation.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "atagwarp/commands.hpp"
#include "atagwarp/errors.hpp"

namespace {

using namespace atagwarp;

struct JobFlags {
  std::string sample;
  std::string model, person, model_kp, person_kp, garment, model_parse, person_parse,
      upper, target, out;
  double a = AtagParams{}.steepness;
  double flexion_limit_deg = 145.0;
  double lambda = PipelineOptions{}.tps_lambda;
  double conf = PipelineOptions{}.confidence_threshold;
  std::string composite_order = "sleeves-over-torso";
  std::string inpaint_mode = "literal";
  std::string torso_landmarks;
};

void AddJobFlags(CLI::App* app, JobFlags& f, bool needs_out = true) {
  app->add_option("--sample", f.sample, "Sample directory supplying default inputs");
  app->add_option("--model", f.model, "Model image (PNG)");
  app->add_option("--person", f.person, "Person image (PNG)");
  app->add_option("--model-keypoints", f.model_kp, "Model keypoints (JSON)");
  app->add_option("--person-keypoints", f.person_kp, "Person keypoints (JSON)");
  app->add_option("--garment-mask", f.garment, "Garment mask in the model frame");
  app->add_option("--model-parse", f.model_parse, "Model part-parse label map");
  app->add_option("--person-parse", f.person_parse, "Person part-parse label map");
  app->add_option("--upper-mask", f.upper, "Person upper-body mask");
  app->add_option("--target-mask", f.target, "Target clothing mask (optional)");
  auto* out = app->add_option("--out", f.out, "Output directory");
  if (needs_out) out->required();
  app->add_option("--a", f.a, "Logistic gate steepness (1/rad)");
  app->add_option("--flexion-limit", f.flexion_limit_deg, "Flexion warning limit (deg)");
  app->add_option("--lambda", f.lambda, "TPS regularization");
  app->add_option("--conf-threshold", f.conf, "Keypoint confidence threshold");
  app->add_option("--composite-order", f.composite_order, "Layer order")
      ->check(CLI::IsMember({"sleeves-over-torso", "torso-over-sleeves"}));
  app->add_option("--inpaint-mode", f.inpaint_mode, "Inpaint mask formula")
      ->check(CLI::IsMember({"literal", "extended"}));
  app->add_option("--torso-landmarks", f.torso_landmarks,
                  "Comma-separated torso landmark subset");
}

PipelineOptions ToOptions(const JobFlags& f) {
  PipelineOptions o;
  o.atag.steepness = f.a;
  o.atag.flexion_warn_limit = f.flexion_limit_deg * kPi / 180.0;
  o.tps_lambda = f.lambda;
  o.confidence_threshold = f.conf;
  o.composite_order = f.composite_order == "torso-over-sleeves"
                          ? CompositeOrder::kTorsoOverSleeves
                          : CompositeOrder::kSleevesOverTorso;
  o.inpaint_mode =
      f.inpaint_mode == "extended" ? InpaintMode::kExtended : InpaintMode::kLiteral;
  if (!f.torso_landmarks.empty()) {
    o.torso_landmarks.clear();
    std::stringstream ss(f.torso_landmarks);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto l = ParseTorsoLandmark(name);
      if (!l) throw InputError("unknown torso landmark '" + name + "'");
      o.torso_landmarks.push_back(*l);
    }
  }
  return o;
}

JobConfig ToJob(const JobFlags& f) {
  JobConfig job;
  job.model_image = f.model;
  job.person_image = f.person;
  job.model_keypoints = f.model_kp;
  job.person_keypoints = f.person_kp;
  job.garment_mask = f.garment;
  job.model_parse = f.model_parse;
  job.person_parse = f.person_parse;
  job.upper_mask = f.upper;
  if (!f.target.empty()) job.target_mask = fs::path(f.target);
  job.output_dir = f.out;
  job.options = ToOptions(f);
  if (!f.sample.empty()) job.FillFromSample(f.sample);
  return job;
}

ArmChain ParseChain(const std::string& text, ArmSide side) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("bad chain coordinate '" + item + "'");
    }
  }
  if (v.size() != 6) {
    throw InputError("a chain is six numbers: shoulder_x,shoulder_y,elbow_x,elbow_y,wrist_x,wrist_y");
  }
  return ArmChain({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, side);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anatomy-aware garment warping"};
  app.require_subcommand(1);

  JobFlags warp_flags;
  auto* warp = app.add_subcommand("warp", "Warp a garment from the model onto the person");
  AddJobFlags(warp, warp_flags);

  JobFlags sleeve_flags;
  std::string sleeve_side = "left";
  auto* warp_sleeve = app.add_subcommand("warp-sleeve", "Warp one sleeve with ATAG");
  AddJobFlags(warp_sleeve, sleeve_flags);
  warp_sleeve->add_option("--side", sleeve_side, "left or right")
      ->check(CLI::IsMember({"left", "right"}));

  JobFlags torso_flags;
  auto* warp_torso = app.add_subcommand("warp-torso", "Warp the torso with the landmark TPS");
  AddJobFlags(warp_torso, torso_flags);

  std::string demo_source = "96,40,96,100,96,160";
  std::string demo_target = "96,40,96,100,96,160";
  DemoRectConfig demo;
  std::string demo_out;
  auto* demo_cmd = app.add_subcommand("demo-rect", "Warp a textured band between two arm poses");
  demo_cmd->add_option("--source", demo_source, "Source chain sx,sy,ex,ey,wx,wy");
  demo_cmd->add_option("--target", demo_target, "Target chain sx,sy,ex,ey,wx,wy");
  demo_cmd->add_option("--width", demo.width, "Canvas width");
  demo_cmd->add_option("--height", demo.height, "Canvas height");
  demo_cmd->add_option("--thickness", demo.thickness, "Band thickness (px)");
  demo_cmd->add_option("--a", demo.params.steepness, "Logistic gate steepness (1/rad)");
  demo_cmd->add_option("--out", demo_out, "Output directory")->required();

  JobFlags field_flags;
  std::string field_source, field_target;
  FieldConfig field;
  auto* field_cmd = app.add_subcommand("field", "Visualise the backward displacement field");
  AddJobFlags(field_cmd, field_flags, false);
  field_cmd->add_option("--source", field_source, "Source chain (chain mode)");
  field_cmd->add_option("--target", field_target, "Target chain (chain mode)");
  field_cmd->add_option("--width", field.width, "Canvas width (chain mode)");
  field_cmd->add_option("--height", field.height, "Canvas height (chain mode)");
  field_cmd->add_option("--arrow-step", field.arrow_step, "Arrow spacing (px)");

  JobFlags eval_flags;
  EvalConfig eval;
  std::string eval_samples, eval_csv;
  auto* eval_cmd = app.add_subcommand("eval-identity", "Score warps of a directory of samples");
  eval_cmd->add_option("--samples", eval_samples, "Directory of sample directories")
      ->required();
  eval_cmd->add_option("--csv", eval_csv, "Output CSV")->required();
  eval_cmd->add_option("--threshold", eval.threshold, "SSIM pass threshold");
  eval_cmd->add_option("--a", eval_flags.a, "Logistic gate steepness (1/rad)");
  eval_cmd->add_option("--lambda", eval_flags.lambda, "TPS regularization");
  eval_cmd->add_option("--conf-threshold", eval_flags.conf, "Keypoint confidence threshold");

  CLI11_PARSE(app, argc, argv);

  return RunGuarded(
      [&] {
        if (warp->parsed()) {
          const auto report = WarpCommand(ToJob(warp_flags));
          for (const auto& w : report["warnings"]) {
            std::cerr << "warning: " << w.get<std::string>() << "\n";
          }
        } else if (warp_sleeve->parsed()) {
          WarpPartCommand(ToJob(sleeve_flags), sleeve_side == "left"
                                                   ? GarmentPart::kLeftSleeve
                                                   : GarmentPart::kRightSleeve);
        } else if (warp_torso->parsed()) {
          WarpPartCommand(ToJob(torso_flags), GarmentPart::kTorso);
        } else if (demo_cmd->parsed()) {
          demo.source = ParseChain(demo_source, ArmSide::kLeft);
          demo.target = ParseChain(demo_target, ArmSide::kLeft);
          demo.output_dir = demo_out;
          const auto result = DemoRectCommand(demo);
          std::cout << result.report.dump(2) << "\n";
        } else if (field_cmd->parsed()) {
          if (field_flags.out.empty()) throw InputError("--out is required");
          field.output_dir = field_flags.out;
          field.params.steepness = field_flags.a;
          if (!field_source.empty() || !field_target.empty()) {
            field.chains = AtagCorrespondence{ParseChain(field_target, ArmSide::kLeft),
                                              ParseChain(field_source, ArmSide::kLeft)};
          } else {
            field.job = ToJob(field_flags);
          }
          FieldCommand(field);
        } else if (eval_cmd->parsed()) {
          eval.samples_dir = eval_samples;
          eval.csv_path = eval_csv;
          eval.options = ToOptions(eval_flags);
          for (const auto& row : EvalIdentityCommand(eval)) {
            std::cout << row.sample << " ssim=" << row.ssim << " " << row.status << "\n";
          }
        }
      },
      std::cerr);
}
