#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "atagwarp/pipeline.hpp"

namespace atagwarp {

namespace fs = std::filesystem;

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

// File names used inside a sample directory. Missing person_* files fall
// back to their model_* counterparts, which makes a directory holding only
// model files a self-pair.
struct SampleLayout {
  static constexpr const char* kModelImage = "model.png";
  static constexpr const char* kPersonImage = "person.png";
  static constexpr const char* kModelKeypoints = "model_keypoints.json";
  static constexpr const char* kPersonKeypoints = "person_keypoints.json";
  static constexpr const char* kGarmentMask = "garment_mask.png";
  static constexpr const char* kModelParse = "model_parse.png";
  static constexpr const char* kPersonParse = "person_parse.png";
  static constexpr const char* kUpperMask = "upper_mask.png";
  static constexpr const char* kTargetMask = "target_mask.png";
};

struct JobConfig {
  fs::path model_image;
  fs::path person_image;
  fs::path model_keypoints;
  fs::path person_keypoints;
  fs::path garment_mask;
  fs::path model_parse;
  fs::path person_parse;
  fs::path upper_mask;
  std::optional<fs::path> target_mask;
  PipelineOptions options;
  fs::path output_dir;

  // Fills every input path that is still empty from a sample directory.
  void FillFromSample(const fs::path& dir);
  // Throws InputError naming the first unresolvable path.
  void Validate() const;
};

TryOnInputs LoadInputs(const JobConfig& config);

// Full resolved parameter set, as recorded in every report.
nlohmann::json ParametersJson(const PipelineOptions& options);

// Runs `body`, translating errors into an exit code and a one-line message
// "error [<class>]: <what>" on `err`.
int RunGuarded(const std::function<void()>& body, std::ostream& err);

// Writes warped.png, warp_mask.png, occluded.png, inpaint_mask.png,
// preview.png, one <part>.png per part and report.json into the output
// directory. Returns the report.
nlohmann::json WarpCommand(const JobConfig& config);

// Single-part warp. Writes <part>.png, <part>_valid.png, <part>_holes.png
// and report.json. An incomplete sleeve chain is an error here.
nlohmann::json WarpPartCommand(const JobConfig& config, GarmentPart part);

struct DemoRectConfig {
  ArmChain source{{96, 40}, {96, 100}, {96, 160}, ArmSide::kLeft};
  ArmChain target{{96, 40}, {96, 100}, {96, 160}, ArmSide::kLeft};
  int width = 192;
  int height = 256;
  double thickness = 24.0;
  AtagParams params;
  fs::path output_dir;
};

struct DemoRectResult {
  ImageBuffer source;
  ImageBuffer warped;
  BinaryMask warped_valid;
  SourceMap map;
  // Covered length along each target bone over the covered length along the
  // matching source bone.
  double upper_ratio = 0.0;
  double lower_ratio = 0.0;
  // Hole pixels strictly inside the band drawn around the target chain.
  size_t interior_holes = 0;
  nlohmann::json report;
};

// Renders a textured band along the source chain and warps it onto the
// target chain. Writes source.png, warped.png, side_by_side.png and
// report.json when an output directory is set.
DemoRectResult DemoRectCommand(const DemoRectConfig& config);

struct FieldConfig {
  // Either a job (all parts) ...
  std::optional<JobConfig> job;
  // ... or a bare sleeve correspondence evaluated over the whole canvas.
  std::optional<AtagCorrespondence> chains;
  int width = 192;
  int height = 256;
  AtagParams params;
  int arrow_step = 12;
  fs::path output_dir;
};

struct FieldResult {
  SourceMap map;
  ImageBuffer magnitude;
  ImageBuffer arrows;
  nlohmann::json report;
};

// Displacement magnitude heatmap (field_magnitude.png) and a sparse arrow
// plot (field_arrows.png) of the backward map.
FieldResult FieldCommand(const FieldConfig& config);

struct EvalRow {
  std::string sample;
  double ssim = 0.0;
  double mae = 0.0;
  size_t occluded_pixels = 0;
  std::string status;
};

struct EvalConfig {
  fs::path samples_dir;
  fs::path csv_path;
  double threshold = 0.99;
  PipelineOptions options;
};

// Runs the pipeline on every sample directory and scores the warped garment
// against the person image inside the warp mask.
std::vector<EvalRow> EvalIdentityCommand(const EvalConfig& config);

}  // namespace atagwarp
