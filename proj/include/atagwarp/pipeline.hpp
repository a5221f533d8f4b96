#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atagwarp/atag.hpp"
#include "atagwarp/geometry.hpp"
#include "atagwarp/raster.hpp"
#include "atagwarp/tps.hpp"

namespace atagwarp {

// 18-point pose skeleton order.
enum class Joint : int {
  kNose = 0,
  kNeck,
  kRightShoulder,
  kRightElbow,
  kRightWrist,
  kLeftShoulder,
  kLeftElbow,
  kLeftWrist,
  kRightHip,
  kRightKnee,
  kRightAnkle,
  kLeftHip,
  kLeftKnee,
  kLeftAnkle,
  kRightEye,
  kLeftEye,
  kRightEar,
  kLeftEar,
};
inline constexpr int kNumJoints = 18;

const char* JointName(Joint joint);

struct Keypoint {
  Point2 position;
  double confidence = 0.0;
};

class LandmarkSet {
 public:
  LandmarkSet() = default;
  explicit LandmarkSet(std::array<Keypoint, kNumJoints> keypoints);

  const Keypoint& operator[](Joint joint) const {
    return keypoints_[static_cast<int>(joint)];
  }
  const std::array<Keypoint, kNumJoints>& keypoints() const { return keypoints_; }

  // A keypoint below the confidence threshold counts as absent.
  bool Present(Joint joint, double threshold) const {
    return (*this)[joint].confidence >= threshold;
  }

 private:
  std::array<Keypoint, kNumJoints> keypoints_{};
};

// Shoulder, elbow and wrist of one side. Throws AbsentLandmarkError naming
// the first missing joint.
ArmChain ArmChainFrom(const LandmarkSet& landmarks, ArmSide side, double threshold);

enum class PartLabel : uint8_t {
  kBackground = 0,
  kTorso = 1,
  kLeftArm = 2,
  kRightArm = 3,
  kOther = 4,
};

class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, std::vector<uint8_t> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  PartLabel get(int x, int y) const {
    return static_cast<PartLabel>(labels_[static_cast<size_t>(y) * width_ + x]);
  }
  const std::vector<uint8_t>& labels() const { return labels_; }

  BinaryMask MaskOf(PartLabel label) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> labels_;
};

enum class GarmentPart : int { kTorso = 0, kLeftSleeve = 1, kRightSleeve = 2 };
inline constexpr std::array<GarmentPart, 3> kGarmentParts = {
    GarmentPart::kTorso, GarmentPart::kLeftSleeve, GarmentPart::kRightSleeve};

const char* PartName(GarmentPart part);

// Splits `region` into torso / left / right pieces by the parse labels.
// Region pixels with no arm or torso label go to the nearest piece
// (Euclidean); ties prefer torso, then left, then right. The pieces are
// disjoint and cover `region` unless all three would be empty.
std::array<BinaryMask, 3> SplitByParse(const BinaryMask& region,
                                       const LabelMap& parse);

struct GarmentParts {
  std::array<ImageBuffer, 3> images;
  std::array<BinaryMask, 3> masks;

  const ImageBuffer& image(GarmentPart p) const { return images[int(p)]; }
  const BinaryMask& mask(GarmentPart p) const { return masks[int(p)]; }
};

// Throws InputError for an empty garment or an empty torso piece. Sleeve
// pieces may be empty.
GarmentParts SplitGarment(const ImageBuffer& model_image,
                          const BinaryMask& garment_mask, const LabelMap& parse);

enum class TorsoLandmark {
  kNeck,
  kRightShoulder,
  kLeftShoulder,
  kRightHip,
  kLeftHip,
  kMidShoulder,
  kMidHip,
};

const char* TorsoLandmarkName(TorsoLandmark landmark);
std::optional<TorsoLandmark> ParseTorsoLandmark(const std::string& name);
std::vector<TorsoLandmark> DefaultTorsoLandmarks();

// Position of a torso landmark, or nullopt when it (or, for midpoints,
// either parent) is absent.
std::optional<Point2> ResolveTorsoLandmark(const LandmarkSet& landmarks,
                                           TorsoLandmark landmark,
                                           double threshold);

// Backward correspondences (person -> model) for the landmarks present in
// both sets.
std::vector<Correspondence> TorsoCorrespondences(
    const LandmarkSet& person, const LandmarkSet& model,
    std::span<const TorsoLandmark> subset, double threshold);

struct TryOnInputs {
  ImageBuffer model_image;
  ImageBuffer person_image;
  LandmarkSet model_landmarks;
  LandmarkSet person_landmarks;
  // Garment silhouette c in the model frame.
  BinaryMask garment_mask;
  LabelMap model_parse;
  LabelMap person_parse;
  // Target clothing mask in the person frame, when one is available.
  std::optional<BinaryMask> target_mask;
  // Upper body (clothing and skin) of the person.
  BinaryMask person_upper_mask;

  void Validate() const;
};

enum class CompositeOrder { kSleevesOverTorso, kTorsoOverSleeves };

// kLiteral predicts upper-body pixels of s only. kExtended also predicts
// upper-body pixels left uncovered by the warp mask.
enum class InpaintMode { kLiteral, kExtended };

const char* ToString(CompositeOrder order);
const char* ToString(InpaintMode mode);

struct PipelineOptions {
  AtagParams atag;
  double tps_lambda = 1e-3;
  double confidence_threshold = 0.3;
  std::vector<TorsoLandmark> torso_landmarks = DefaultTorsoLandmarks();
  CompositeOrder composite_order = CompositeOrder::kSleevesOverTorso;
  InpaintMode inpaint_mode = InpaintMode::kLiteral;

  void Validate() const;
};

struct PartWarp {
  GarmentPart part = GarmentPart::kTorso;
  bool warped = false;
  // Person-frame pixels this part is responsible for.
  BinaryMask target_region;
  SourceMap map;
  WarpOutput output;
  // Target elbow flexion, sleeves only.
  std::optional<double> flexion;
};

struct PartWarps {
  GarmentParts garment;
  std::array<PartWarp, 3> parts;
  // Union of the target regions of the parts that were warped.
  BinaryMask mapped;
  std::vector<std::string> warnings;

  const PartWarp& part(GarmentPart p) const { return parts[int(p)]; }
};

// Person-frame responsibility of each part: the target mask (or, without
// one, the upper-body mask) split by the person's part parse.
std::array<BinaryMask, 3> TargetRegions(const TryOnInputs& inputs);

// Warps one part over `target_region`. Throws AbsentLandmarkError when a
// sleeve chain is incomplete and FitError when the torso spline cannot be
// fitted.
PartWarp WarpPart(const TryOnInputs& inputs, const PipelineOptions& options,
                  const GarmentParts& garment, const BinaryMask& target_region,
                  GarmentPart part);

// Torso through a landmark TPS, sleeves through ATAG. A sleeve whose chain
// is incomplete on either side is skipped with a warning.
PartWarps WarpParts(const TryOnInputs& inputs, const PipelineOptions& options);

// Target pixels without a visible source pixel: the union of the per-part
// holes, plus (with a target mask) target pixels no part mapped. The result
// is confined to the target mask when present.
BinaryMask ComputeOccluded(std::span<const BinaryMask> part_holes,
                           const BinaryMask& mapped, const BinaryMask* target_mask);

struct WarpResult {
  ImageBuffer warped_garment;
  BinaryMask warp_mask;
  BinaryMask occluded;
  // Zero marks pixels to be predicted.
  BinaryMask inpaint_mask;
  std::array<BinaryMask, 3> part_masks;
  std::array<WarpOutput, 3> per_part;
  ImageBuffer preview;
};

WarpResult ComposeResult(const TryOnInputs& inputs, const PartWarps& warps,
                         const BinaryMask& occluded, const PipelineOptions& options);

struct PipelineRun {
  PartWarps warps;
  WarpResult result;
};

PipelineRun RunPipeline(const TryOnInputs& inputs, const PipelineOptions& options);

}  // namespace atagwarp
