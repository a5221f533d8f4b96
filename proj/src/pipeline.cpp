#include "atagwarp/pipeline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "atagwarp/errors.hpp"

namespace atagwarp {

namespace {

constexpr std::array<const char*, kNumJoints> kJointNames = {
    "nose",       "neck",       "right_shoulder", "right_elbow", "right_wrist",
    "left_shoulder", "left_elbow", "left_wrist",  "right_hip",   "right_knee",
    "right_ankle", "left_hip",  "left_knee",      "left_ankle",  "right_eye",
    "left_eye",   "right_ear",  "left_ear"};

constexpr std::array<const char*, 7> kTorsoLandmarkNames = {
    "neck", "right_shoulder", "left_shoulder", "right_hip",
    "left_hip", "mid_shoulder", "mid_hip"};

PartLabel LabelOf(GarmentPart part) {
  switch (part) {
    case GarmentPart::kTorso:
      return PartLabel::kTorso;
    case GarmentPart::kLeftSleeve:
      return PartLabel::kLeftArm;
    case GarmentPart::kRightSleeve:
      return PartLabel::kRightArm;
  }
  return PartLabel::kOther;
}

}  // namespace

const char* JointName(Joint joint) { return kJointNames[static_cast<int>(joint)]; }

LandmarkSet::LandmarkSet(std::array<Keypoint, kNumJoints> keypoints)
    : keypoints_(keypoints) {
  for (int i = 0; i < kNumJoints; ++i) {
    const Keypoint& k = keypoints_[i];
    if (!(k.confidence >= 0.0 && k.confidence <= 1.0)) {
      throw InputError(std::string("confidence of ") + kJointNames[i] +
                       " outside [0, 1]");
    }
    if (!IsFinite(k.position)) {
      throw InputError(std::string("non-finite position for ") + kJointNames[i]);
    }
  }
}

ArmChain ArmChainFrom(const LandmarkSet& landmarks, ArmSide side, double threshold) {
  const bool left = side == ArmSide::kLeft;
  const std::array<Joint, 3> joints =
      left ? std::array{Joint::kLeftShoulder, Joint::kLeftElbow, Joint::kLeftWrist}
           : std::array{Joint::kRightShoulder, Joint::kRightElbow, Joint::kRightWrist};
  for (Joint j : joints) {
    if (!landmarks.Present(j, threshold)) throw AbsentLandmarkError(JointName(j));
  }
  return ArmChain(landmarks[joints[0]].position, landmarks[joints[1]].position,
                  landmarks[joints[2]].position, side);
}

LabelMap::LabelMap(int width, int height, std::vector<uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 0 || height < 0 ||
      labels_.size() != static_cast<size_t>(width) * height) {
    throw InputError("label map data does not match its dimensions");
  }
  for (uint8_t l : labels_) {
    if (l > static_cast<uint8_t>(PartLabel::kOther)) {
      throw InputError("unknown part label " + std::to_string(int(l)));
    }
  }
}

BinaryMask LabelMap::MaskOf(PartLabel label) const {
  BinaryMask mask(width_, height_);
  for (size_t i = 0; i < labels_.size(); ++i) {
    mask.set_index(i, labels_[i] == static_cast<uint8_t>(label));
  }
  return mask;
}

const char* PartName(GarmentPart part) {
  switch (part) {
    case GarmentPart::kTorso:
      return "torso";
    case GarmentPart::kLeftSleeve:
      return "left_sleeve";
    case GarmentPart::kRightSleeve:
      return "right_sleeve";
  }
  return "?";
}

std::array<BinaryMask, 3> SplitByParse(const BinaryMask& region,
                                       const LabelMap& parse) {
  CheckSameSize(region, parse, "region and part parse");
  std::array<BinaryMask, 3> parts;
  for (GarmentPart p : kGarmentParts) {
    parts[int(p)] = And(region, parse.MaskOf(LabelOf(p)));
  }
  BinaryMask leftover = region;
  for (const auto& m : parts) leftover = Minus(leftover, m);
  if (leftover.Empty()) return parts;

  std::array<std::vector<double>, 3> distance;
  bool any = false;
  for (int i = 0; i < 3; ++i) {
    distance[i] = SquaredDistanceTransform(parts[i]);
    any = any || !parts[i].Empty();
  }
  if (!any) return parts;

  for (size_t i = 0; i < leftover.size(); ++i) {
    if (!leftover.get_index(i)) continue;
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (distance[k][i] < distance[best][i]) best = k;
    }
    parts[best].set_index(i);
  }
  return parts;
}

GarmentParts SplitGarment(const ImageBuffer& model_image,
                          const BinaryMask& garment_mask, const LabelMap& parse) {
  CheckSameSize(model_image, garment_mask, "model image and garment mask");
  if (garment_mask.Empty()) throw InputError("garment mask is empty");
  GarmentParts parts;
  parts.masks = SplitByParse(garment_mask, parse);
  if (parts.mask(GarmentPart::kTorso).Empty()) {
    throw InputError("garment has no torso part");
  }
  for (GarmentPart p : kGarmentParts) {
    parts.images[int(p)] = ApplyMask(model_image, parts.mask(p));
  }
  return parts;
}

const char* TorsoLandmarkName(TorsoLandmark landmark) {
  return kTorsoLandmarkNames[static_cast<int>(landmark)];
}

std::optional<TorsoLandmark> ParseTorsoLandmark(const std::string& name) {
  for (size_t i = 0; i < kTorsoLandmarkNames.size(); ++i) {
    if (name == kTorsoLandmarkNames[i]) return static_cast<TorsoLandmark>(i);
  }
  return std::nullopt;
}

std::vector<TorsoLandmark> DefaultTorsoLandmarks() {
  return {TorsoLandmark::kNeck,    TorsoLandmark::kRightShoulder,
          TorsoLandmark::kLeftShoulder, TorsoLandmark::kRightHip,
          TorsoLandmark::kLeftHip, TorsoLandmark::kMidShoulder,
          TorsoLandmark::kMidHip};
}

std::optional<Point2> ResolveTorsoLandmark(const LandmarkSet& landmarks,
                                           TorsoLandmark landmark,
                                           double threshold) {
  const auto single = [&](Joint j) -> std::optional<Point2> {
    if (!landmarks.Present(j, threshold)) return std::nullopt;
    return landmarks[j].position;
  };
  const auto midpoint = [&](Joint a, Joint b) -> std::optional<Point2> {
    const auto pa = single(a);
    const auto pb = single(b);
    if (!pa || !pb) return std::nullopt;
    return 0.5 * (*pa + *pb);
  };
  switch (landmark) {
    case TorsoLandmark::kNeck:
      return single(Joint::kNeck);
    case TorsoLandmark::kRightShoulder:
      return single(Joint::kRightShoulder);
    case TorsoLandmark::kLeftShoulder:
      return single(Joint::kLeftShoulder);
    case TorsoLandmark::kRightHip:
      return single(Joint::kRightHip);
    case TorsoLandmark::kLeftHip:
      return single(Joint::kLeftHip);
    case TorsoLandmark::kMidShoulder:
      return midpoint(Joint::kRightShoulder, Joint::kLeftShoulder);
    case TorsoLandmark::kMidHip:
      return midpoint(Joint::kRightHip, Joint::kLeftHip);
  }
  return std::nullopt;
}

std::vector<Correspondence> TorsoCorrespondences(
    const LandmarkSet& person, const LandmarkSet& model,
    std::span<const TorsoLandmark> subset, double threshold) {
  std::vector<Correspondence> out;
  for (TorsoLandmark l : subset) {
    const auto target = ResolveTorsoLandmark(person, l, threshold);
    const auto source = ResolveTorsoLandmark(model, l, threshold);
    if (target && source) out.push_back({*target, *source});
  }
  return out;
}

void TryOnInputs::Validate() const {
  CheckSameSize(model_image, garment_mask, "model image and garment mask");
  CheckSameSize(model_image, model_parse, "model image and model parse");
  CheckSameSize(person_image, person_parse, "person image and person parse");
  CheckSameSize(person_image, person_upper_mask, "person image and upper-body mask");
  if (target_mask) {
    CheckSameSize(person_image, *target_mask, "person image and target mask");
  }
  if (model_image.empty() || person_image.empty()) {
    throw InputError("empty model or person image");
  }
}

const char* ToString(CompositeOrder order) {
  return order == CompositeOrder::kSleevesOverTorso ? "sleeves-over-torso"
                                                    : "torso-over-sleeves";
}

const char* ToString(InpaintMode mode) {
  return mode == InpaintMode::kLiteral ? "literal" : "extended";
}

void PipelineOptions::Validate() const {
  atag.Validate();
  if (!(tps_lambda >= 0.0) || !std::isfinite(tps_lambda)) {
    throw InputError("TPS lambda must be finite and non-negative");
  }
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw InputError("confidence threshold must lie in [0, 1]");
  }
  if (torso_landmarks.empty()) throw InputError("empty torso landmark subset");
}

std::array<BinaryMask, 3> TargetRegions(const TryOnInputs& inputs) {
  const BinaryMask& region =
      inputs.target_mask ? *inputs.target_mask : inputs.person_upper_mask;
  return SplitByParse(region, inputs.person_parse);
}

PartWarp WarpPart(const TryOnInputs& inputs, const PipelineOptions& options,
                  const GarmentParts& garment, const BinaryMask& target_region,
                  GarmentPart part) {
  const int w = inputs.person_image.width();
  const int h = inputs.person_image.height();
  PartWarp warp;
  warp.part = part;
  warp.target_region = target_region;
  CheckSameSize(inputs.person_image, target_region, "person image and part region");

  if (part == GarmentPart::kTorso) {
    const auto corrs = TorsoCorrespondences(inputs.person_landmarks,
                                            inputs.model_landmarks,
                                            options.torso_landmarks,
                                            options.confidence_threshold);
    const TpsModel model = FitTps(corrs, options.tps_lambda);
    warp.map = TpsField(target_region, model);
  } else {
    const ArmSide side =
        part == GarmentPart::kLeftSleeve ? ArmSide::kLeft : ArmSide::kRight;
    const ArmChain target =
        ArmChainFrom(inputs.person_landmarks, side, options.confidence_threshold);
    const ArmChain source =
        ArmChainFrom(inputs.model_landmarks, side, options.confidence_threshold);
    const AtagTransform transform(AtagCorrespondence{target, source}, options.atag);
    warp.flexion = transform.TargetFlexion();
    warp.map = AtagField(target_region, transform);
  }
  if (warp.map.width() != w || warp.map.height() != h) {
    throw DimensionMismatchError("source map does not match the person frame");
  }
  warp.output = BackwardWarp(garment.image(part), garment.mask(part), warp.map);
  warp.warped = true;
  return warp;
}

PartWarps WarpParts(const TryOnInputs& inputs, const PipelineOptions& options) {
  inputs.Validate();
  options.Validate();

  PartWarps warps;
  warps.garment =
      SplitGarment(inputs.model_image, inputs.garment_mask, inputs.model_parse);
  const auto regions = TargetRegions(inputs);

  const int w = inputs.person_image.width();
  const int h = inputs.person_image.height();
  warps.mapped = BinaryMask(w, h);
  for (GarmentPart p : kGarmentParts) {
    PartWarp& warp = warps.parts[int(p)];
    warp.part = p;
    warp.target_region = regions[int(p)];
    warp.map = SourceMap(w, h);
    warp.output = {ImageBuffer(w, h, inputs.model_image.channels()),
                   BinaryMask(w, h), BinaryMask(w, h)};
    if (warp.target_region.Empty()) continue;
    try {
      warp = WarpPart(inputs, options, warps.garment, regions[int(p)], p);
    } catch (const AbsentLandmarkError& e) {
      if (p == GarmentPart::kTorso) throw;
      warps.warnings.push_back(std::string(PartName(p)) + " skipped: " + e.what());
      continue;
    }
    if (warp.flexion && *warp.flexion > options.atag.flexion_warn_limit) {
      std::ostringstream msg;
      msg << PartName(p) << ": target elbow flexion " << *warp.flexion * 180.0 / kPi
          << " deg exceeds limit " << options.atag.flexion_warn_limit * 180.0 / kPi
          << " deg";
      warps.warnings.push_back(msg.str());
    }
    warps.mapped = Or(warps.mapped, warp.target_region);
  }
  if (warps.mapped.Empty()) {
    throw InputError("no garment part could be warped onto the person");
  }
  return warps;
}

BinaryMask ComputeOccluded(std::span<const BinaryMask> part_holes,
                           const BinaryMask& mapped, const BinaryMask* target_mask) {
  BinaryMask holes(mapped.width(), mapped.height());
  for (const BinaryMask& h : part_holes) holes = Or(holes, h);
  if (target_mask == nullptr) return And(holes, mapped);
  CheckSameSize(mapped, *target_mask, "mapped region and target mask");
  return And(Or(holes, Minus(*target_mask, mapped)), *target_mask);
}

WarpResult ComposeResult(const TryOnInputs& inputs, const PartWarps& warps,
                         const BinaryMask& occluded, const PipelineOptions& options) {
  const BinaryMask& upper = inputs.person_upper_mask;
  const BinaryMask& base = inputs.target_mask ? *inputs.target_mask : upper;
  CheckSameSize(base, occluded, "target region and occluded mask");

  WarpResult result;
  result.occluded = occluded;
  result.warp_mask = Minus(base, occluded);

  std::array<BinaryMask, 3> layer_masks;
  for (GarmentPart p : kGarmentParts) {
    const PartWarp& warp = warps.part(p);
    result.part_masks[int(p)] = And(result.warp_mask, warp.target_region);
    result.per_part[int(p)] = warp.output;
    layer_masks[int(p)] = And(result.part_masks[int(p)], warp.output.valid);
  }

  std::vector<Layer> layers;
  const auto push = [&](GarmentPart p) {
    layers.push_back({&warps.part(p).output.image, &layer_masks[int(p)]});
  };
  if (options.composite_order == CompositeOrder::kSleevesOverTorso) {
    push(GarmentPart::kTorso);
    push(GarmentPart::kLeftSleeve);
    push(GarmentPart::kRightSleeve);
  } else {
    push(GarmentPart::kLeftSleeve);
    push(GarmentPart::kRightSleeve);
    push(GarmentPart::kTorso);
  }
  result.warped_garment = ApplyMask(Composite(layers), result.warp_mask);

  if (options.inpaint_mode == InpaintMode::kLiteral) {
    result.inpaint_mask = Or(Not(upper), Not(occluded));
  } else {
    const BinaryMask predict =
        Or(And(upper, occluded), Minus(upper, result.warp_mask));
    result.inpaint_mask = Not(predict);
  }

  // Naive preview: upper body cleared, warped garment pasted on top.
  ImageBuffer preview = ConvertChannels(inputs.person_image, 3);
  const ImageBuffer garment_rgb = ConvertChannels(result.warped_garment, 3);
  for (int y = 0; y < preview.height(); ++y) {
    for (int x = 0; x < preview.width(); ++x) {
      const bool paste = result.warp_mask.get(x, y);
      if (!paste && !upper.get(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        preview.at(x, y, c) = paste ? garment_rgb.at(x, y, c) : 0;
      }
    }
  }
  result.preview = std::move(preview);
  return result;
}

PipelineRun RunPipeline(const TryOnInputs& inputs, const PipelineOptions& options) {
  PipelineRun run;
  run.warps = WarpParts(inputs, options);
  std::array<BinaryMask, 3> holes;
  for (GarmentPart p : kGarmentParts) holes[int(p)] = run.warps.part(p).output.holes;
  const BinaryMask occluded =
      ComputeOccluded(holes, run.warps.mapped,
                      inputs.target_mask ? &*inputs.target_mask : nullptr);
  run.result = ComposeResult(inputs, run.warps, occluded, options);
  return run;
}

}  // namespace atagwarp
