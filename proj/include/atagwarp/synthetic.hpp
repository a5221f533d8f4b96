#pragma once

#include <cstdint>
#include <random>

#include "atagwarp/pipeline.hpp"

namespace atagwarp {

// Pose of a simple frontal figure. "Left" is the figure's left, which lands
// on the right side of the image.
struct SyntheticPose {
  Point2 nose;
  Point2 neck;
  Point2 right_shoulder, right_elbow, right_wrist;
  Point2 left_shoulder, left_elbow, left_wrist;
  Point2 right_hip, left_hip;
};

struct SyntheticStyle {
  uint32_t seed = 1;
  double arm_thickness = 18.0;
  // Sleeve length as a fraction of the whole arm (upper + lower bone).
  double sleeve_fraction = 0.75;
};

struct SyntheticSample {
  ImageBuffer image;
  LandmarkSet landmarks;
  LabelMap parse;
  BinaryMask garment;
  BinaryMask upper_body;
};

SyntheticPose RandomPose(std::mt19937& rng, int width = 192, int height = 256);

SyntheticStyle RandomStyle(std::mt19937& rng);

SyntheticSample RenderSynthetic(const SyntheticPose& pose, const SyntheticStyle& style,
                                int width = 192, int height = 256);

// Arm-chain band (union of two rectangles of the given thickness, one per
// bone) filled with a stripe/checker texture that encodes position along the
// chain.
struct Band {
  ImageBuffer image;
  BinaryMask mask;
};

Band RenderBand(const ArmChain& chain, double thickness, int width, int height);

}  // namespace atagwarp
