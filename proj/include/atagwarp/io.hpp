#pragma once

#include <filesystem>

#include "atagwarp/pipeline.hpp"
#include "atagwarp/raster.hpp"

namespace atagwarp {

// 8-bit PNG. Palette images are expanded, 16-bit samples stripped and
// gray+alpha becomes RGBA.
ImageBuffer ReadPng(const std::filesystem::path& path);
void WritePng(const std::filesystem::path& path, const ImageBuffer& image);

// Any sample >= 128 is set (multi-channel files are reduced to luma first).
BinaryMask ReadMask(const std::filesystem::path& path);
// 0 / 255 single-channel PNG.
void WriteMask(const std::filesystem::path& path, const BinaryMask& mask);

// Single-channel PNG of label codes: 0 background, 1 torso, 2 left arm,
// 3 right arm, 4 other.
LabelMap ReadLabelMap(const std::filesystem::path& path);
void WriteLabelMap(const std::filesystem::path& path, const LabelMap& labels);

// {"keypoints": [[x, y, confidence], ...]} with 18 entries in skeleton order.
LandmarkSet ReadLandmarks(const std::filesystem::path& path);
void WriteLandmarks(const std::filesystem::path& path, const LandmarkSet& landmarks);

}  // namespace atagwarp
