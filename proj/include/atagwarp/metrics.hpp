#pragma once

#include <vector>

#include "atagwarp/raster.hpp"

namespace atagwarp {

struct SsimParams {
  int window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  void Validate() const;
};

// Luma (0.299, 0.587, 0.114) for color images, the sample itself for
// single-channel ones. Alpha is ignored.
std::vector<double> ToGray(const ImageBuffer& image);

// Per-pixel SSIM with Gaussian windows. Windows are cut at the image border
// and their weights renormalized, so every pixel has a score.
std::vector<double> SsimMap(const ImageBuffer& a, const ImageBuffer& b,
                            const SsimParams& params = {});

// Mean SSIM over the pixels of `roi` (whole frame when null).
double Ssim(const ImageBuffer& a, const ImageBuffer& b,
            const SsimParams& params = {}, const BinaryMask* roi = nullptr);

struct PixelStats {
  double mae = 0.0;
  double rmse = 0.0;
  // +infinity for identical inputs.
  double psnr = 0.0;
};

// Errors over every channel of the roi pixels.
PixelStats ComputePixelStats(const ImageBuffer& a, const ImageBuffer& b,
                             const BinaryMask* roi = nullptr);

}  // namespace atagwarp
