#include "atagwarp/metrics.hpp"

#include <cmath>
#include <limits>

#include "atagwarp/errors.hpp"

namespace atagwarp {

void SsimParams::Validate() const {
  if (window < 3 || window % 2 == 0) {
    throw InputError("SSIM window must be odd and at least 3");
  }
  if (!(gaussian_sigma > 0.0)) throw InputError("SSIM sigma must be positive");
  if (!(dynamic_range > 0.0)) throw InputError("SSIM dynamic range must be positive");
}

std::vector<double> ToGray(const ImageBuffer& image) {
  std::vector<double> gray(static_cast<size_t>(image.width()) * image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      double v;
      if (image.channels() == 1) {
        v = image.at(x, y, 0);
      } else {
        v = 0.299 * image.at(x, y, 0) + 0.587 * image.at(x, y, 1) +
            0.114 * image.at(x, y, 2);
      }
      gray[static_cast<size_t>(y) * image.width() + x] = v;
    }
  }
  return gray;
}

namespace {

void CheckComparable(const ImageBuffer& a, const ImageBuffer& b) {
  CheckSameSize(a, b, "compared images");
  if (a.channels() != b.channels()) {
    throw DimensionMismatchError("compared images differ in channel count");
  }
}

std::vector<double> GaussianKernel(int window, double sigma) {
  std::vector<double> k(window);
  const int half = window / 2;
  for (int i = 0; i < window; ++i) {
    const double d = i - half;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return k;
}

// Separable weighted mean with the window clipped to the image.
std::vector<double> Blur(const std::vector<double>& in, int w, int h,
                         const std::vector<double>& kernel) {
  const int half = static_cast<int>(kernel.size()) / 2;
  std::vector<double> tmp(in.size());
  std::vector<double> out(in.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0, norm = 0.0;
      for (int i = -half; i <= half; ++i) {
        const int xx = x + i;
        if (xx < 0 || xx >= w) continue;
        sum += kernel[i + half] * in[static_cast<size_t>(y) * w + xx];
        norm += kernel[i + half];
      }
      tmp[static_cast<size_t>(y) * w + x] = sum / norm;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double sum = 0.0, norm = 0.0;
      for (int i = -half; i <= half; ++i) {
        const int yy = y + i;
        if (yy < 0 || yy >= h) continue;
        sum += kernel[i + half] * tmp[static_cast<size_t>(yy) * w + x];
        norm += kernel[i + half];
      }
      out[static_cast<size_t>(y) * w + x] = sum / norm;
    }
  }
  return out;
}

}  // namespace

std::vector<double> SsimMap(const ImageBuffer& a, const ImageBuffer& b,
                            const SsimParams& params) {
  params.Validate();
  CheckComparable(a, b);
  const int w = a.width();
  const int h = a.height();
  const std::vector<double> ga = ToGray(a);
  const std::vector<double> gb = ToGray(b);
  std::vector<double> aa(ga.size()), bb(ga.size()), ab(ga.size());
  for (size_t i = 0; i < ga.size(); ++i) {
    aa[i] = ga[i] * ga[i];
    bb[i] = gb[i] * gb[i];
    ab[i] = ga[i] * gb[i];
  }
  const auto kernel = GaussianKernel(params.window, params.gaussian_sigma);
  const auto mu_a = Blur(ga, w, h, kernel);
  const auto mu_b = Blur(gb, w, h, kernel);
  const auto e_aa = Blur(aa, w, h, kernel);
  const auto e_bb = Blur(bb, w, h, kernel);
  const auto e_ab = Blur(ab, w, h, kernel);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  std::vector<double> map(ga.size());
  for (size_t i = 0; i < map.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    map[i] = ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2));
  }
  return map;
}

double Ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params,
            const BinaryMask* roi) {
  CheckComparable(a, b);
  if (roi != nullptr) CheckSameSize(a, *roi, "SSIM region");
  const std::vector<double> map = SsimMap(a, b, params);
  double sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < map.size(); ++i) {
    if (roi != nullptr && !roi->get_index(i)) continue;
    sum += map[i];
    ++count;
  }
  if (count == 0) throw InputError("SSIM over an empty region");
  return sum / count;
}

PixelStats ComputePixelStats(const ImageBuffer& a, const ImageBuffer& b,
                             const BinaryMask* roi) {
  CheckComparable(a, b);
  if (roi != nullptr) CheckSameSize(a, *roi, "statistics region");
  double abs_sum = 0.0, sq_sum = 0.0;
  size_t count = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (roi != nullptr && !roi->get(x, y)) continue;
      for (int c = 0; c < a.channels(); ++c) {
        const double d = double(a.at(x, y, c)) - double(b.at(x, y, c));
        abs_sum += std::abs(d);
        sq_sum += d * d;
        ++count;
      }
    }
  }
  if (count == 0) throw InputError("pixel statistics over an empty region");
  PixelStats stats;
  stats.mae = abs_sum / count;
  stats.rmse = std::sqrt(sq_sum / count);
  stats.psnr = stats.rmse == 0.0 ? std::numeric_limits<double>::infinity()
                                 : 20.0 * std::log10(255.0 / stats.rmse);
  return stats;
}

}  // namespace atagwarp
