#include "atagwarp/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "atagwarp/errors.hpp"

namespace atagwarp {

void ThrowSizeMismatch(const char* what, int wa, int ha, int wb, int hb) {
  throw DimensionMismatchError(std::string(what) + ": " + std::to_string(wa) +
                               "x" + std::to_string(ha) + " vs " +
                               std::to_string(wb) + "x" + std::to_string(hb));
}

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : ImageBuffer(width, height, channels,
                  std::vector<uint8_t>(static_cast<size_t>(std::max(width, 0)) *
                                       std::max(height, 0) *
                                       std::max(channels, 0))) {}

ImageBuffer::ImageBuffer(int width, int height, int channels,
                         std::vector<uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 0 || height < 0) throw InputError("negative image size");
  if (channels != 1 && channels != 3 && channels != 4) {
    throw InputError("unsupported channel count " + std::to_string(channels));
  }
  if (data_.size() != static_cast<size_t>(width) * height * channels) {
    throw InputError("image data length does not match its dimensions");
  }
}

BinaryMask::BinaryMask(int width, int height, bool value)
    : width_(width),
      height_(height),
      bits_(static_cast<size_t>(std::max(width, 0)) * std::max(height, 0),
            value ? 1 : 0) {
  if (width < 0 || height < 0) throw InputError("negative mask size");
}

size_t BinaryMask::Count() const {
  return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

SourceMap::SourceMap(int width, int height)
    : width_(width),
      height_(height),
      entries_(static_cast<size_t>(std::max(width, 0)) * std::max(height, 0)) {}

void SourceMap::set(int x, int y, Point2 source) {
  if (!IsFinite(source)) {
    throw DegenerateGeometryError("non-finite source coordinate");
  }
  entries_[static_cast<size_t>(y) * width_ + x] = source;
}

size_t SourceMap::MappedCount() const {
  return static_cast<size_t>(std::count_if(
      entries_.begin(), entries_.end(), [](const auto& e) { return e.has_value(); }));
}

BinaryMask SourceMap::MappedMask() const {
  BinaryMask mask(width_, height_);
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i]) mask.set_index(i);
  }
  return mask;
}

namespace {

bool InsideClampMargin(const ImageBuffer& image, Point2 p) {
  return p.x >= -0.5 && p.y >= -0.5 && p.x <= image.width() - 0.5 &&
         p.y <= image.height() - 0.5;
}

uint8_t RoundHalfUp(double v) {
  return static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

std::optional<Color> SampleBilinear(const ImageBuffer& image, Point2 p) {
  if (image.empty() || !IsFinite(p) || !InsideClampMargin(image, p)) {
    return std::nullopt;
  }
  const double x = std::clamp(p.x, 0.0, image.width() - 1.0);
  const double y = std::clamp(p.y, 0.0, image.height() - 1.0);
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;

  Color out{};
  for (int c = 0; c < image.channels(); ++c) {
    const double top = (1.0 - fx) * image.at(x0, y0, c) + fx * image.at(x1, y0, c);
    const double bottom = (1.0 - fx) * image.at(x0, y1, c) + fx * image.at(x1, y1, c);
    out[c] = RoundHalfUp((1.0 - fy) * top + fy * bottom);
  }
  return out;
}

WarpOutput BackwardWarp(const ImageBuffer& source, const BinaryMask& source_mask,
                        const SourceMap& map) {
  CheckSameSize(source, source_mask, "source image and source mask");
  WarpOutput out{ImageBuffer(map.width(), map.height(), source.channels()),
                 BinaryMask(map.width(), map.height()),
                 BinaryMask(map.width(), map.height())};

  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto& entry = map.at(x, y);
      if (!entry) continue;
      const Point2 p = *entry;
      if (!InsideClampMargin(source, p)) {
        out.holes.set(x, y);
        continue;
      }
      const int nx = std::clamp(static_cast<int>(std::floor(p.x + 0.5)), 0,
                                source.width() - 1);
      const int ny = std::clamp(static_cast<int>(std::floor(p.y + 0.5)), 0,
                                source.height() - 1);
      if (!source_mask.get(nx, ny)) {
        out.holes.set(x, y);
        continue;
      }
      const Color color = *SampleBilinear(source, p);
      for (int c = 0; c < source.channels(); ++c) out.image.at(x, y, c) = color[c];
      out.valid.set(x, y);
    }
  }
  return out;
}

namespace {

template <typename Op>
BinaryMask Elementwise(const BinaryMask& a, const BinaryMask& b, Op op) {
  CheckSameSize(a, b, "mask operands");
  BinaryMask out(a.width(), a.height());
  for (size_t i = 0; i < a.size(); ++i) {
    out.set_index(i, op(a.get_index(i), b.get_index(i)));
  }
  return out;
}

}  // namespace

BinaryMask And(const BinaryMask& a, const BinaryMask& b) {
  return Elementwise(a, b, [](bool p, bool q) { return p && q; });
}

BinaryMask Or(const BinaryMask& a, const BinaryMask& b) {
  return Elementwise(a, b, [](bool p, bool q) { return p || q; });
}

BinaryMask Minus(const BinaryMask& a, const BinaryMask& b) {
  return Elementwise(a, b, [](bool p, bool q) { return p && !q; });
}

BinaryMask Not(const BinaryMask& a) {
  BinaryMask out(a.width(), a.height());
  for (size_t i = 0; i < a.size(); ++i) out.set_index(i, !a.get_index(i));
  return out;
}

BinaryMask Dilate(const BinaryMask& a, int radius) {
  if (radius < 0) throw InputError("negative dilation radius");
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    }
  }
  BinaryMask out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!a.get(x, y)) continue;
      for (const auto& [dx, dy] : offsets) {
        const int tx = x + dx;
        const int ty = y + dy;
        if (tx >= 0 && ty >= 0 && tx < a.width() && ty < a.height()) {
          out.set(tx, ty);
        }
      }
    }
  }
  return out;
}

namespace {

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), in place.
void DistanceTransform1D(std::vector<double>& f, std::vector<double>& d,
                         std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const auto intersection = [&f](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) -
            (f[p] + static_cast<double>(p) * p)) /
           (2.0 * (q - p));
  };
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = intersection(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersection(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double diff = q - v[k];
    d[q] = diff * diff + f[v[k]];
  }
  std::copy(d.begin(), d.begin() + n, f.begin());
}

}  // namespace

std::vector<double> SquaredDistanceTransform(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const double kFar = 1e20;
  std::vector<double> grid(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < grid.size(); ++i) grid[i] = mask.get_index(i) ? 0.0 : kFar;
  if (grid.empty()) return grid;

  const int n = std::max(w, h);
  std::vector<double> f;
  std::vector<double> d(n);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);

  for (int x = 0; x < w; ++x) {
    f.resize(h);
    d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<size_t>(y) * w + x];
    DistanceTransform1D(f, d, v, z);
    for (int y = 0; y < h; ++y) grid[static_cast<size_t>(y) * w + x] = f[y];
  }
  for (int y = 0; y < h; ++y) {
    f.assign(grid.begin() + static_cast<size_t>(y) * w,
             grid.begin() + static_cast<size_t>(y + 1) * w);
    d.resize(w);
    DistanceTransform1D(f, d, v, z);
    std::copy(f.begin(), f.end(), grid.begin() + static_cast<size_t>(y) * w);
  }
  for (double& g : grid) {
    if (g >= kFar / 2) g = std::numeric_limits<double>::infinity();
  }
  return grid;
}

ImageBuffer Composite(std::span<const Layer> layers) {
  if (layers.empty()) throw InputError("composite of zero layers");
  const ImageBuffer& first = *layers.front().image;
  ImageBuffer out(first.width(), first.height(), first.channels());
  for (const Layer& layer : layers) {
    CheckSameSize(first, *layer.image, "composite layer image");
    CheckSameSize(first, *layer.mask, "composite layer mask");
    if (layer.image->channels() != first.channels()) {
      throw DimensionMismatchError("composite layers differ in channel count");
    }
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        if (!layer.mask->get(x, y)) continue;
        for (int c = 0; c < out.channels(); ++c) {
          out.at(x, y, c) = layer.image->at(x, y, c);
        }
      }
    }
  }
  return out;
}

ImageBuffer ConvertChannels(const ImageBuffer& image, int channels) {
  if (image.channels() == channels) return image;
  ImageBuffer out(image.width(), image.height(), channels);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (channels == 1) {
        out.at(x, y, 0) = RoundHalfUp(0.299 * image.at(x, y, 0) +
                                      0.587 * image.at(x, y, 1) +
                                      0.114 * image.at(x, y, 2));
        continue;
      }
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = image.at(x, y, image.channels() == 1 ? 0 : c);
      }
      if (channels == 4) {
        out.at(x, y, 3) = image.channels() == 4 ? image.at(x, y, 3) : 255;
      }
    }
  }
  return out;
}

ImageBuffer ApplyMask(const ImageBuffer& image, const BinaryMask& mask) {
  CheckSameSize(image, mask, "image and mask");
  ImageBuffer out(image.width(), image.height(), image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!mask.get(x, y)) continue;
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.at(x, y, c);
    }
  }
  return out;
}

}  // namespace atagwarp
