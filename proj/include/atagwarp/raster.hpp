#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "atagwarp/geometry.hpp"

namespace atagwarp {

// Row-major 8-bit image with 1, 3 or 4 interleaved channels.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels);
  ImageBuffer(int width, int height, int channels, std::vector<uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  uint8_t at(int x, int y, int c) const {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  uint8_t& at(int x, int y, int c) {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  const std::vector<uint8_t>& data() const { return data_; }
  std::vector<uint8_t>& data() { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<uint8_t> data_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool value = false);

  int width() const { return width_; }
  int height() const { return height_; }

  bool get(int x, int y) const {
    return bits_[static_cast<size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value = true) {
    bits_[static_cast<size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  bool get_index(size_t i) const { return bits_[i] != 0; }
  void set_index(size_t i, bool value = true) { bits_[i] = value ? 1 : 0; }

  size_t size() const { return bits_.size(); }
  size_t Count() const;
  bool Empty() const { return Count() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> bits_;
};

// Backward warp field: for each target pixel either the source coordinate to
// sample from, or nothing (a hole).
class SourceMap {
 public:
  SourceMap() = default;
  SourceMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  const std::optional<Point2>& at(int x, int y) const {
    return entries_[static_cast<size_t>(y) * width_ + x];
  }
  void set(int x, int y, Point2 source);

  size_t MappedCount() const;
  BinaryMask MappedMask() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::optional<Point2>> entries_;
};

// Sample value with unused trailing channels left at zero.
using Color = std::array<uint8_t, 4>;

// Bilinear sample with clamp-to-edge inside the half-pixel margin around the
// image. Returns nullopt further out.
std::optional<Color> SampleBilinear(const ImageBuffer& image, Point2 p);

struct WarpOutput {
  ImageBuffer image;
  BinaryMask valid;
  BinaryMask holes;
};

// Pulls every mapped target pixel from `source`. A pixel whose source
// location is outside the image or whose nearest source pixel is not in
// `source_mask` becomes a hole instead.
WarpOutput BackwardWarp(const ImageBuffer& source, const BinaryMask& source_mask,
                        const SourceMap& map);

BinaryMask And(const BinaryMask& a, const BinaryMask& b);
BinaryMask Or(const BinaryMask& a, const BinaryMask& b);
BinaryMask Not(const BinaryMask& a);
// a and not b.
BinaryMask Minus(const BinaryMask& a, const BinaryMask& b);
// Dilation by a disc of the given radius (offsets with dx^2 + dy^2 <= r^2).
BinaryMask Dilate(const BinaryMask& a, int radius);

// Exact squared Euclidean distance from every pixel to the nearest set pixel
// of `mask`; +inf everywhere when the mask is empty.
std::vector<double> SquaredDistanceTransform(const BinaryMask& mask);

struct Layer {
  const ImageBuffer* image;
  const BinaryMask* mask;
};

// Paints layers in order over a zero background; later layers win.
ImageBuffer Composite(std::span<const Layer> layers);

// Converts between gray, RGB and RGBA (gray is replicated, alpha dropped or
// set opaque).
ImageBuffer ConvertChannels(const ImageBuffer& image, int channels);

// Copy of `image` with every pixel outside `mask` set to zero.
ImageBuffer ApplyMask(const ImageBuffer& image, const BinaryMask& mask);

void ThrowSizeMismatch(const char* what, int wa, int ha, int wb, int hb);

template <typename A, typename B>
void CheckSameSize(const A& a, const B& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    ThrowSizeMismatch(what, a.width(), a.height(), b.width(), b.height());
  }
}

}  // namespace atagwarp
