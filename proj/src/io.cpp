#include "atagwarp/io.hpp"

#include <png.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>

#include "atagwarp/errors.hpp"

namespace atagwarp {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr Open(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw InputError("cannot open " + path.string());
  return f;
}

[[noreturn]] void PngError(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what != nullptr) *what = message;
  longjmp(png_jmpbuf(png), 1);
}

void PngWarning(png_structp, png_const_charp) {}

}  // namespace

ImageBuffer ReadPng(const std::filesystem::path& path) {
  FilePtr file = Open(path, "rb");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8)) {
    throw InputError(path.string() + " is not a PNG file");
  }
  std::string message;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, PngError, PngWarning);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("libpng initialisation failed");
  }

  // Everything touched after setjmp lives in storage declared before it.
  std::vector<uint8_t> data;
  std::vector<png_bytep> rows;
  int width = 0, height = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("cannot decode " + path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  width = static_cast<int>(png_get_image_width(png, info));
  height = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  if (channels == 2) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("unsupported PNG layout in " + path.string());
  }
  data.resize(static_cast<size_t>(width) * height * channels);
  rows.resize(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = data.data() + static_cast<size_t>(y) * width * channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return ImageBuffer(width, height, channels, std::move(data));
}

void WritePng(const std::filesystem::path& path, const ImageBuffer& image) {
  if (image.empty()) throw InputError("refusing to write an empty image");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  FilePtr file = Open(path, "wb");
  std::string message;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, PngError, PngWarning);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw InputError("libpng initialisation failed");
  }
  std::vector<png_bytep> rows(image.height());
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InputError("cannot encode " + path.string() + ": " + message);
  }
  png_init_io(png, file.get());
  const int color = image.channels() == 1   ? PNG_COLOR_TYPE_GRAY
                    : image.channels() == 3 ? PNG_COLOR_TYPE_RGB
                                            : PNG_COLOR_TYPE_RGBA;
  png_set_IHDR(png, info, image.width(), image.height(), 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y) {
    rows[y] = const_cast<png_bytep>(image.data().data() +
                                    static_cast<size_t>(y) * image.width() *
                                        image.channels());
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

BinaryMask ReadMask(const std::filesystem::path& path) {
  const ImageBuffer gray = ConvertChannels(ReadPng(path), 1);
  BinaryMask mask(gray.width(), gray.height());
  for (size_t i = 0; i < mask.size(); ++i) mask.set_index(i, gray.data()[i] >= 128);
  return mask;
}

void WriteMask(const std::filesystem::path& path, const BinaryMask& mask) {
  ImageBuffer image(mask.width(), mask.height(), 1);
  for (size_t i = 0; i < mask.size(); ++i) {
    image.data()[i] = mask.get_index(i) ? 255 : 0;
  }
  WritePng(path, image);
}

LabelMap ReadLabelMap(const std::filesystem::path& path) {
  const ImageBuffer image = ReadPng(path);
  if (image.channels() != 1) {
    throw InputError(path.string() + ": part-parse maps must be single-channel");
  }
  return LabelMap(image.width(), image.height(), image.data());
}

void WriteLabelMap(const std::filesystem::path& path, const LabelMap& labels) {
  WritePng(path, ImageBuffer(labels.width(), labels.height(), 1, labels.labels()));
}

LandmarkSet ReadLandmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("keypoints") || !doc["keypoints"].is_array()) {
    throw InputError(path.string() + ": missing \"keypoints\" array");
  }
  const auto& arr = doc["keypoints"];
  if (arr.size() != kNumJoints) {
    throw InputError(path.string() + ": expected 18 keypoints, got " +
                     std::to_string(arr.size()));
  }
  std::array<Keypoint, kNumJoints> kp{};
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& t = arr[i];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number() || !t[1].is_number() ||
        !t[2].is_number()) {
      throw InputError(path.string() + ": keypoint " + std::to_string(i) +
                       " is not an [x, y, confidence] triple");
    }
    kp[i] = {{t[0].get<double>(), t[1].get<double>()}, t[2].get<double>()};
  }
  return LandmarkSet(kp);
}

void WriteLandmarks(const std::filesystem::path& path, const LandmarkSet& landmarks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Keypoint& k : landmarks.keypoints()) {
    arr.push_back({k.position.x, k.position.y, k.confidence});
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << nlohmann::json{{"keypoints", arr}}.dump(2) << "\n";
}

}  // namespace atagwarp
