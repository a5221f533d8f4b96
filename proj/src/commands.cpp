#include "atagwarp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "atagwarp/errors.hpp"
#include "atagwarp/io.hpp"
#include "atagwarp/metrics.hpp"
#include "atagwarp/synthetic.hpp"

namespace atagwarp {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;

void WriteJson(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

void PrepareOutput(const fs::path& dir) {
  if (dir.empty()) throw InputError("no output directory given");
  fs::create_directories(dir);
}

void DrawLine(ImageBuffer& image, Point2 a, Point2 b, const Color& color) {
  const double len = std::max(1.0, Distance(a, b));
  const int steps = static_cast<int>(std::ceil(len * 2.0));
  for (int i = 0; i <= steps; ++i) {
    const Point2 p = a + (double(i) / steps) * (b - a);
    const int x = static_cast<int>(std::floor(p.x + 0.5));
    const int y = static_cast<int>(std::floor(p.y + 0.5));
    if (x < 0 || y < 0 || x >= image.width() || y >= image.height()) continue;
    for (int c = 0; c < std::min(3, image.channels()); ++c) image.at(x, y, c) = color[c];
  }
}

void DrawChain(ImageBuffer& image, const ArmChain& chain, const Color& color) {
  DrawLine(image, chain.shoulder(), chain.elbow(), color);
  DrawLine(image, chain.elbow(), chain.wrist(), color);
}

// Black -> red -> yellow -> white ramp.
Color HeatColor(double v) {
  v = std::clamp(v, 0.0, 1.0) * 3.0;
  const auto byte = [](double t) {
    return static_cast<uint8_t>(std::clamp(std::floor(t * 255.0 + 0.5), 0.0, 255.0));
  };
  return {byte(std::min(v, 1.0)), byte(std::clamp(v - 1.0, 0.0, 1.0)),
          byte(std::clamp(v - 2.0, 0.0, 1.0)), 0};
}

nlohmann::json PartJson(const PartWarp& warp) {
  nlohmann::json j{{"warped", warp.warped},
                   {"target_pixels", warp.target_region.Count()},
                   {"valid_pixels", warp.output.valid.Count()},
                   {"hole_pixels", warp.output.holes.Count()}};
  if (warp.flexion) j["target_flexion_deg"] = *warp.flexion * kRadToDeg;
  return j;
}

// Covered length walking from `from` towards `to` while `mask` stays set.
double CoveredLength(const BinaryMask& mask, Point2 from, Point2 to) {
  const double total = Distance(from, to) * 4.0;
  const Point2 dir = (1.0 / Distance(from, to)) * (to - from);
  double covered = 0.0;
  for (double s = 0.0; s <= total; s += 0.25) {
    const Point2 p = from + s * dir;
    const int x = static_cast<int>(std::floor(p.x + 0.5));
    const int y = static_cast<int>(std::floor(p.y + 0.5));
    if (x < 0 || y < 0 || x >= mask.width() || y >= mask.height() || !mask.get(x, y)) {
      break;
    }
    covered = s;
  }
  return covered;
}

std::pair<double, double> SelfCheck(const ImageBuffer& person, const WarpResult& result) {
  if (result.warp_mask.Empty()) return {0.0, 0.0};
  const ImageBuffer reference = ApplyMask(
      ConvertChannels(person, result.warped_garment.channels()), result.warp_mask);
  const double ssim = Ssim(result.warped_garment, reference, {}, &result.warp_mask);
  const double mae =
      ComputePixelStats(result.warped_garment, reference, &result.warp_mask).mae;
  return {ssim, mae};
}

}  // namespace

void JobConfig::FillFromSample(const fs::path& dir) {
  const auto fill = [&dir](fs::path& field, const char* name, const char* fallback) {
    if (!field.empty()) return;
    field = dir / name;
    if (fallback != nullptr && !fs::exists(field)) field = dir / fallback;
  };
  fill(model_image, SampleLayout::kModelImage, nullptr);
  fill(person_image, SampleLayout::kPersonImage, SampleLayout::kModelImage);
  fill(model_keypoints, SampleLayout::kModelKeypoints, nullptr);
  fill(person_keypoints, SampleLayout::kPersonKeypoints, SampleLayout::kModelKeypoints);
  fill(garment_mask, SampleLayout::kGarmentMask, nullptr);
  fill(model_parse, SampleLayout::kModelParse, nullptr);
  fill(person_parse, SampleLayout::kPersonParse, SampleLayout::kModelParse);
  fill(upper_mask, SampleLayout::kUpperMask, nullptr);
  if (!target_mask && fs::exists(dir / SampleLayout::kTargetMask)) {
    target_mask = dir / SampleLayout::kTargetMask;
  }
}

void JobConfig::Validate() const {
  const std::vector<std::pair<const char*, const fs::path*>> required = {
      {"model image", &model_image},         {"person image", &person_image},
      {"model keypoints", &model_keypoints}, {"person keypoints", &person_keypoints},
      {"garment mask", &garment_mask},       {"model parse", &model_parse},
      {"person parse", &person_parse},       {"upper-body mask", &upper_mask}};
  for (const auto& [name, path] : required) {
    if (path->empty()) throw InputError(std::string("missing ") + name + " path");
    if (!fs::is_regular_file(*path)) {
      throw InputError(std::string(name) + " not found: " + path->string());
    }
  }
  if (target_mask && !fs::is_regular_file(*target_mask)) {
    throw InputError("target mask not found: " + target_mask->string());
  }
  options.Validate();
}

TryOnInputs LoadInputs(const JobConfig& config) {
  config.Validate();
  TryOnInputs in;
  in.model_image = ReadPng(config.model_image);
  in.person_image = ReadPng(config.person_image);
  // The garment keeps the model's color layout; gray photos become RGB.
  if (in.model_image.channels() == 1) in.model_image = ConvertChannels(in.model_image, 3);
  if (in.person_image.channels() == 1) {
    in.person_image = ConvertChannels(in.person_image, 3);
  }
  in.model_landmarks = ReadLandmarks(config.model_keypoints);
  in.person_landmarks = ReadLandmarks(config.person_keypoints);
  in.garment_mask = ReadMask(config.garment_mask);
  in.model_parse = ReadLabelMap(config.model_parse);
  in.person_parse = ReadLabelMap(config.person_parse);
  in.person_upper_mask = ReadMask(config.upper_mask);
  if (config.target_mask) in.target_mask = ReadMask(*config.target_mask);
  in.Validate();
  return in;
}

nlohmann::json ParametersJson(const PipelineOptions& options) {
  nlohmann::json landmarks = nlohmann::json::array();
  for (TorsoLandmark l : options.torso_landmarks) landmarks.push_back(TorsoLandmarkName(l));
  const SsimParams ssim;
  return {{"atag",
           {{"steepness", options.atag.steepness},
            {"flexion_warn_limit_deg", options.atag.flexion_warn_limit * kRadToDeg}}},
          {"tps_lambda", options.tps_lambda},
          {"confidence_threshold", options.confidence_threshold},
          {"torso_landmarks", landmarks},
          {"composite_order", ToString(options.composite_order)},
          {"inpaint_mode", ToString(options.inpaint_mode)},
          {"ssim",
           {{"window", ssim.window},
            {"sigma", ssim.gaussian_sigma},
            {"k1", ssim.k1},
            {"k2", ssim.k2}}}};
}

int RunGuarded(const std::function<void()>& body, std::ostream& err) {
  const auto report = [&err](const char* kind, const std::exception& e, int code) {
    err << "error [" << kind << "]: " << e.what() << "\n";
    return code;
  };
  try {
    body();
    return kExitOk;
  } catch (const AbsentLandmarkError& e) {
    return report("AbsentLandmarkError", e, kExitInput);
  } catch (const DimensionMismatchError& e) {
    return report("DimensionMismatchError", e, kExitInput);
  } catch (const InputError& e) {
    return report("InputError", e, kExitInput);
  } catch (const FitError& e) {
    return report("FitError", e, kExitNumeric);
  } catch (const DegenerateGeometryError& e) {
    return report("DegenerateGeometryError", e, kExitNumeric);
  } catch (const nlohmann::json::exception& e) {
    return report("InputError", e, kExitInput);
  } catch (const fs::filesystem_error& e) {
    return report("InputError", e, kExitInput);
  } catch (const std::exception& e) {
    return report("InternalError", e, 1);
  }
}

nlohmann::json WarpCommand(const JobConfig& config) {
  const TryOnInputs inputs = LoadInputs(config);
  const PipelineRun run = RunPipeline(inputs, config.options);
  const WarpResult& r = run.result;

  PrepareOutput(config.output_dir);
  const fs::path& out = config.output_dir;
  WritePng(out / "warped.png", r.warped_garment);
  WriteMask(out / "warp_mask.png", r.warp_mask);
  WriteMask(out / "occluded.png", r.occluded);
  WriteMask(out / "inpaint_mask.png", r.inpaint_mask);
  WritePng(out / "preview.png", r.preview);
  nlohmann::json parts;
  for (GarmentPart p : kGarmentParts) {
    WritePng(out / (std::string(PartName(p)) + ".png"), r.per_part[int(p)].image);
    parts[PartName(p)] = PartJson(run.warps.part(p));
  }

  const auto [ssim, mae] = SelfCheck(inputs.person_image, r);
  nlohmann::json report{
      {"command", "warp"},
      {"parameters", ParametersJson(config.options)},
      {"target_mask_given", inputs.target_mask.has_value()},
      {"parts", parts},
      {"masks",
       {{"warp_mask_pixels", r.warp_mask.Count()},
        {"occluded_pixels", r.occluded.Count()},
        {"inpaint_predict_pixels", r.inpaint_mask.size() - r.inpaint_mask.Count()}}},
      {"self_check", {{"ssim_vs_person", ssim}, {"mae_vs_person", mae}}},
      {"warnings", run.warps.warnings}};
  WriteJson(out / "report.json", report);
  return report;
}

nlohmann::json WarpPartCommand(const JobConfig& config, GarmentPart part) {
  const TryOnInputs inputs = LoadInputs(config);
  config.options.Validate();
  const GarmentParts garment =
      SplitGarment(inputs.model_image, inputs.garment_mask, inputs.model_parse);
  const auto regions = TargetRegions(inputs);
  const PartWarp warp =
      WarpPart(inputs, config.options, garment, regions[int(part)], part);

  PrepareOutput(config.output_dir);
  const std::string name = PartName(part);
  WritePng(config.output_dir / (name + ".png"), warp.output.image);
  WriteMask(config.output_dir / (name + "_valid.png"), warp.output.valid);
  WriteMask(config.output_dir / (name + "_holes.png"), warp.output.holes);

  nlohmann::json warnings = nlohmann::json::array();
  if (warp.flexion && *warp.flexion > config.options.atag.flexion_warn_limit) {
    warnings.push_back(name + ": target elbow flexion exceeds limit");
  }
  nlohmann::json report{{"command", "warp-" + name},
                        {"parameters", ParametersJson(config.options)},
                        {"part", PartJson(warp)},
                        {"warnings", warnings}};
  WriteJson(config.output_dir / "report.json", report);
  return report;
}

DemoRectResult DemoRectCommand(const DemoRectConfig& config) {
  if (config.width <= 0 || config.height <= 0 || !(config.thickness > 0.0)) {
    throw InputError("demo canvas and band thickness must be positive");
  }
  const AtagTransform transform({config.target, config.source}, config.params);
  const Band band =
      RenderBand(config.source, config.thickness, config.width, config.height);

  DemoRectResult result;
  result.source = band.image;
  result.map = AtagField(BinaryMask(config.width, config.height, true), transform);
  const WarpOutput warped = BackwardWarp(band.image, band.mask, result.map);
  result.warped = warped.image;
  result.warped_valid = warped.valid;

  const ArmChain& s = config.source;
  const ArmChain& t = config.target;
  result.upper_ratio = CoveredLength(warped.valid, t.elbow(), t.shoulder()) /
                       CoveredLength(band.mask, s.elbow(), s.shoulder());
  result.lower_ratio = CoveredLength(warped.valid, t.elbow(), t.wrist()) /
                       CoveredLength(band.mask, s.elbow(), s.wrist());

  const BinaryMask target_band =
      RenderBand(t, config.thickness, config.width, config.height).mask;
  const BinaryMask interior = Not(Dilate(Not(target_band), 1));
  result.interior_holes = Minus(interior, warped.valid).Count();

  result.report = {
      {"command", "demo-rect"},
      {"parameters",
       {{"steepness", config.params.steepness},
        {"thickness", config.thickness},
        {"width", config.width},
        {"height", config.height}}},
      {"expected_upper_ratio", t.UpperLength() / s.UpperLength()},
      {"expected_lower_ratio", t.LowerLength() / s.LowerLength()},
      {"measured_upper_ratio", result.upper_ratio},
      {"measured_lower_ratio", result.lower_ratio},
      {"target_flexion_deg", t.Flexion() * kRadToDeg},
      {"interior_holes", result.interior_holes},
      {"warnings", transform.ExceedsFlexionLimit()
                       ? nlohmann::json::array({"target elbow flexion exceeds limit"})
                       : nlohmann::json::array()}};

  if (!config.output_dir.empty()) {
    PrepareOutput(config.output_dir);
    ImageBuffer left = result.source;
    ImageBuffer right = result.warped;
    DrawChain(left, s, {0, 255, 0, 0});
    DrawChain(right, t, {255, 0, 0, 0});
    const int gap = 4;
    ImageBuffer panel(2 * config.width + gap, config.height, 3);
    std::fill(panel.data().begin(), panel.data().end(), 255);
    for (int y = 0; y < config.height; ++y) {
      for (int x = 0; x < config.width; ++x) {
        for (int c = 0; c < 3; ++c) {
          panel.at(x, y, c) = left.at(x, y, c);
          panel.at(x + config.width + gap, y, c) = right.at(x, y, c);
        }
      }
    }
    WritePng(config.output_dir / "source.png", result.source);
    WritePng(config.output_dir / "warped.png", result.warped);
    WritePng(config.output_dir / "side_by_side.png", panel);
    WriteJson(config.output_dir / "report.json", result.report);
  }
  return result;
}

FieldResult FieldCommand(const FieldConfig& config) {
  FieldResult result;
  ImageBuffer backdrop;
  if (config.job) {
    const TryOnInputs inputs = LoadInputs(*config.job);
    const PartWarps warps = WarpParts(inputs, config.job->options);
    const int w = inputs.person_image.width();
    const int h = inputs.person_image.height();
    result.map = SourceMap(w, h);
    for (GarmentPart p : kGarmentParts) {
      const SourceMap& m = warps.part(p).map;
      if (!warps.part(p).warped) continue;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (m.at(x, y)) result.map.set(x, y, *m.at(x, y));
        }
      }
    }
    backdrop = ConvertChannels(inputs.person_image, 3);
  } else if (config.chains) {
    if (config.width <= 0 || config.height <= 0) throw InputError("bad canvas size");
    result.map = AtagField(BinaryMask(config.width, config.height, true),
                           AtagTransform(*config.chains, config.params));
    backdrop = ImageBuffer(config.width, config.height, 3);
  } else {
    throw InputError("field needs either job inputs or a chain pair");
  }
  if (config.arrow_step <= 0) throw InputError("arrow step must be positive");

  const int w = result.map.width();
  const int h = result.map.height();
  std::vector<double> magnitude(static_cast<size_t>(w) * h, 0.0);
  double max_mag = 0.0, sum_mag = 0.0;
  Point2 sum_d, sum_d2;
  size_t mapped = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto& e = result.map.at(x, y);
      if (!e) continue;
      const Point2 d = *e - Point2{double(x), double(y)};
      const double m = Norm(d);
      magnitude[static_cast<size_t>(y) * w + x] = m;
      max_mag = std::max(max_mag, m);
      sum_mag += m;
      sum_d = sum_d + d;
      sum_d2 = sum_d2 + Point2{d.x * d.x, d.y * d.y};
      ++mapped;
    }
  }

  result.magnitude = ImageBuffer(w, h, 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!result.map.at(x, y) || max_mag == 0.0) continue;
      const Color c = HeatColor(magnitude[static_cast<size_t>(y) * w + x] / max_mag);
      for (int k = 0; k < 3; ++k) result.magnitude.at(x, y, k) = c[k];
    }
  }

  result.arrows = backdrop;
  for (uint8_t& v : result.arrows.data()) v = static_cast<uint8_t>(v / 3 + 60);
  for (int y = config.arrow_step / 2; y < h; y += config.arrow_step) {
    for (int x = config.arrow_step / 2; x < w; x += config.arrow_step) {
      const auto& e = result.map.at(x, y);
      if (!e) continue;
      const Point2 p{double(x), double(y)};
      DrawLine(result.arrows, p, *e, {255, 40, 40, 0});
      DrawLine(result.arrows, p, p, {40, 255, 40, 0});
    }
  }

  const double n = mapped > 0 ? double(mapped) : 1.0;
  const Point2 mean = (1.0 / n) * sum_d;
  result.report = {
      {"command", "field"},
      {"mapped_pixels", mapped},
      {"max_displacement", max_mag},
      {"mean_displacement", sum_mag / n},
      {"mean_displacement_vector", {mean.x, mean.y}},
      {"displacement_stddev",
       {std::sqrt(std::max(0.0, sum_d2.x / n - mean.x * mean.x)),
        std::sqrt(std::max(0.0, sum_d2.y / n - mean.y * mean.y))}}};

  if (!config.output_dir.empty()) {
    PrepareOutput(config.output_dir);
    WritePng(config.output_dir / "field_magnitude.png", result.magnitude);
    WritePng(config.output_dir / "field_arrows.png", result.arrows);
    WriteJson(config.output_dir / "report.json", result.report);
  }
  return result;
}

std::vector<EvalRow> EvalIdentityCommand(const EvalConfig& config) {
  if (!fs::is_directory(config.samples_dir)) {
    throw InputError("samples directory not found: " + config.samples_dir.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(config.samples_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<EvalRow> rows;
  for (const fs::path& dir : dirs) {
    EvalRow row;
    row.sample = dir.filename().string();
    JobConfig job;
    job.options = config.options;
    job.FillFromSample(dir);
    std::ostringstream err;
    const int code = RunGuarded(
        [&] {
          const TryOnInputs inputs = LoadInputs(job);
          const PipelineRun run = RunPipeline(inputs, job.options);
          std::tie(row.ssim, row.mae) = SelfCheck(inputs.person_image, run.result);
          row.occluded_pixels = run.result.occluded.Count();
        },
        err);
    if (code != kExitOk) {
      row.status = "error";
    } else {
      row.status = row.ssim >= config.threshold ? "ok" : "below_threshold";
    }
    rows.push_back(row);
  }

  if (!config.csv_path.empty()) {
    if (config.csv_path.has_parent_path()) {
      fs::create_directories(config.csv_path.parent_path());
    }
    std::ofstream csv(config.csv_path);
    if (!csv) throw InputError("cannot write " + config.csv_path.string());
    csv << "sample,ssim,mae,occluded_pixels,status\n";
    csv << std::fixed << std::setprecision(6);
    for (const EvalRow& r : rows) {
      csv << r.sample << "," << r.ssim << "," << r.mae << "," << r.occluded_pixels
          << "," << r.status << "\n";
    }
  }
  return rows;
}

}  // namespace atagwarp
