#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "atagwarp/atag.hpp"
#include "atagwarp/commands.hpp"
#include "atagwarp/metrics.hpp"
#include "atagwarp/pipeline.hpp"
#include "atagwarp/tps.hpp"
#include "oracles.hpp"
#include "samples.hpp"

namespace {

using namespace atagwarp;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kComplementTol = 1e-12;
constexpr double kGateExample = 0.993307;
constexpr double kGateExampleTol = 1e-6;
constexpr double kEquationSeconds = 1.0;
constexpr double kIdentityTol = 1e-9;
constexpr double kLandmarkTol = 1e-9;
constexpr double kAtagSeconds = 5.0;
constexpr double kRayRelTol = 1e-9;
constexpr double kMagnificationTol = 0.05;
constexpr double kRoundTripTol = 0.5;
constexpr double kPureSeparation = 0.2;
constexpr double kPureBlendTol = 1e-3;
constexpr double kTpsResidualTol = 1e-6;
constexpr double kTpsAffineWeightTol = 1e-8;
constexpr double kTpsOracleTol = 1e-8;
constexpr double kIdentitySsim = 0.99;
constexpr double kSampleSeconds = 1.0;
constexpr int kSyntheticSamples = 20;
constexpr int kMinRealSamples = 5;
constexpr double kSsimOracleTol = 1e-6;
constexpr double kMaxFlexion = 145.0 * kPi / 180.0;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << "failed: " << what;
      pass = false;
    }
  }
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void BlendFormulas(Outcome& out) {
  const auto start = Clock::now();
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  double worst_complement = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = angle(rng), b = angle(rng);
    worst_complement =
        std::max(worst_complement, std::abs(AngularWeight(a, b) + AngularWeight(b, a) - 1.0));
  }
  out.Require(worst_complement <= kComplementTol, "f complement symmetry");
  out.Require(InnerOuterGate(kPi, 8.0) == 0.5 && InnerOuterGate(kPi, 10.0) == 0.5,
              "g(pi) == 0.5");

  const AtagParams params;
  bool in_range = true;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double h = BlendWeight(kTwoPi * i / 400, kTwoPi * j / 400, params);
      in_range = in_range && h >= 0.0 && h <= 1.0;
    }
  }
  for (int i = 0; i < 10000; ++i) {
    const double h = BlendWeight(angle(rng), angle(rng), params);
    in_range = in_range && h >= 0.0 && h <= 1.0;
  }
  out.Require(in_range, "h in [0, 1]");

  const double f12 = AngularWeight(1.0, 2.0);
  out.Require(std::abs(f12 - 0.2) <= kComplementTol, "f(1, 2) = 0.2");
  const double g = InnerOuterGate(kPi + 0.5, 10.0);
  const double direct = 1.0 / (1.0 + std::exp(10.0 * (kPi - (kPi + 0.5))));
  out.Require(std::abs(g - kGateExample) <= kGateExampleTol && std::abs(g - direct) <= 1e-15,
              "g(pi + 0.5, a = 10)");
  const double secs = Seconds(start);
  out.Require(secs < kEquationSeconds, "runtime");
  out.detail << (out.pass ? "" : "; ") << "max |f(a,b)+f(b,a)-1| = " << Fmt(worst_complement)
             << ", f(1,2) = " << f12 << ", g(pi+0.5) = " << Fmt(g) << ", " << Fmt(secs) << " s";
}

void AtagIdentityAndLandmarks(Outcome& out) {
  const auto start = Clock::now();
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_identity = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const ArmChain c = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const AtagTransform f({c, c});
    const Point2 x{300 * u(rng) - 25, 300 * u(rng) - 25};
    worst_identity = std::max(worst_identity, Distance(f(x), x));
  }
  double worst_landmark = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ArmChain t = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const ArmChain s = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const AtagTransform f({t, s});
    worst_landmark = std::max({worst_landmark, Distance(f(t.shoulder()), s.shoulder()),
                               Distance(f(t.elbow()), s.elbow()),
                               Distance(f(t.wrist()), s.wrist())});
  }
  const double secs = Seconds(start);
  out.Require(worst_identity <= kIdentityTol, "identity");
  out.Require(worst_landmark <= kLandmarkTol, "landmarks");
  out.Require(secs < kAtagSeconds, "runtime");
  out.detail << (out.pass ? "" : "; ") << "identity max " << Fmt(worst_identity)
             << " px over 1e4 points, landmark max " << Fmt(worst_landmark)
             << " px over 1e3 pairs, " << Fmt(secs) << " s";
}

void BoneRayScaling(Outcome& out) {
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ArmChain t = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const ArmChain s = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const AtagTransform f({t, s});
    const double r = t.UpperLength() * 1.5 * u(rng) + 0.5;
    const Point2 x = t.elbow() + (r / t.UpperLength()) * (t.shoulder() - t.elbow());
    const double want = r * s.UpperLength() / t.UpperLength();
    worst = std::max(worst, std::abs(Distance(f(x), s.elbow()) - want) / want);
  }
  out.Require(worst <= kRayRelTol, "ray scaling");

  DemoRectConfig cfg;
  cfg.source = ArmChain({96, 40}, {96, 100}, {96, 160}, ArmSide::kLeft);
  cfg.target = ArmChain({96, 20}, {96, 140}, {96, 200}, ArmSide::kLeft);
  const DemoRectResult demo = DemoRectCommand(cfg);
  const double expected = cfg.target.UpperLength() / cfg.source.UpperLength();
  const double rel = std::abs(demo.upper_ratio - expected) / expected;
  out.Require(rel <= kMagnificationTol, "band magnification");
  out.detail << (out.pass ? "" : "; ") << "ray max rel err " << Fmt(worst)
             << ", band ratio " << Fmt(demo.upper_ratio) << " vs " << expected;
}

void PureRegionRoundTrip(Outcome& out) {
  std::mt19937 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const AtagParams params;
  enum Exclusion { kOuter, kNearBisector, kGateOpen, kBranchChange, kNumExclusions };
  int excluded[kNumExclusions] = {};
  int checked = 0;
  double worst = 0.0;
  // Returns the governing bone (0 upper, 1 lower) or the exclusion reason + 2.
  const auto classify = [&](const WedgeCoordinates& w) {
    const double f = AngularWeight(w.phi1, w.phi2);
    const double bone = std::floor(f + 0.5);
    if (w.side != WedgeSide::kInner) return 2 + kOuter;
    if (std::abs(w.phi1 - w.phi2) < kPureSeparation) return 2 + kNearBisector;
    if (std::abs(BlendWeight(w.phi1, w.phi2, params) - bone) > kPureBlendTol) {
      return 2 + kGateOpen;
    }
    return int(bone);
  };
  for (int k = 0; k < 1000; ++k) {
    const ArmChain t = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const ArmChain s = testing_support::RandomChain(rng, 0.0, kMaxFlexion);
    const AtagTransform fwd({t, s});
    const AtagTransform back = fwd.Reversed();
    const int ot = InnerOrientation(t, &s);
    const int os = InnerOrientation(s, &t);
    for (int i = 0; i < 30; ++i) {
      const double r = 1.0 + (std::min(t.UpperLength(), t.LowerLength()) - 1.0) * u(rng);
      const Point2 x = t.elbow() + r * Rotate({1, 0}, kTwoPi * u(rng));
      const Point2 xs = fwd(x);
      const int in_target = classify(ComputeWedgeCoordinates(x, t, ot));
      const int in_source = in_target >= 2 ? in_target : classify(ComputeWedgeCoordinates(xs, s, os));
      if (in_source >= 2) {
        ++excluded[in_source - 2];
        continue;
      }
      if (in_source != in_target) {
        ++excluded[kBranchChange];
        continue;
      }
      worst = std::max(worst, Distance(back(xs), x));
      ++checked;
    }
  }
  out.Require(worst <= kRoundTripTol, "round trip");
  out.Require(checked >= 1000, "enough pure-region points");
  out.detail << (out.pass ? "" : "; ") << "max " << Fmt(worst) << " px over " << checked
             << " points in 1000 configurations; excluded: outer wedge " << excluded[kOuter]
             << ", |phi1-phi2| < 0.2 " << excluded[kNearBisector] << ", gate not settled "
             << excluded[kGateOpen] << ", governing bone differs " << excluded[kBranchChange];
}

void TpsChecks(Outcome& out) {
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  double residual = 0.0, affine_weight = 0.0, oracle_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int n = 4 + k % 9;
    std::vector<Correspondence> corr;
    std::vector<Point2> targets, sources;
    for (int i = 0; i < n; ++i) {
      const Point2 t{u(rng), u(rng)}, s{u(rng), u(rng)};
      corr.push_back({t, s});
      targets.push_back(t);
      sources.push_back(s);
    }
    const TpsModel m = FitTps(corr, 0.0);
    for (const auto& c : corr) residual = std::max(residual, Distance(m(c.target), c.source));

    const double lambda = k % 2 == 0 ? 0.0 : 0.5;
    const TpsModel ml = FitTps(corr, lambda);
    const oracle::TpsSolution ref = oracle::FitTps(targets, sources, lambda);
    for (int i = 0; i < n; ++i) {
      oracle_gap = std::max(oracle_gap, Distance(ml.kernel_weights()[i], ref.weights[i]));
    }
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c)
        oracle_gap = std::max(oracle_gap, std::abs(ml.affine()[r][c] - ref.affine[r][c]));
    for (int i = 0; i < 20; ++i) {
      const Point2 p{u(rng), u(rng)};
      oracle_gap = std::max(oracle_gap, Distance(ml(p), oracle::EvalTps(ref, targets, p)));
    }

    const double a = u(rng) / 100, b = u(rng) / 100, c = u(rng) / 100, d = u(rng) / 100;
    std::vector<Correspondence> affine;
    for (const Point2& t : targets) {
      affine.push_back({t, {a * t.x + b * t.y + 3, c * t.x + d * t.y - 7}});
    }
    const TpsModel fit = FitTps(affine, 0.0);
    for (const Point2& w : fit.kernel_weights()) {
      affine_weight = std::max(affine_weight, Norm(w));
    }
  }
  out.Require(residual <= kTpsResidualTol, "residual");
  out.Require(affine_weight <= kTpsAffineWeightTol, "affine weights");
  out.Require(oracle_gap <= kTpsOracleTol, "dense solver match");
  out.detail << (out.pass ? "" : "; ") << "residual " << Fmt(residual) << " px, affine |w| "
             << Fmt(affine_weight) << ", solver gap " << Fmt(oracle_gap);
}

struct IdentityScore {
  double ssim;
  size_t occluded;
  double seconds;
};

IdentityScore ScoreIdentity(const TryOnInputs& in, Clock::time_point start) {
  const PipelineRun run = RunPipeline(in, {});
  const double secs = Seconds(start);
  const ImageBuffer reference = ApplyMask(in.model_image, in.garment_mask);
  const double ssim = Ssim(run.result.warped_garment, reference, {}, &in.garment_mask);
  return {ssim, run.result.occluded.Count(), secs};
}

void PipelineIdentity(Outcome& out) {
  double min_ssim = 1.0, max_secs = 0.0;
  size_t occluded = 0;
  int real = 0;
  const auto record = [&](const IdentityScore& s, const std::string& name) {
    min_ssim = std::min(min_ssim, s.ssim);
    max_secs = std::max(max_secs, s.seconds);
    occluded += s.occluded;
    out.Require(s.ssim >= kIdentitySsim, name + " ssim " + Fmt(s.ssim));
    out.Require(s.occluded == 0, name + " occluded " + std::to_string(s.occluded));
    out.Require(s.seconds <= kSampleSeconds, name + " runtime");
  };
  for (int i = 0; i < kSyntheticSamples; ++i) {
    const SyntheticSample sample = testing_support::MakeSample(1000 + i);
    const TryOnInputs in = testing_support::IdentityInputs(sample);
    record(ScoreIdentity(in, Clock::now()), "synthetic " + std::to_string(i));
  }
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(testing_support::RealFixtureDir())) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const fs::path& dir : dirs) {
    const auto start = Clock::now();
    JobConfig job;
    job.FillFromSample(dir);
    const TryOnInputs in = LoadInputs(job);
    record(ScoreIdentity(in, start), dir.filename().string());
    ++real;
  }
  out.Require(real >= kMinRealSamples, "real fixtures present");
  out.detail << (out.pass ? "" : "; ") << kSyntheticSamples << " synthetic + " << real
             << " real pairs, min ssim " << Fmt(min_ssim) << ", occluded " << occluded
             << ", slowest " << Fmt(max_secs) << " s";
}

BinaryMask RandomMask(std::mt19937& rng, int w, int h, double p) {
  std::bernoulli_distribution b(p);
  BinaryMask m(w, h);
  for (size_t i = 0; i < m.size(); ++i) m.set_index(i, b(rng));
  return m;
}

void MaskAlgebra(Outcome& out) {
  std::mt19937 rng(707);
  int runs = 0, mismatches = 0, overlaps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 8 + trial % 23, h = 6 + trial % 17;
    TryOnInputs in;
    in.person_image = ImageBuffer(w, h, 3);
    in.person_upper_mask = RandomMask(rng, w, h, 0.5);
    if (trial % 2 == 0) in.target_mask = RandomMask(rng, w, h, 0.5);
    PartWarps warps;
    warps.mapped = BinaryMask(w, h);
    std::vector<BinaryMask> holes;
    for (GarmentPart p : kGarmentParts) {
      PartWarp& pw = warps.parts[int(p)];
      pw.part = p;
      pw.target_region = RandomMask(rng, w, h, 0.3);
      const BinaryMask valid = RandomMask(rng, w, h, 0.6);
      pw.output = {ImageBuffer(w, h, 3), valid, And(Not(valid), RandomMask(rng, w, h, 0.5))};
      holes.push_back(pw.output.holes);
      warps.mapped = Or(warps.mapped, pw.target_region);
    }
    const BinaryMask* target = in.target_mask ? &*in.target_mask : nullptr;
    const BinaryMask s = ComputeOccluded(holes, warps.mapped, target);
    const WarpResult r = ComposeResult(in, warps, s, {});
    const oracle::MaskAlgebra want = oracle::Masks(holes, warps.mapped, target, in.person_upper_mask);
    if (s != want.occluded || r.warp_mask != want.warp_mask) ++mismatches;
    if (!And(r.warp_mask, r.occluded).Empty()) ++overlaps;
    ++runs;
  }
  for (int i = 0; i < 10; ++i) {
    const SyntheticSample model = testing_support::MakeSample(2000 + i);
    const SyntheticSample person = testing_support::MakeSample(3000 + i);
    TryOnInputs in = testing_support::IdentityInputs(model);
    in.person_image = person.image;
    in.person_landmarks = person.landmarks;
    in.person_parse = person.parse;
    in.person_upper_mask = person.upper_body;
    if (i % 2 == 0) {
      in.target_mask = person.garment;
    } else {
      in.target_mask.reset();
    }
    const WarpResult r = RunPipeline(in, {}).result;
    const BinaryMask& base = in.target_mask ? *in.target_mask : in.person_upper_mask;
    if (r.warp_mask != Minus(base, r.occluded)) ++mismatches;
    if (!And(r.warp_mask, r.occluded).Empty()) ++overlaps;
    ++runs;
  }
  out.Require(mismatches == 0, "bit-exact masks");
  out.Require(overlaps == 0, "c'_m and s disjoint");
  out.detail << (out.pass ? "" : "; ") << runs << " runs, " << mismatches << " mismatches, "
             << overlaps << " overlaps";
}

void SsimOracle(Outcome& out) {
  double worst = 0.0;
  bool self_exact = true;
  int pairs = 0;
  for (const auto& [a, b] : testing_support::PatternPairs()) {
    worst = std::max(worst, std::abs(Ssim(a, b) - oracle::Ssim(a, b)));
    self_exact = self_exact && Ssim(a, a) == 1.0 && Ssim(b, b) == 1.0;
    ++pairs;
  }
  out.Require(pairs == 10, "ten pattern pairs");
  out.Require(worst <= kSsimOracleTol, "oracle match");
  out.Require(self_exact, "ssim(x, x) == 1");
  out.detail << (out.pass ? "" : "; ") << "max gap " << Fmt(worst) << " over " << pairs
             << " pairs, ssim(x,x) exact";
}

std::string ReadBytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Determinism(Outcome& out) {
  const fs::path dir = testing_support::ScratchDir("acceptance_det");
  const SyntheticSample model = testing_support::MakeSample(4000);
  const SyntheticSample person = testing_support::MakeSample(4001);
  testing_support::WriteSample(dir / "in", model);
  testing_support::WriteSample(dir / "person", person);
  const std::string args = " --sample \"" + (dir / "in").string() + "\" --person \"" +
                           (dir / "person" / "model.png").string() +
                           "\" --person-keypoints \"" +
                           (dir / "person" / "model_keypoints.json").string() +
                           "\" --person-parse \"" + (dir / "person" / "model_parse.png").string() +
                           "\" --upper-mask \"" + (dir / "person" / "upper_mask.png").string() +
                           "\" --target-mask \"" + (dir / "person" / "target_mask.png").string() +
                           "\" --out ";
  const int a = testing_support::RunTool("warp" + args + "\"" + (dir / "a").string() + "\"");
  const int b = testing_support::RunTool("warp" + args + "\"" + (dir / "b").string() + "\"");
  out.Require(a == 0 && b == 0, "tool exit codes " + std::to_string(a) + "," + std::to_string(b));
  int files = 0, differing = 0;
  if (a == 0 && b == 0) {
    for (const auto& e : fs::directory_iterator(dir / "a")) {
      if (e.path().extension() != ".png") continue;
      ++files;
      if (ReadBytes(e.path()) != ReadBytes(dir / "b" / e.path().filename())) ++differing;
    }
  }
  out.Require(files > 0 && differing == 0, "identical PNGs");
  out.detail << (out.pass ? "" : "; ") << files << " PNGs compared, " << differing
             << " differ";
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"angular weight, gate and blend formulas", BlendFormulas},
      {"ATAG identity and landmark interpolation", AtagIdentityAndLandmarks},
      {"bone-ray scaling and band magnification", BoneRayScaling},
      {"pure-region round trip", PureRegionRoundTrip},
      {"TPS residual, affine reproduction, dense solver", TpsChecks},
      {"pipeline identity", PipelineIdentity},
      {"mask algebra", MaskAlgebra},
      {"SSIM oracle", SsimOracle},
      {"determinism", Determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.Require(false, std::string("exception: ") + e.what());
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": "
              << criteria[i].first << " (" << out.detail.str() << ")" << std::endl;
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
