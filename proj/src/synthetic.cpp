#include "atagwarp/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace atagwarp {

namespace {

struct SegmentHit {
  double distance;
  double t;  // projection parameter clamped to [0, 1]
};

SegmentHit ProjectOnSegment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = Dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(Dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return {Distance(p, a + t * ab), t};
}

bool InsidePolygon(Point2 p, std::span<const Point2> poly) {
  bool inside = false;
  for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 a = poly[i];
    const Point2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) &&
        p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

// Cheap deterministic per-pixel noise.
uint8_t Hash(uint32_t seed, int x, int y) {
  uint32_t h = seed * 0x9E3779B1u ^ (static_cast<uint32_t>(x) * 0x85EBCA77u) ^
               (static_cast<uint32_t>(y) * 0xC2B2AE3Du);
  h ^= h >> 15;
  h *= 0x2C1B3C6Du;
  h ^= h >> 12;
  return static_cast<uint8_t>(h & 0xFF);
}

double Uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Point2 ClampInto(Point2 p, int width, int height) {
  return {std::clamp(p.x, 6.0, width - 7.0), std::clamp(p.y, 6.0, height - 7.0)};
}

}  // namespace

SyntheticPose RandomPose(std::mt19937& rng, int width, int height) {
  const double sx = width / 192.0;
  const double sy = height / 256.0;
  SyntheticPose pose;
  const double cx = width / 2.0 + Uniform(rng, -6, 6) * sx;
  const double shoulder_y = Uniform(rng, 62, 74) * sy;
  const double hip_y = Uniform(rng, 190, 206) * sy;
  const double shoulder_half = Uniform(rng, 34, 42) * sx;
  const double hip_half = Uniform(rng, 26, 32) * sx;

  pose.neck = {cx, shoulder_y - 10 * sy};
  pose.nose = {cx + Uniform(rng, -3, 3) * sx, shoulder_y - 36 * sy};
  pose.right_shoulder = {cx - shoulder_half, shoulder_y};
  pose.left_shoulder = {cx + shoulder_half, shoulder_y + Uniform(rng, -3, 3) * sy};
  pose.right_hip = {cx - hip_half, hip_y};
  pose.left_hip = {cx + hip_half, hip_y + Uniform(rng, -3, 3) * sy};

  // Bone direction angles measured from straight down, positive outwards.
  for (int side = 0; side < 2; ++side) {
    const double outward = side == 0 ? -1.0 : 1.0;  // right arm is on the left
    const Point2 shoulder = side == 0 ? pose.right_shoulder : pose.left_shoulder;
    const double upper_len = Uniform(rng, 40, 56) * sy;
    const double lower_len = Uniform(rng, 38, 52) * sy;
    const double upper_angle = Uniform(rng, 0.15, 0.9);
    const double bend = Uniform(rng, -0.4, 1.6);
    const double lower_angle = upper_angle + bend;
    const Point2 elbow = ClampInto(
        shoulder + Point2{outward * std::sin(upper_angle) * upper_len,
                          std::cos(upper_angle) * upper_len},
        width, height);
    const Point2 wrist = ClampInto(
        elbow + Point2{outward * std::sin(lower_angle) * lower_len,
                       std::cos(lower_angle) * lower_len},
        width, height);
    if (side == 0) {
      pose.right_elbow = elbow;
      pose.right_wrist = wrist;
    } else {
      pose.left_elbow = elbow;
      pose.left_wrist = wrist;
    }
  }
  return pose;
}

SyntheticStyle RandomStyle(std::mt19937& rng) {
  SyntheticStyle style;
  style.seed = rng();
  style.arm_thickness = Uniform(rng, 14, 22);
  style.sleeve_fraction = Uniform(rng, 0.3, 1.0);
  return style;
}

SyntheticSample RenderSynthetic(const SyntheticPose& pose, const SyntheticStyle& style,
                                int width, int height) {
  SyntheticSample s;
  s.image = ImageBuffer(width, height, 3);
  std::vector<uint8_t> labels(static_cast<size_t>(width) * height, 0);
  s.garment = BinaryMask(width, height);
  s.upper_body = BinaryMask(width, height);

  const std::array<Point2, 4> torso = {
      pose.right_shoulder + Point2{-2, -6}, pose.left_shoulder + Point2{2, -6},
      pose.left_hip + Point2{6, 0}, pose.right_hip + Point2{-6, 0}};
  const double head_radius = Distance(pose.nose, pose.neck) * 0.7;
  const double legs_top = std::min(pose.right_hip.y, pose.left_hip.y);

  struct Arm {
    Point2 a, b, c;
    PartLabel label;
  };
  const std::array<Arm, 2> arms = {
      Arm{pose.right_shoulder, pose.right_elbow, pose.right_wrist, PartLabel::kRightArm},
      Arm{pose.left_shoulder, pose.left_elbow, pose.left_wrist, PartLabel::kLeftArm}};

  std::mt19937 color_rng(style.seed);
  const auto channel = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(color_rng);
  };
  const std::array<int, 3> cloth_a = {channel(20, 235), channel(20, 235), channel(20, 235)};
  const std::array<int, 3> cloth_b = {channel(20, 235), channel(20, 235), channel(20, 235)};
  const std::array<int, 3> skin = {channel(150, 230), channel(110, 180), channel(80, 140)};
  const int stripe = channel(4, 10);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Point2 p{double(x), double(y)};
      const size_t idx = static_cast<size_t>(y) * width + x;
      PartLabel label = PartLabel::kBackground;
      bool garment = false;

      if (y > legs_top && std::abs(p.x - 0.5 * (pose.right_hip.x + pose.left_hip.x)) <
                              0.5 * Distance(pose.right_hip, pose.left_hip) + 4) {
        label = PartLabel::kOther;
      }
      if (InsidePolygon(p, torso)) {
        label = PartLabel::kTorso;
        garment = true;
      }
      if (Distance(p, pose.nose) < head_radius) {
        label = PartLabel::kOther;
        garment = false;
      }
      for (const Arm& arm : arms) {
        const SegmentHit up = ProjectOnSegment(p, arm.a, arm.b);
        const SegmentHit low = ProjectOnSegment(p, arm.b, arm.c);
        const double half = style.arm_thickness / 2.0;
        if (std::min(up.distance, low.distance) > half) continue;
        const double upper_len = Distance(arm.a, arm.b);
        const double lower_len = Distance(arm.b, arm.c);
        const double along = up.distance <= low.distance
                                 ? up.t * upper_len
                                 : upper_len + low.t * lower_len;
        label = arm.label;
        garment = along <= style.sleeve_fraction * (upper_len + lower_len);
      }

      labels[idx] = static_cast<uint8_t>(label);
      const bool upper = label == PartLabel::kTorso || label == PartLabel::kLeftArm ||
                         label == PartLabel::kRightArm;
      s.upper_body.set(x, y, upper);
      s.garment.set(x, y, garment);

      std::array<int, 3> rgb;
      if (garment) {
        const bool stripe_on = ((x + 2 * y) / stripe) % 2 == 0;
        rgb = stripe_on ? cloth_a : cloth_b;
        const int n = Hash(style.seed, x, y) % 24 - 12;
        for (int& v : rgb) v += n;
      } else if (upper || label == PartLabel::kOther) {
        rgb = label == PartLabel::kOther && y > legs_top ? std::array{40, 45, 70} : skin;
      } else {
        const int g = 170 + (y * 50) / height;
        rgb = {g, g, g - 10};
      }
      for (int c = 0; c < 3; ++c) {
        s.image.at(x, y, c) = static_cast<uint8_t>(std::clamp(rgb[c], 0, 255));
      }
    }
  }
  s.parse = LabelMap(width, height, std::move(labels));

  std::array<Keypoint, kNumJoints> kp{};
  const auto put = [&](Joint j, Point2 p) {
    kp[static_cast<int>(j)] = {p, 0.9};
  };
  put(Joint::kNose, pose.nose);
  put(Joint::kNeck, pose.neck);
  put(Joint::kRightShoulder, pose.right_shoulder);
  put(Joint::kRightElbow, pose.right_elbow);
  put(Joint::kRightWrist, pose.right_wrist);
  put(Joint::kLeftShoulder, pose.left_shoulder);
  put(Joint::kLeftElbow, pose.left_elbow);
  put(Joint::kLeftWrist, pose.left_wrist);
  put(Joint::kRightHip, pose.right_hip);
  put(Joint::kLeftHip, pose.left_hip);
  put(Joint::kRightEye, pose.nose + Point2{-6, -6});
  put(Joint::kLeftEye, pose.nose + Point2{6, -6});
  put(Joint::kRightEar, pose.nose + Point2{-12, -2});
  put(Joint::kLeftEar, pose.nose + Point2{12, -2});
  s.landmarks = LandmarkSet(kp);
  return s;
}

Band RenderBand(const ArmChain& chain, double thickness, int width, int height) {
  Band band{ImageBuffer(width, height, 3), BinaryMask(width, height)};
  const double upper_len = chain.UpperLength();
  const double lower_len = chain.LowerLength();
  const double half = thickness / 2.0;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Point2 p{double(x), double(y)};
      // Perpendicular slabs: projection strictly inside the bone.
      const auto slab = [&](Point2 from, Point2 to) -> std::optional<Point2> {
        const Point2 d = to - from;
        const double len = Norm(d);
        const double t = Dot(p - from, d) / (len * len);
        const double off = Cross(d, p - from) / len;
        if (t < 0.0 || t > 1.0 || std::abs(off) > half) return std::nullopt;
        return Point2{t * len, off};
      };
      // Arc length is measured from the elbow outwards on both bones so the
      // texture is symmetric about the joint.
      std::optional<Point2> local;
      double arc = 0.0;
      if (auto u = slab(chain.elbow(), chain.shoulder())) {
        local = u;
        arc = u->x;
      } else if (auto l = slab(chain.elbow(), chain.wrist())) {
        local = l;
        arc = -l->x;
      }
      if (!local) continue;
      band.mask.set(x, y);
      const int along = static_cast<int>(std::floor(arc / 8.0));
      const int across = static_cast<int>(std::floor((local->y + half) / 6.0));
      const bool dark = ((along + across) & 1) != 0;
      const int hue = static_cast<int>(std::abs(arc) / (upper_len + lower_len) * 200.0);
      band.image.at(x, y, 0) = static_cast<uint8_t>(dark ? 40 : 200);
      band.image.at(x, y, 1) = static_cast<uint8_t>(std::clamp(40 + hue, 0, 255));
      band.image.at(x, y, 2) = static_cast<uint8_t>(dark ? 160 : 60);
    }
  }
  return band;
}

}  // namespace atagwarp
