#pragma once

#include <cmath>
#include <numbers>

namespace atagwarp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Continuous pixel coordinate. x grows rightwards, y grows downwards and the
// origin sits on the center of the top-left pixel.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double Dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double Distance(Point2 a, Point2 b) { return Norm(a - b); }
inline bool IsFinite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Rotates by `angle` radians. Positive angles turn u towards v whenever
// Cross(u, v) > 0.
inline Point2 Rotate(Point2 p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

enum class ArmSide { kLeft, kRight };
enum class WedgeSide { kInner, kOuter };

const char* ToString(ArmSide side);
const char* ToString(WedgeSide side);

// Shoulder, elbow and wrist of one arm. Both bones have nonzero length.
class ArmChain {
 public:
  ArmChain(Point2 shoulder, Point2 elbow, Point2 wrist, ArmSide side);

  Point2 shoulder() const { return shoulder_; }
  Point2 elbow() const { return elbow_; }
  Point2 wrist() const { return wrist_; }
  ArmSide side() const { return side_; }

  double UpperLength() const { return Distance(shoulder_, elbow_); }
  double LowerLength() const { return Distance(wrist_, elbow_); }

  // Angle between the two bones at the elbow, in [0, pi]. pi is a straight arm.
  double InteriorAngle() const;
  // pi minus the interior angle.
  double Flexion() const { return kPi - InteriorAngle(); }
  // Sign of Cross(shoulder - elbow, wrist - elbow): +1, -1, or 0 when straight.
  int BendSign() const;

 private:
  Point2 shoulder_;
  Point2 elbow_;
  Point2 wrist_;
  ArmSide side_;
};

// Polar description of a point around the elbow. phi1 is measured from the
// upper bone and phi2 to the lower bone, both inside the wedge that contains
// the point, so phi1 + phi2 is that wedge's angle.
struct WedgeCoordinates {
  double r = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi = 0.0;
  WedgeSide side = WedgeSide::kInner;
};

// Unsigned angle between two nonzero vectors, in [0, pi].
double AngleBetween(Point2 u, Point2 v);

// Rotation direction (+1 or -1) that turns the upper bone into the lower bone
// through the inner wedge. Straight chains borrow the bend of `fallback`;
// if that is straight too the result is +1.
int InnerOrientation(const ArmChain& chain, const ArmChain* fallback = nullptr);

// Wedge coordinates with the inner wedge taken on the `orientation` side of
// the upper bone.
WedgeCoordinates ComputeWedgeCoordinates(Point2 x, const ArmChain& chain,
                                         int orientation);
inline WedgeCoordinates ComputeWedgeCoordinates(Point2 x,
                                                const ArmChain& chain) {
  return ComputeWedgeCoordinates(x, chain, InnerOrientation(chain));
}

// Interior angle for the inner wedge, its reflex complement for the outer.
double WedgeAngle(const ArmChain& chain, WedgeSide side);

}  // namespace atagwarp
