#include "atagwarp/geometry.hpp"

#include <string>

#include "atagwarp/errors.hpp"

namespace atagwarp {

const char* ToString(ArmSide side) {
  return side == ArmSide::kLeft ? "left" : "right";
}

const char* ToString(WedgeSide side) {
  return side == WedgeSide::kInner ? "inner" : "outer";
}

ArmChain::ArmChain(Point2 shoulder, Point2 elbow, Point2 wrist, ArmSide side)
    : shoulder_(shoulder), elbow_(elbow), wrist_(wrist), side_(side) {
  if (!IsFinite(shoulder) || !IsFinite(elbow) || !IsFinite(wrist)) {
    throw DegenerateGeometryError("arm chain has non-finite coordinates");
  }
  if (!(UpperLength() > 0.0) || !(LowerLength() > 0.0)) {
    throw DegenerateGeometryError(std::string("zero-length bone in ") +
                                  ToString(side) + " arm chain");
  }
}

double ArmChain::InteriorAngle() const {
  return AngleBetween(shoulder_ - elbow_, wrist_ - elbow_);
}

int ArmChain::BendSign() const {
  const double c = Cross(shoulder_ - elbow_, wrist_ - elbow_);
  return (c > 0.0) - (c < 0.0);
}

double AngleBetween(Point2 u, Point2 v) {
  if (!(Norm(u) > 0.0) || !(Norm(v) > 0.0)) {
    throw DegenerateGeometryError("angle of a zero-length vector");
  }
  return std::atan2(std::abs(Cross(u, v)), Dot(u, v));
}

int InnerOrientation(const ArmChain& chain, const ArmChain* fallback) {
  if (const int s = chain.BendSign(); s != 0) return s;
  if (fallback != nullptr) {
    if (const int s = fallback->BendSign(); s != 0) return s;
  }
  return 1;
}

WedgeCoordinates ComputeWedgeCoordinates(Point2 x, const ArmChain& chain,
                                         int orientation) {
  const Point2 upper = chain.shoulder() - chain.elbow();
  const Point2 offset = x - chain.elbow();

  WedgeCoordinates w;
  w.r = Norm(offset);
  if (w.r == 0.0) return w;

  const double interior = chain.InteriorAngle();
  // Angle swept from the upper bone towards the point, turning the way the
  // inner wedge opens.
  double sweep = std::atan2(orientation * Cross(upper, offset), Dot(upper, offset));
  if (sweep < 0.0) sweep += kTwoPi;

  if (sweep <= interior) {
    w.side = WedgeSide::kInner;
    w.phi1 = sweep;
    w.phi2 = interior - sweep;
  } else {
    w.side = WedgeSide::kOuter;
    w.phi1 = kTwoPi - sweep;
    w.phi2 = sweep - interior;
  }
  w.phi = w.phi1 + w.phi2;
  return w;
}

double WedgeAngle(const ArmChain& chain, WedgeSide side) {
  const double interior = chain.InteriorAngle();
  return side == WedgeSide::kInner ? interior : kTwoPi - interior;
}

}  // namespace atagwarp
