#pragma once

#include "atagwarp/geometry.hpp"
#include "atagwarp/raster.hpp"

namespace atagwarp {

struct AtagParams {
  // Steepness of the logistic inner/outer gate, per radian.
  double steepness = 8.0;
  // Target elbow flexion above which a warning is raised.
  double flexion_warn_limit = 145.0 * kPi / 180.0;

  void Validate() const;
};

// Arm pose in the target (person) frame and the source (model) frame.
struct AtagCorrespondence {
  ArmChain target;
  ArmChain source;
};

// Share of the lower bone in the angular blend: phi1^2 / (phi1^2 + phi2^2).
// Defined as 0.5 at the origin.
double AngularWeight(double phi1, double phi2);

// Logistic gate 1 / (1 + exp(a (pi - phi))): ~0 in the inner wedge, ~1 in
// the outer wedge.
double InnerOuterGate(double phi, double steepness);

// Smooth weight in the outer wedge, rounded (half-up) weight in the inner
// wedge, mixed by the gate.
double BlendWeight(double phi1, double phi2, const AtagParams& params);

// Source-side angle from the source upper bone. `source_wedge_angle` is the
// angle of the source wedge that corresponds to the point's target wedge.
double MapAngle(double phi1, double phi2, double source_wedge_angle,
                const AtagParams& params);

// Source-side radius: r scaled by the blended source/target bone ratios.
double MapRadius(double r, double blend, const AtagCorrespondence& corr);

// Backward sleeve transform: maps target-frame points to source-frame points.
class AtagTransform {
 public:
  AtagTransform(AtagCorrespondence corr, AtagParams params = {});

  Point2 operator()(Point2 target_point) const;

  const AtagCorrespondence& correspondence() const { return corr_; }
  const AtagParams& params() const { return params_; }

  double TargetFlexion() const { return corr_.target.Flexion(); }
  bool ExceedsFlexionLimit() const {
    return TargetFlexion() > params_.flexion_warn_limit;
  }

  // The inverse-direction transform (source frame to target frame).
  AtagTransform Reversed() const;

 private:
  AtagCorrespondence corr_;
  AtagParams params_;
  int target_orientation_;
  int source_orientation_;
  double source_inner_angle_;
  double upper_ratio_;
  double lower_ratio_;
  Point2 source_upper_dir_;
};

Point2 AtagPoint(Point2 target_point, const AtagCorrespondence& corr,
                 const AtagParams& params = {});

// Evaluates the transform at every set pixel center of `region`.
SourceMap AtagField(const BinaryMask& region, const AtagTransform& transform);
inline SourceMap AtagField(const BinaryMask& region,
                           const AtagCorrespondence& corr,
                           const AtagParams& params = {}) {
  return AtagField(region, AtagTransform(corr, params));
}

}  // namespace atagwarp
