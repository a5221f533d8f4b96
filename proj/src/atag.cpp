#include "atagwarp/atag.hpp"

#include <cmath>

#include "atagwarp/errors.hpp"

namespace atagwarp {

void AtagParams::Validate() const {
  if (!(steepness > 0.0) || !std::isfinite(steepness)) {
    throw InputError("gate steepness must be positive");
  }
  if (!std::isfinite(flexion_warn_limit)) {
    throw InputError("flexion warning limit must be finite");
  }
}

double AngularWeight(double phi1, double phi2) {
  const double a = phi1 * phi1;
  const double b = phi2 * phi2;
  if (a + b == 0.0) return 0.5;
  return a / (a + b);
}

double InnerOuterGate(double phi, double steepness) {
  return 1.0 / (1.0 + std::exp(steepness * (kPi - phi)));
}

double BlendWeight(double phi1, double phi2, const AtagParams& params) {
  const double f = AngularWeight(phi1, phi2);
  const double g = InnerOuterGate(phi1 + phi2, params.steepness);
  return g * f + (1.0 - g) * std::floor(f + 0.5);
}

double MapAngle(double phi1, double phi2, double source_wedge_angle,
                const AtagParams& params) {
  const double h = BlendWeight(phi1, phi2, params);
  return phi1 * (1.0 - h) + (source_wedge_angle - phi2) * h;
}

double MapRadius(double r, double blend, const AtagCorrespondence& corr) {
  const double upper_target = corr.target.UpperLength();
  const double lower_target = corr.target.LowerLength();
  if (!(upper_target > 0.0) || !(lower_target > 0.0)) {
    throw DegenerateGeometryError("zero-length target bone");
  }
  return r * ((1.0 - blend) * corr.source.UpperLength() / upper_target +
              blend * corr.source.LowerLength() / lower_target);
}

AtagTransform::AtagTransform(AtagCorrespondence corr, AtagParams params)
    : corr_(std::move(corr)), params_(params) {
  params_.Validate();
  if (corr_.target.side() != corr_.source.side()) {
    throw InputError("target and source arm chains belong to different arms");
  }
  target_orientation_ = InnerOrientation(corr_.target, &corr_.source);
  source_orientation_ = InnerOrientation(corr_.source, &corr_.target);
  source_inner_angle_ = corr_.source.InteriorAngle();
  upper_ratio_ = corr_.source.UpperLength() / corr_.target.UpperLength();
  lower_ratio_ = corr_.source.LowerLength() / corr_.target.LowerLength();
  const Point2 upper = corr_.source.shoulder() - corr_.source.elbow();
  source_upper_dir_ = (1.0 / Norm(upper)) * upper;
}

Point2 AtagTransform::operator()(Point2 target_point) const {
  const WedgeCoordinates w =
      ComputeWedgeCoordinates(target_point, corr_.target, target_orientation_);
  if (w.r == 0.0) return corr_.source.elbow();

  const bool inner = w.side == WedgeSide::kInner;
  const double h = BlendWeight(w.phi1, w.phi2, params_);
  const double source_wedge = inner ? source_inner_angle_ : kTwoPi - source_inner_angle_;
  const double phi1_source = w.phi1 * (1.0 - h) + (source_wedge - w.phi2) * h;
  const double r_source = w.r * ((1.0 - h) * upper_ratio_ + h * lower_ratio_);

  // Turn away from the source upper bone through the matching source wedge.
  const double direction = inner ? source_orientation_ : -source_orientation_;
  return corr_.source.elbow() +
         r_source * Rotate(source_upper_dir_, direction * phi1_source);
}

AtagTransform AtagTransform::Reversed() const {
  return AtagTransform({corr_.source, corr_.target}, params_);
}

Point2 AtagPoint(Point2 target_point, const AtagCorrespondence& corr,
                 const AtagParams& params) {
  return AtagTransform(corr, params)(target_point);
}

SourceMap AtagField(const BinaryMask& region, const AtagTransform& transform) {
  SourceMap map(region.width(), region.height());
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) {
      if (region.get(x, y)) map.set(x, y, transform(Point2{double(x), double(y)}));
    }
  }
  return map;
}

}  // namespace atagwarp
