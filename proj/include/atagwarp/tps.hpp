#pragma once

#include <array>
#include <span>
#include <vector>

#include "atagwarp/geometry.hpp"
#include "atagwarp/raster.hpp"

namespace atagwarp {

// Landmark pair. The fitted spline sends `target` to `source`.
struct Correspondence {
  Point2 target;
  Point2 source;
};

// Radial kernel d^2 log d with U(0) = 0.
double TpsKernel(double d);

// Thin plate spline
//   f(p) = A [1, x, y]^T + sum_i w_i U(|p - c_i|)
// with the kernel weights orthogonal to constants and to the control point
// coordinates.
class TpsModel {
 public:
  TpsModel(std::vector<Point2> control_points, std::vector<Point2> kernel_weights,
           std::array<std::array<double, 3>, 2> affine, double lambda);

  Point2 operator()(Point2 p) const;

  const std::vector<Point2>& control_points() const { return control_points_; }
  const std::vector<Point2>& kernel_weights() const { return kernel_weights_; }
  // Row 0 produces x, row 1 produces y; columns multiply [1, x, y].
  const std::array<std::array<double, 3>, 2>& affine() const { return affine_; }
  double lambda() const { return lambda_; }

 private:
  std::vector<Point2> control_points_;
  std::vector<Point2> kernel_weights_;
  std::array<std::array<double, 3>, 2> affine_;
  double lambda_;
};

// Solves the regularized TPS system (lambda added to the kernel diagonal).
// lambda = 0 interpolates the correspondences exactly.
TpsModel FitTps(std::span<const Correspondence> correspondences, double lambda);

SourceMap TpsField(const BinaryMask& region, const TpsModel& model);

}  // namespace atagwarp
