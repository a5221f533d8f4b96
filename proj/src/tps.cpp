#include "atagwarp/tps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "atagwarp/errors.hpp"

namespace atagwarp {

double TpsKernel(double d) {
  if (d <= 0.0) return 0.0;
  return d * d * std::log(d);
}

TpsModel::TpsModel(std::vector<Point2> control_points,
                   std::vector<Point2> kernel_weights,
                   std::array<std::array<double, 3>, 2> affine, double lambda)
    : control_points_(std::move(control_points)),
      kernel_weights_(std::move(kernel_weights)),
      affine_(affine),
      lambda_(lambda) {
  if (control_points_.size() != kernel_weights_.size()) {
    throw InputError("TPS control points and kernel weights differ in count");
  }
}

Point2 TpsModel::operator()(Point2 p) const {
  Point2 out{affine_[0][0] + affine_[0][1] * p.x + affine_[0][2] * p.y,
             affine_[1][0] + affine_[1][1] * p.x + affine_[1][2] * p.y};
  for (size_t i = 0; i < control_points_.size(); ++i) {
    out = out + TpsKernel(Distance(p, control_points_[i])) * kernel_weights_[i];
  }
  return out;
}

namespace {

void CheckNotCollinear(std::span<const Correspondence> corrs) {
  Point2 mean;
  for (const auto& c : corrs) mean = mean + c.target;
  mean = (1.0 / corrs.size()) * mean;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& c : corrs) {
    const Point2 d = c.target - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  // Smallest eigenvalue of the scatter matrix relative to its trace.
  const double trace = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, trace * trace / 4.0 - det));
  const double smallest = trace / 2.0 - disc;
  if (!(trace > 0.0) || smallest <= 1e-10 * trace) {
    throw FitError("TPS target landmarks are collinear");
  }
}

}  // namespace

TpsModel FitTps(std::span<const Correspondence> correspondences, double lambda) {
  const auto n = static_cast<Eigen::Index>(correspondences.size());
  if (n < 3) {
    throw FitError("TPS needs at least 3 correspondences, got " + std::to_string(n));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw FitError("TPS regularization must be finite and non-negative");
  }
  for (const auto& c : correspondences) {
    if (!IsFinite(c.target) || !IsFinite(c.source)) {
      throw FitError("TPS correspondence has non-finite coordinates");
    }
  }
  CheckNotCollinear(correspondences);

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point2 pi = correspondences[i].target;
    for (Eigen::Index j = 0; j < n; ++j) {
      system(i, j) = TpsKernel(Distance(pi, correspondences[j].target));
    }
    system(i, i) += lambda;
    system(i, n) = system(n, i) = 1.0;
    system(i, n + 1) = system(n + 1, i) = pi.x;
    system(i, n + 2) = system(n + 2, i) = pi.y;
    rhs(i, 0) = correspondences[i].source.x;
    rhs(i, 1) = correspondences[i].source.y;
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw FitError("TPS system is singular (duplicate target landmarks?)");
  }
  const Eigen::MatrixXd solution = lu.solve(rhs);
  if (!solution.allFinite()) throw FitError("TPS solve produced non-finite values");

  std::vector<Point2> controls;
  std::vector<Point2> weights;
  controls.reserve(n);
  weights.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    controls.push_back(correspondences[i].target);
    weights.push_back({solution(i, 0), solution(i, 1)});
  }
  std::array<std::array<double, 3>, 2> affine{};
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 3; ++j) affine[k][j] = solution(n + j, k);
  }
  return TpsModel(std::move(controls), std::move(weights), affine, lambda);
}

SourceMap TpsField(const BinaryMask& region, const TpsModel& model) {
  SourceMap map(region.width(), region.height());
  for (int y = 0; y < region.height(); ++y) {
    for (int x = 0; x < region.width(); ++x) {
      if (region.get(x, y)) map.set(x, y, model(Point2{double(x), double(y)}));
    }
  }
  return map;
}

}  // namespace atagwarp
