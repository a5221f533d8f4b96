#pragma once

#include <stdexcept>
#include <string>

namespace atagwarp {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-length bones, zero vectors and other configurations where an angle or
// ratio is undefined.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// Thin plate spline fitting failed (too few points, collinear, singular).
class FitError : public Error {
 public:
  using Error::Error;
};

class AbsentLandmarkError : public Error {
 public:
  explicit AbsentLandmarkError(std::string joint)
      : Error("absent landmark: " + joint), joint_(std::move(joint)) {}

  const std::string& joint() const { return joint_; }

 private:
  std::string joint_;
};

// Unreadable files, malformed documents, invalid parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace atagwarp
