#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace polyls {

using Point = Eigen::Vector2d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterate becomes unusable (empty shape, shape filling the hold-all domain).
class DegenerateIterate : public Error {
public:
  using Error::Error;
};

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * cross(b - a, c - a);
}

}  // namespace polyls
