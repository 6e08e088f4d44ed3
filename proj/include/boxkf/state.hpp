#pragma once

// State and measurement layouts, box representations and the Gaussian state
// container shared by the filter, tracker and simulator.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "boxkf/error.hpp"

namespace boxkf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box; (cx, cy) is the geometric center, all values in pixels.
struct BoundingBox
{
  double cx{0.0};
  double cy{0.0};
  double w{0.0};
  double h{0.0};

  double left() const noexcept { return cx - w / 2.0; }
  double top() const noexcept { return cy - h / 2.0; }
  double area() const noexcept { return w * h; }

  static BoundingBox from_corner(double left, double top, double width, double height) noexcept
  {
    return {left + width / 2.0, top + height / 2.0, width, height};
  }

  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

inline bool is_valid(const BoundingBox & box) noexcept
{
  return std::isfinite(box.cx) && std::isfinite(box.cy) && std::isfinite(box.w) &&
         std::isfinite(box.h) && box.w > 0.0 && box.h > 0.0;
}

enum class Parameterization {
  CXCYWH,    // [x, y, vx, vy, w, h]
  CXCYWH_V,  // [x, y, vx, vy, w, vw, h, vh]
  CXCYSR,    // [x, y, s, r, vx, vy, vs], s = w*h, r = w/h
  CXCYHA,    // [x, y, a, h, vx, vy, va, vh], a = w/h
  RandomWalk,  // [x, y, w, h]
};

inline constexpr std::array<Parameterization, 5> kAllParameterizations{
  Parameterization::CXCYWH, Parameterization::CXCYWH_V, Parameterization::CXCYSR,
  Parameterization::CXCYHA, Parameterization::RandomWalk};

inline constexpr int kMeasDim = 4;

/// Where measured component k lives in the state vector, and its velocity (if modeled).
struct AxisSlot
{
  int pos;
  int vel;  // -1 when the component is velocity-free

  constexpr bool has_velocity() const noexcept { return vel >= 0; }
};

struct Layout
{
  int state_dim;
  std::array<AxisSlot, kMeasDim> axes;
};

constexpr Layout layout(Parameterization p) noexcept
{
  switch (p) {
    case Parameterization::CXCYWH: return {6, {{{0, 2}, {1, 3}, {4, -1}, {5, -1}}}};
    case Parameterization::CXCYWH_V: return {8, {{{0, 2}, {1, 3}, {4, 5}, {6, 7}}}};
    case Parameterization::CXCYSR: return {7, {{{0, 4}, {1, 5}, {2, 6}, {3, -1}}}};
    case Parameterization::CXCYHA: return {8, {{{0, 4}, {1, 5}, {2, 6}, {3, 7}}}};
    case Parameterization::RandomWalk: return {4, {{{0, -1}, {1, -1}, {2, -1}, {3, -1}}}};
  }
  return {0, {}};
}

constexpr int state_dim(Parameterization p) noexcept { return layout(p).state_dim; }
constexpr int meas_dim(Parameterization) noexcept { return kMeasDim; }

constexpr std::string_view to_string(Parameterization p) noexcept
{
  switch (p) {
    case Parameterization::CXCYWH: return "cxcywh";
    case Parameterization::CXCYWH_V: return "cxcywh-v";
    case Parameterization::CXCYSR: return "cxcysr";
    case Parameterization::CXCYHA: return "cxcyha";
    case Parameterization::RandomWalk: return "rw";
  }
  return "?";
}

inline std::optional<Parameterization> parse_parameterization(std::string_view name) noexcept
{
  for (auto p : kAllParameterizations) {
    if (to_string(p) == name) {
      return p;
    }
  }
  return std::nullopt;
}

/// Process and measurement noise standard deviations, indexed like the
/// measurement vector of the chosen parameterization, plus the frame period.
struct NoiseParams
{
  double dt{1.0};
  std::array<double, kMeasDim> sigma_process{1.0, 1.0, 1.0, 1.0};
  std::array<double, kMeasDim> sigma_meas{1.0, 1.0, 1.0, 1.0};

  static NoiseParams uniform(double dt, double sigma_process, double sigma_meas) noexcept
  {
    NoiseParams n;
    n.dt = dt;
    n.sigma_process.fill(sigma_process);
    n.sigma_meas.fill(sigma_meas);
    return n;
  }

  void validate() const
  {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw Error(ErrorKind::InvalidDt, "dt must be positive and finite, got " + std::to_string(dt));
    }
    for (double s : sigma_process) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidArgument, "process sigma must be finite and >= 0");
      }
    }
    for (double s : sigma_meas) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorKind::InvalidArgument, "measurement sigma must be finite and >= 0");
      }
    }
  }
};

/// Mean and covariance of one target's state. The covariance is symmetrized on
/// construction and the object is immutable afterwards.
class GaussianState
{
public:
  static constexpr double kSymmetryTol = 1e-9;
  static constexpr double kPsdTol = 1e-9;

  GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov))
  {
    const auto n = mean_.size();
    if (cov_.rows() != n || cov_.cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "covariance must be square and match the mean");
    }
    if (!mean_.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "mean is not finite");
    }
    if (!cov_.allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "covariance is not finite");
    }
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
      throw Error(ErrorKind::InvalidArgument, "covariance is not symmetric");
    }
    cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
    if (n > 0) {
      const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(cov_, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
      if (min_eig < -kPsdTol * std::max(cov_.trace(), 1e-300)) {
        throw Error(ErrorKind::InvalidArgument, "covariance is not positive semidefinite");
      }
    }
  }

  const Vector & mean() const noexcept { return mean_; }
  const Matrix & cov() const noexcept { return cov_; }
  Eigen::Index dim() const noexcept { return mean_.size(); }

private:
  Vector mean_;
  Matrix cov_;
};

/// Box as a measurement vector in the layout of `param`.
inline Vector to_measurement(const BoundingBox & box, Parameterization param)
{
  Vector z(kMeasDim);
  switch (param) {
    case Parameterization::CXCYSR:
      z << box.cx, box.cy, box.w * box.h, box.w / box.h;
      break;
    case Parameterization::CXCYHA:
      z << box.cx, box.cy, box.w / box.h, box.h;
      break;
    default:
      z << box.cx, box.cy, box.w, box.h;
      break;
  }
  return z;
}

/// Places measurement components into a state vector; velocities are zero.
inline Vector embed(const Vector & z, Parameterization param)
{
  if (z.size() != kMeasDim) {
    throw Error(ErrorKind::DimensionMismatch, "measurement must have 4 components");
  }
  const Layout lay = layout(param);
  Vector x = Vector::Zero(lay.state_dim);
  for (int k = 0; k < kMeasDim; ++k) {
    x(lay.axes[k].pos) = z(k);
  }
  return x;
}

/// Inverse of to_measurement. Throws NonPositiveSize when the recovered box is degenerate.
inline BoundingBox box_from_measurement(const Vector & z, Parameterization param)
{
  if (z.size() != kMeasDim) {
    throw Error(ErrorKind::DimensionMismatch, "measurement must have 4 components");
  }
  if (!z.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "state is not finite");
  }
  BoundingBox box{z(0), z(1), 0.0, 0.0};
  switch (param) {
    case Parameterization::CXCYSR: {
      const double s = z(2);
      const double r = z(3);
      if (!(s > 0.0) || !(r > 0.0)) {
        throw Error(ErrorKind::NonPositiveSize, "scale and aspect ratio must be positive");
      }
      box.w = std::sqrt(s * r);
      box.h = std::sqrt(s / r);
      break;
    }
    case Parameterization::CXCYHA: {
      const double a = z(2);
      const double h = z(3);
      if (!(a > 0.0) || !(h > 0.0)) {
        throw Error(ErrorKind::NonPositiveSize, "aspect ratio and height must be positive");
      }
      box.w = a * h;
      box.h = h;
      break;
    }
    default:
      box.w = z(2);
      box.h = z(3);
      break;
  }
  if (!(box.w > 0.0) || !(box.h > 0.0)) {
    throw Error(ErrorKind::NonPositiveSize, "width and height must be positive");
  }
  return box;
}

/// Box described by a state vector (velocity components are ignored).
inline BoundingBox from_state(const Vector & mean, Parameterization param)
{
  const Layout lay = layout(param);
  if (mean.size() != lay.state_dim) {
    throw Error(ErrorKind::DimensionMismatch, "state vector has the wrong dimension");
  }
  Vector z(kMeasDim);
  for (int k = 0; k < kMeasDim; ++k) {
    z(k) = mean(lay.axes[k].pos);
  }
  return box_from_measurement(z, param);
}

}  // namespace boxkf
