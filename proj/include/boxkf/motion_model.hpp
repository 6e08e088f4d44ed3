#pragma once

// Constant-velocity bounding-box motion model: transition F, process noise Q,
// measurement selector H and measurement noise R for every parameterization.
//
// Process noise follows piecewise-constant white acceleration: one scalar draw
// w ~ N(0, sigma^2) per axis enters the position as dt^2/2 * w and the velocity
// as dt * w, so each (position, velocity) block of Q is sigma^2 * g * g^T with
// g = [dt^2/2, dt]. Velocity-free components get sigma^2 on the diagonal
// (no dt factor), except under RandomWalk where Q = diag(sigma^2 * dt).

#include <Eigen/Dense>

#include "boxkf/error.hpp"
#include "boxkf/state.hpp"

namespace boxkf {

struct ModelMatrices
{
  Matrix F;
  Matrix Q;
  Matrix H;
  Matrix R;
};

namespace detail {

inline void require_dt(double dt)
{
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::InvalidDt, "dt must be positive and finite, got " + std::to_string(dt));
  }
}

}  // namespace detail

inline Matrix build_transition_matrix(Parameterization param, double dt)
{
  detail::require_dt(dt);
  const Layout lay = layout(param);
  Matrix F = Matrix::Identity(lay.state_dim, lay.state_dim);
  for (const AxisSlot & axis : lay.axes) {
    if (axis.has_velocity()) {
      F(axis.pos, axis.vel) = dt;
    }
  }
  return F;
}

/// Noise gain for one velocity-coupled axis: W_pos = g(0) * w, W_vel = g(1) * w.
inline Eigen::Vector2d acceleration_gain(double dt) noexcept
{
  return {dt * dt / 2.0, dt};
}

inline Matrix build_process_noise(Parameterization param, const NoiseParams & noise)
{
  detail::require_dt(noise.dt);
  noise.validate();
  const Layout lay = layout(param);
  const double dt = noise.dt;
  Matrix Q = Matrix::Zero(lay.state_dim, lay.state_dim);
  for (int k = 0; k < kMeasDim; ++k) {
    const AxisSlot axis = lay.axes[k];
    const double var = noise.sigma_process[k] * noise.sigma_process[k];
    if (axis.has_velocity()) {
      const Eigen::Vector2d g = acceleration_gain(dt);
      Q(axis.pos, axis.pos) = var * g(0) * g(0);
      Q(axis.vel, axis.vel) = var * g(1) * g(1);
      Q(axis.pos, axis.vel) = Q(axis.vel, axis.pos) = var * g(0) * g(1);
    } else if (param == Parameterization::RandomWalk) {
      Q(axis.pos, axis.pos) = var * dt;
    } else {
      Q(axis.pos, axis.pos) = var;
    }
  }
  return Q;
}

inline Matrix build_measurement_matrix(Parameterization param)
{
  const Layout lay = layout(param);
  Matrix H = Matrix::Zero(kMeasDim, lay.state_dim);
  for (int k = 0; k < kMeasDim; ++k) {
    H(k, lay.axes[k].pos) = 1.0;
  }
  return H;
}

/// diag(sigma_meas^2). For CXCYSR/CXCYHA the sigmas are already in the
/// transformed units (area, ratio), not pixels.
inline Matrix build_measurement_noise(const NoiseParams & noise)
{
  noise.validate();
  Matrix R = Matrix::Zero(kMeasDim, kMeasDim);
  for (int k = 0; k < kMeasDim; ++k) {
    R(k, k) = noise.sigma_meas[k] * noise.sigma_meas[k];
  }
  return R;
}

inline ModelMatrices build_model(Parameterization param, const NoiseParams & noise)
{
  return {build_transition_matrix(param, noise.dt), build_process_noise(param, noise),
          build_measurement_matrix(param), build_measurement_noise(noise)};
}

}  // namespace boxkf
